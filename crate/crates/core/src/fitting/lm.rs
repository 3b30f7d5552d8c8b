use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

pub type ModelFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
/// Writes `∂f/∂p_j` at `x` into the slice.
pub type JacobianFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;
pub type GuessFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl Parameter {
    pub fn free(name: &str) -> Self {
        Parameter { name: name.into(), lower: f64::NEG_INFINITY, upper: f64::INFINITY }
    }

    pub fn bounded(name: &str, lower: f64, upper: f64) -> Self {
        assert!(lower <= upper, "parameter {name}: lower bound above upper bound");
        Parameter { name: name.into(), lower, upper }
    }

    pub fn non_negative(name: &str) -> Self {
        Parameter::bounded(name, 0.0, f64::INFINITY)
    }
}

/// A named model `y = f(p, x)` with parameter bounds and an optional
/// data-driven initial guess and analytic Jacobian.
#[derive(Clone)]
pub struct FitModel {
    pub name: String,
    pub params: Vec<Parameter>,
    /// Free-form metadata carried into reports.
    pub note: Option<String>,
    eval: ModelFn,
    jacobian: Option<JacobianFn>,
    guess: Option<GuessFn>,
}

impl std::fmt::Debug for FitModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FitModel").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl FitModel {
    pub fn new(name: &str, params: Vec<Parameter>, eval: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static) -> Self {
        assert!(!params.is_empty(), "a fit model needs at least one parameter");
        FitModel { name: name.into(), params, note: None, eval: Arc::new(eval), jacobian: None, guess: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn with_guess(mut self, g: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.guess = Some(Arc::new(g));
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    pub fn eval(&self, p: &[f64], x: f64) -> f64 {
        (self.eval)(p, x)
    }

    pub fn predict(&self, p: &[f64], xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(p, x)).collect()
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    /// Analytic Jacobian (rows = data points), when the model provides one.
    pub fn analytic_jacobian(&self, p: &[f64], xs: &[f64]) -> Option<DMatrix<f64>> {
        let j = self.jacobian.as_ref()?;
        let mut m = DMatrix::zeros(xs.len(), p.len());
        let mut row = vec![0.0; p.len()];
        for (i, &x) in xs.iter().enumerate() {
            j(p, x, &mut row);
            for (k, v) in row.iter().enumerate() {
                m[(i, k)] = *v;
            }
        }
        Some(m)
    }

    /// Data-driven starting point, clamped into the bounds.
    pub fn initial_guess(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let g = match &self.guess {
            Some(g) => g(x, y),
            None => vec![1.0; self.n_params()],
        };
        self.clamp(g)
    }

    fn clamp(&self, mut p: Vec<f64>) -> Vec<f64> {
        for (v, b) in p.iter_mut().zip(&self.params) {
            *v = v.clamp(b.lower, b.upper);
        }
        p
    }

    fn jacobian_or_numeric(&self, p: &[f64], xs: &[f64]) -> DMatrix<f64> {
        self.analytic_jacobian(p, xs).unwrap_or_else(|| numeric_jacobian(self, p, xs))
    }
}

/// Central finite differences with step `max(1e-7·|p|, 1e-10)`.
pub fn numeric_jacobian(model: &FitModel, params: &[f64], xs: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(xs.len(), params.len());
    let mut p = params.to_vec();
    for k in 0..params.len() {
        let h = (1e-7 * params[k].abs()).max(1e-10);
        p[k] = params[k] + h;
        let up = model.predict(&p, xs);
        p[k] = params[k] - h;
        let down = model.predict(&p, xs);
        p[k] = params[k];
        for i in 0..xs.len() {
            m[(i, k)] = (up[i] - down[i]) / (2.0 * h);
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Cosine between residual vector and Jacobian columns.
    pub gtol: f64,
    /// Relative step size.
    pub xtol: f64,
    /// Relative reduction of the cost.
    pub ftol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iterations: 2000, gtol: 1e-8, xtol: 1e-13, ftol: 1e-15 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model: String,
    pub parameter_names: Vec<String>,
    pub parameters: Vec<f64>,
    pub uncertainties: Vec<f64>,
    #[serde(skip)]
    pub covariance: DMatrix<f64>,
    pub chi_square: f64,
    pub reduced_chi_square: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Scaled gradient at the returned point.
    pub gradient_norm: f64,
    /// `y − f(p, x)` (unweighted).
    pub residuals: Vec<f64>,
    pub note: Option<String>,
}

impl FitResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.parameter_names.iter().position(|n| n == name).map(|k| self.parameters[k])
    }

    pub fn uncertainty(&self, name: &str) -> Option<f64> {
        self.parameter_names.iter().position(|n| n == name).map(|k| self.uncertainties[k])
    }

    /// One `name value ± uncertainty` line per parameter.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# model: {}", self.model);
        if let Some(n) = &self.note {
            let _ = writeln!(s, "# note: {n}");
        }
        let _ = writeln!(
            s,
            "# converged: {}  iterations: {}  reduced_chi_square: {:.6e}",
            self.converged, self.iterations, self.reduced_chi_square
        );
        for ((n, v), u) in self.parameter_names.iter().zip(&self.parameters).zip(&self.uncertainties) {
            let _ = writeln!(s, "{n} {v} ± {u:.3e}");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("parameter,value,uncertainty\n");
        for ((n, v), u) in self.parameter_names.iter().zip(&self.parameters).zip(&self.uncertainties) {
            let _ = writeln!(s, "{n},{v},{u}");
        }
        s
    }
}

pub fn fit(model: &FitModel, x: &[f64], y: &[f64], sigma: Option<&[f64]>, init: Option<&[f64]>) -> Result<FitResult> {
    fit_with(model, x, y, sigma, init, &FitOptions::default())
}

/// Levenberg–Marquardt with Marquardt diagonal scaling and box bounds
/// enforced by projection.
pub fn fit_with(
    model: &FitModel,
    x: &[f64],
    y: &[f64],
    sigma: Option<&[f64]>,
    init: Option<&[f64]>,
    opts: &FitOptions,
) -> Result<FitResult> {
    let n = x.len();
    let np = model.n_params();
    if y.len() != n {
        return Err(Error::param("y", format!("length {} does not match x ({n})", y.len())));
    }
    if n < np + 1 {
        return Err(Error::param("x", format!("need at least {} points for {np} parameters", np + 1)));
    }
    let weights: Vec<f64> = match sigma {
        Some(s) => {
            if s.len() != n {
                return Err(Error::param("sigma", "length does not match data"));
            }
            if s.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::param("sigma", "uncertainties must be positive"));
            }
            s.iter().map(|v| 1.0 / v).collect()
        }
        None => vec![1.0; n],
    };
    let mut p = match init {
        Some(p0) => {
            if p0.len() != np {
                return Err(Error::param("init", format!("expected {np} values")));
            }
            model.clamp(p0.to_vec())
        }
        None => model.initial_guess(x, y),
    };

    let residuals = |p: &[f64]| -> Vec<f64> {
        x.iter().zip(y).zip(&weights).map(|((&xi, &yi), &w)| (yi - model.eval(p, xi)) * w).collect()
    };
    let cost_of = |r: &[f64]| 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let weighted_jacobian = |p: &[f64]| {
        let mut j = model.jacobian_or_numeric(p, x);
        for i in 0..n {
            for k in 0..np {
                j[(i, k)] *= weights[i];
            }
        }
        j
    };

    let mut r = residuals(&p);
    let mut cost = cost_of(&r);
    if !cost.is_finite() {
        return Err(Error::param("init", "model is not finite at the starting point"));
    }
    let mut jac = weighted_jacobian(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let rv = nalgebra::DVector::from_column_slice(&r);
        let grad = jac.transpose() * &rv;
        if scaled_gradient(&jac, &grad, &r, &p, model) <= opts.gtol || cost == 0.0 {
            converged = true;
            break;
        }
        let diag: Vec<f64> = (0..np).map(|k| jtj[(k, k)].max(1e-300)).collect();

        let mut accepted = false;
        let mut small_step = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += lambda * diag[k];
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&grad),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = model.clamp(p.iter().zip(step.iter()).map(|(a, b)| a + b).collect());
            let r_new = residuals(&trial);
            let cost_new = cost_of(&r_new);
            let dp: f64 = trial.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let pn: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if cost_new.is_finite() && cost_new < cost {
                let rel = (cost - cost_new) / cost;
                p = trial;
                r = r_new;
                cost = cost_new;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                small_step = dp <= opts.xtol * (pn + opts.xtol) || rel <= opts.ftol;
                break;
            }
            if dp <= opts.xtol * (pn + opts.xtol) {
                small_step = true;
                break;
            }
            lambda *= 4.0;
            if lambda > 1e30 {
                small_step = true;
                break;
            }
        }
        if accepted {
            jac = weighted_jacobian(&p);
        }
        if small_step {
            converged = true;
            break;
        }
    }

    let rv = nalgebra::DVector::from_column_slice(&r);
    let grad = jac.transpose() * &rv;
    let gradient_norm = scaled_gradient(&jac, &grad, &r, &p, model);

    // identifiability and covariance from the weighted Jacobian
    let svd = jac.clone().svd(false, true);
    let smax = svd.singular_values.max();
    let (kmin, smin) = svd.singular_values.argmin();
    if smax == 0.0 || smin <= 1e-12 * smax {
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        let row = v_t.row(kmin);
        let (worst, _) = row.iter().enumerate().fold((0, 0.0), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc });
        return Err(Error::RankDeficient { parameter: model.params[worst].name.clone() });
    }
    let jtj = jac.transpose() * &jac;
    let mut cov = jtj
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient { parameter: model.params[0].name.clone() })?;
    let chi_square = 2.0 * cost;
    let dof = (n - np) as f64;
    let reduced = chi_square / dof;
    if sigma.is_none() {
        cov *= reduced;
    }
    cov = (&cov + cov.transpose()) * 0.5;
    let uncertainties = (0..np).map(|k| cov[(k, k)].max(0.0).sqrt()).collect();
    let raw_residuals = x.iter().zip(y).map(|(&xi, &yi)| yi - model.eval(&p, xi)).collect();

    Ok(FitResult {
        model: model.name.clone(),
        parameter_names: model.params.iter().map(|p| p.name.clone()).collect(),
        parameters: p,
        uncertainties,
        covariance: cov,
        chi_square,
        reduced_chi_square: reduced,
        converged,
        iterations,
        gradient_norm,
        residuals: raw_residuals,
        note: model.note.clone(),
    })
}

/// Largest cosine between the residual vector and a Jacobian column,
/// ignoring parameters pinned at a bound with the gradient pointing out.
fn scaled_gradient(jac: &DMatrix<f64>, grad: &nalgebra::DVector<f64>, r: &[f64], p: &[f64], model: &FitModel) -> f64 {
    let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rn == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for k in 0..p.len() {
        let b = &model.params[k];
        // grad is J^T r; the descent step moves p along +grad
        if (p[k] <= b.lower && grad[k] < 0.0) || (p[k] >= b.upper && grad[k] > 0.0) {
            continue;
        }
        let cn = jac.column(k).norm();
        if cn > 0.0 {
            worst = worst.max(grad[k].abs() / (cn * rn));
        }
    }
    worst
}
