//! Dormand–Prince 5(4) embedded Runge–Kutta for the linear, autonomous
//! system `dv/dt = S v` with `S` the vectorized Lindblad superoperator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Take steps of exactly this size (ns) with no error control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { rtol: 1e-8, atol: 1e-12, fixed_step: None, max_steps: 10_000_000 }
    }
}

impl IntegratorOptions {
    pub fn with_tolerance(rtol: f64, atol: f64) -> Self {
        IntegratorOptions { rtol, atol, ..Default::default() }
    }

    pub fn fixed(step: f64) -> Self {
        IntegratorOptions { fixed_step: Some(step), ..Default::default() }
    }
}

const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus the embedded fourth-order weights
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Stepper<'a> {
    s: &'a DMatrix<Complex64>,
    k: Vec<DVector<Complex64>>,
}

impl<'a> Stepper<'a> {
    fn new(s: &'a DMatrix<Complex64>) -> Self {
        let n = s.nrows();
        Stepper { s, k: vec![DVector::zeros(n); 7] }
    }

    /// One DP step; returns (new state, error estimate vector). `k[0]` must
    /// hold `S y` on entry; [`Stepper::accept`] moves `S y_new` into it.
    fn step(&mut self, y: &DVector<Complex64>, h: f64) -> (DVector<Complex64>, DVector<Complex64>) {
        let mut ynew = y.clone();
        for stage in 0..6 {
            let mut arg = y.clone();
            for (j, &a) in A[stage].iter().enumerate() {
                if a != 0.0 {
                    arg.axpy(Complex64::new(h * a, 0.0), &self.k[j], Complex64::new(1.0, 0.0));
                }
            }
            self.k[stage + 1] = self.s * &arg;
            if stage == 5 {
                ynew = arg;
            }
        }
        let mut err = DVector::zeros(y.len());
        for (j, &e) in E.iter().enumerate() {
            if e != 0.0 {
                err.axpy(Complex64::new(h * e, 0.0), &self.k[j], Complex64::new(1.0, 0.0));
            }
        }
        (ynew, err)
    }

    fn accept(&mut self) {
        self.k.swap(0, 6);
    }
}

fn error_norm(err: &DVector<Complex64>, y: &DVector<Complex64>, ynew: &DVector<Complex64>, o: &IntegratorOptions) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y.iter().zip(ynew.iter()))
        .map(|(e, (a, b))| {
            let sc = o.atol + o.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

/// Integrates from `t = 0` and returns the state at each of `times`
/// (non-negative, strictly increasing).
pub(crate) fn integrate(
    s: &DMatrix<Complex64>,
    y0: DVector<Complex64>,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<DVector<Complex64>>> {
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0;
    let mut t = 0.0_f64;
    let mut stepper = Stepper::new(s);
    stepper.k[0] = s * &y;

    let scale = s.iter().map(|z| z.norm()).fold(0.0, f64::max) * (s.nrows() as f64).sqrt();
    if scale == 0.0 {
        return Ok(times.iter().map(|_| y.clone()).collect());
    }
    let mut h = opts.fixed_step.unwrap_or(0.05 / scale);
    let mut steps = 0usize;

    for &target in times {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::IntegrationFailure { last_time: t, reason: "maximum step count exceeded".into() });
            }
            steps += 1;
            let remaining = target - t;
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };

            let (ynew, err) = stepper.step(&y, h_try);
            if opts.fixed_step.is_some() {
                stepper.accept();
                y = ynew;
                t = if last { target } else { t + h_try };
                continue;
            }

            let en = error_norm(&err, &y, &ynew, opts);
            if en <= 1.0 {
                stepper.accept();
                y = ynew;
                t = if last { target } else { t + h_try };
                let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                // don't let a short final step shrink the next interval
                h = if last { h.max(h_try * factor) } else { h_try * factor };
            } else {
                let factor = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = h_try * factor;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::IntegrationFailure { last_time: t, reason: format!("step size underflow (h = {h:e})") });
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}
