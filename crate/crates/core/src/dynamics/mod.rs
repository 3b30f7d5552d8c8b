//! Lindblad master-equation dynamics for small (at most 8-level) systems:
//! time evolution, stationary states and two-time correlations by the
//! quantum regression theorem.

mod density;
mod generator;
mod integrator;

use nalgebra::DVector;
use num_complex::Complex64;

pub use density::{DensityOperator, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};
pub use generator::{
    build_two_level_generator, excited_projector, sigma_minus, CollapseOperator, LindbladGenerator,
    TwoLevelParams, EXCITED, GROUND,
};
pub use integrator::IntegratorOptions;

use crate::error::{Error, Result};
use crate::linalg::{self, Operator};

/// Largest Hilbert-space dimension handled.
pub const MAX_DIM: usize = 8;

/// Relative singular-value threshold defining the generator's null space.
pub const NULL_SPACE_TOL: f64 = 1e-8;

/// Sampled solution of the master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
}

impl Trajectory {
    /// Population of level `k` at every sample.
    pub fn population(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(k)).collect()
    }

    pub fn expectation(&self, op: &Operator) -> Vec<Complex64> {
        self.states.iter().map(|s| s.expectation(op)).collect()
    }
}

fn check_times(times: &[f64], name: &str) -> Result<()> {
    if times.is_empty() {
        return Err(Error::param(name, "must be non-empty"));
    }
    if times[0] < 0.0 || !times[0].is_finite() {
        return Err(Error::param(name, "must be non-negative"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param(name, "must be strictly increasing"));
    }
    Ok(())
}

fn check_dim(gen: &LindbladGenerator, dim: usize) -> Result<()> {
    if gen.dim() > MAX_DIM {
        return Err(Error::param("generator", format!("dimension {} exceeds {MAX_DIM}", gen.dim())));
    }
    if gen.dim() != dim {
        return Err(Error::param("rho0", format!("dimension {dim} does not match generator ({})", gen.dim())));
    }
    Ok(())
}

/// Propagates an arbitrary operator `X(0)` under `dX/dt = L(X)`, sampled at
/// `times` measured from 0.
pub fn propagate(
    gen: &LindbladGenerator,
    x0: &Operator,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<Operator>> {
    check_dim(gen, x0.nrows())?;
    check_times(times, "times")?;
    let n = gen.dim();
    let states = integrator::integrate(gen.superoperator(), linalg::vectorize(x0), times, opts)?;
    Ok(states.iter().map(|v| linalg::unvectorize(v, n)).collect())
}

/// Solves `dρ/dt = L(ρ)` from `ρ(0) = rho0`, sampled at `times`.
pub fn evolve(gen: &LindbladGenerator, rho0: &DensityOperator, times: &[f64]) -> Result<Trajectory> {
    evolve_with(gen, rho0, times, &IntegratorOptions::default())
}

pub fn evolve_with(
    gen: &LindbladGenerator,
    rho0: &DensityOperator,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let raw = propagate(gen, rho0.matrix(), times, opts)?;
    let states = raw
        .into_iter()
        .zip(times)
        .map(|(m, &t)| {
            // the flow commutes with the adjoint; only rounding breaks Hermiticity
            let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
            DensityOperator::new(m).map_err(|e| Error::IntegrationFailure {
                last_time: t,
                reason: format!("state left the physical set: {e}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { times: times.to_vec(), states })
}

/// Unique stationary state of the vectorized generator, with the trace
/// condition in place of the redundant ground-population equation.
pub fn steady_state(gen: &LindbladGenerator) -> Result<DensityOperator> {
    let n = gen.dim();
    if n > MAX_DIM {
        return Err(Error::param("generator", format!("dimension {n} exceeds {MAX_DIM}")));
    }
    let s = gen.superoperator();
    let svd = s.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let nullity = if smax == 0.0 {
        n * n
    } else {
        svd.singular_values.iter().filter(|&&x| x < NULL_SPACE_TOL * smax).count()
    };
    if nullity != 1 {
        return Err(Error::NonUniqueSteadyState { nullity });
    }

    // trace preservation makes the ρ_00 row redundant: replace it by tr ρ = 1
    let m = n * n;
    let mut a = s.clone();
    for j in 0..m {
        a[(0, j)] = linalg::ZERO;
    }
    for i in 0..n {
        a[(0, i + n * i)] = linalg::real(smax);
    }
    let mut rhs = DVector::<Complex64>::zeros(m);
    rhs[0] = linalg::real(smax);
    let sol = a
        .full_piv_lu()
        .solve(&rhs)
        .ok_or_else(|| Error::ModelInconsistency("steady-state solve is singular".into()))?;
    let raw = linalg::unvectorize(&sol, n);
    let mut rho = (&raw + raw.adjoint()) * linalg::real(0.5);
    let tr = linalg::trace(&rho).re;
    rho /= linalg::real(tr);
    DensityOperator::new(rho)
}

/// `⟨A†(0) B(τ) A(0)⟩` for the stationary state: evolves `A ρ_ss A†` under
/// the generator and traces with `B`. `taus` must be non-negative; any order.
pub fn two_time_correlation(
    gen: &LindbladGenerator,
    rho_ss: &DensityOperator,
    op_a: &Operator,
    op_b: &Operator,
    taus: &[f64],
) -> Result<Vec<Complex64>> {
    two_time_correlation_with(gen, rho_ss, op_a, op_b, taus, &IntegratorOptions::default())
}

pub fn two_time_correlation_with(
    gen: &LindbladGenerator,
    rho_ss: &DensityOperator,
    op_a: &Operator,
    op_b: &Operator,
    taus: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<Complex64>> {
    if taus.is_empty() {
        return Ok(Vec::new());
    }
    if taus.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::param("taus", "delays must be finite and non-negative"));
    }
    let mut order: Vec<usize> = (0..taus.len()).collect();
    order.sort_by(|&i, &j| taus[i].total_cmp(&taus[j]));
    let mut sorted: Vec<f64> = Vec::with_capacity(taus.len());
    for &i in &order {
        if sorted.last() != Some(&taus[i]) {
            sorted.push(taus[i]);
        }
    }

    let x0 = op_a * rho_ss.matrix() * op_a.adjoint();
    let evolved = propagate(gen, &x0, &sorted, opts)?;
    let values: Vec<Complex64> = evolved.iter().map(|x| linalg::expectation(op_b, x)).collect();

    let mut out = vec![Complex64::new(0.0, 0.0); taus.len()];
    for (i, &tau) in taus.iter().enumerate() {
        let k = sorted.partition_point(|&t| t < tau);
        out[i] = values[k];
    }
    Ok(out)
}

/// Normalized intensity correlation `g²(τ)` of the field radiated through
/// `lowering`: `⟨L†L†(τ)L(τ)L⟩ / ⟨L†L⟩²`.
pub fn normalized_g2(
    gen: &LindbladGenerator,
    rho_ss: &DensityOperator,
    lowering: &Operator,
    taus: &[f64],
) -> Result<Vec<f64>> {
    let number = lowering.adjoint() * lowering;
    let mean = rho_ss.expectation(&number).re;
    if !(mean > 0.0) {
        return Err(Error::Normalization(format!("mean intensity {mean:e} is not positive")));
    }
    let g = two_time_correlation(gen, rho_ss, lowering, &number, taus)?;
    Ok(g.into_iter().map(|z| z.re / (mean * mean)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::mhz_to_angular;

    fn excited() -> DensityOperator {
        DensityOperator::basis(2, EXCITED)
    }

    #[test]
    fn free_decay_matches_lifetime() {
        let g = build_two_level_generator(0.0, 0.0, 26.0, 0.0, 0.0).unwrap();
        let times: Vec<f64> = (1..=40).map(|k| k as f64 * 0.5).collect();
        let tr = evolve(&g, &excited(), &times).unwrap();
        let gamma = mhz_to_angular(26.0);
        for (t, p) in times.iter().zip(tr.population(EXCITED)) {
            assert!((p - (-gamma * t).exp()).abs() < 1e-8, "t={t} p={p}");
        }
        // 26 MHz corresponds to the 6.1 ns lifetime
        assert!((1.0 / gamma - 6.1).abs() < 0.05);
    }

    #[test]
    fn zero_generator_keeps_state() {
        let g = LindbladGenerator::zero(3);
        let rho0 = DensityOperator::pure(&[linalg::real(0.5), Complex64::new(0.5, 0.5), linalg::real(0.5)]).unwrap();
        let tr = evolve(&g, &rho0, &[0.0, 1.0, 100.0]).unwrap();
        for s in &tr.states {
            assert_eq!(s, &rho0);
        }
    }

    #[test]
    fn coherence_decays_at_half_gamma_plus_dephasing() {
        let (g0, gphi) = (26.0, 9.0);
        let g = build_two_level_generator(0.0, 0.0, g0, gphi, 0.0).unwrap();
        let rho0 = DensityOperator::pure(&[linalg::real(1.0), linalg::real(1.0)]).unwrap();
        assert!((rho0.matrix()[(GROUND, EXCITED)].re - 0.5).abs() < 1e-15);
        let times = [1.0, 3.0, 7.5];
        let tr = evolve(&g, &rho0, &times).unwrap();
        let rate = mhz_to_angular(0.5 * g0 + gphi);
        for (t, s) in times.iter().zip(&tr.states) {
            let c = s.matrix()[(GROUND, EXCITED)];
            assert!((c.re - 0.5 * (-rate * t).exp()).abs() < 1e-9);
            assert!(c.im.abs() < 1e-12);
        }
    }

    #[test]
    fn bad_times_rejected() {
        let g = build_two_level_generator(1.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let r = DensityOperator::basis(2, 0);
        assert!(evolve(&g, &r, &[]).is_err());
        assert!(evolve(&g, &r, &[1.0, 1.0]).is_err());
        assert!(evolve(&g, &r, &[-1.0]).is_err());
    }

    #[test]
    fn step_limit_reports_last_good_time() {
        let g = build_two_level_generator(300.0, 0.0, 26.0, 0.0, 0.0).unwrap();
        let opts = IntegratorOptions { max_steps: 5, ..Default::default() };
        match evolve_with(&g, &DensityOperator::basis(2, 0), &[50.0], &opts) {
            Err(Error::IntegrationFailure { last_time, .. }) => assert!(last_time > 0.0 && last_time < 50.0),
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    #[test]
    fn pure_decay_steady_state_is_ground() {
        let g = build_two_level_generator(0.0, 0.0, 26.0, 5.0, 0.0).unwrap();
        let ss = steady_state(&g).unwrap();
        assert!((ss.population(GROUND) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strong_drive_saturates_at_half() {
        let g = build_two_level_generator(2600.0, 0.0, 26.0, 0.0, 0.0).unwrap();
        let ss = steady_state(&g).unwrap();
        assert!((ss.population(EXCITED) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn weak_drive_steady_state_population() {
        let g = build_two_level_generator(1.0, 0.0, 26.0, 0.0, 0.0).unwrap();
        let ss = steady_state(&g).unwrap();
        assert!((ss.population(EXCITED) - 1.475e-3).abs() < 1e-5);
        assert!(linalg::max_abs(&g.apply(ss.matrix())) < 1e-10);
    }

    #[test]
    fn undamped_system_has_degenerate_null_space() {
        let g = build_two_level_generator(10.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(steady_state(&g), Err(Error::NonUniqueSteadyState { .. })));
        assert!(matches!(steady_state(&LindbladGenerator::zero(2)), Err(Error::NonUniqueSteadyState { nullity: 4 })));
    }

    #[test]
    fn two_level_emits_no_pairs() {
        let g = build_two_level_generator(20.0, 3.0, 26.0, 4.0, 0.0).unwrap();
        let ss = steady_state(&g).unwrap();
        let sm = sigma_minus();
        let g2 = two_time_correlation(&g, &ss, &sm, &excited_projector(), &[0.0]).unwrap();
        assert!(g2[0].norm() < 1e-15);
    }

    #[test]
    fn identity_a_gives_stationary_expectation() {
        let g = build_two_level_generator(20.0, 3.0, 26.0, 4.0, 0.0).unwrap();
        let ss = steady_state(&g).unwrap();
        let b = excited_projector();
        let expect = ss.expectation(&b);
        let vals = two_time_correlation(&g, &ss, &linalg::identity(2), &b, &[5.0, 0.0, 1.0, 5.0, 30.0]).unwrap();
        for v in vals {
            assert!((v - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn correlation_at_zero_equals_direct_expectation() {
        let g = build_two_level_generator(20.0, 3.0, 26.0, 4.0, 0.0).unwrap();
        let ss = steady_state(&g).unwrap();
        let a = sigma_minus() + linalg::identity(2) * Complex64::new(0.2, -0.1);
        let b = a.adjoint() * &a;
        let direct = ss.expectation(&(a.adjoint() * &b * &a));
        let qrt = two_time_correlation(&g, &ss, &a, &b, &[0.0]).unwrap()[0];
        assert!((direct - qrt).norm() < 1e-10);
    }

    #[test]
    fn negative_delay_rejected() {
        let g = build_two_level_generator(20.0, 3.0, 26.0, 4.0, 0.0).unwrap();
        let ss = steady_state(&g).unwrap();
        let sm = sigma_minus();
        assert!(two_time_correlation(&g, &ss, &sm, &sm, &[-1.0]).is_err());
    }
}
