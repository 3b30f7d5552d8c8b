//! Interference of emitter resonance fluorescence with a reflected local
//! oscillator.
//!
//! The collected output field is `a_out = α + √κ σ₋`, with `κ` the rate into
//! the collected mode (1/ns) and `α` in units of `√(1/ns)`, so `⟨a_out†a_out⟩`
//! is a photon flux in 1/ns.
//!
//! The LO phase is measured relative to the emitter's resonant coherent
//! scattering: `α = |α| e^{iφ} u` where `u` is the unit phasor of `⟨σ₋⟩` at
//! zero extra detuning. With this reference `φ = π` is fully destructive on
//! resonance and `φ = π/2` is in quadrature.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::mhz_to_angular;
use crate::dynamics::{self, CollapseOperator, DensityOperator, LindbladGenerator, TwoLevelParams};
use crate::error::{Error, Result};
use crate::fitting::{self, model_exponential};
use crate::linalg::{self, Operator};
use crate::observables::{CorrelationFunction, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalOscillator {
    pub amplitude: f64,
    pub phase: f64,
}

impl LocalOscillator {
    /// Phase is wrapped into `[0, 2π)`.
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::param("lo.amplitude", format!("must be finite and non-negative, got {amplitude}")));
        }
        if !phase.is_finite() {
            return Err(Error::param("lo.phase", "must be finite"));
        }
        Ok(LocalOscillator { amplitude, phase: phase.rem_euclid(TAU) })
    }

    pub fn off() -> Self {
        LocalOscillator { amplitude: 0.0, phase: 0.0 }
    }

    /// LO photon flux `|α|²` in 1/ns.
    pub fn flux(&self) -> f64 {
        self.amplitude * self.amplitude
    }
}

/// Maps one polarization knob onto the LO: `amplitude = max·mix` and the
/// phase moves linearly from `π` (mix = 0) to `π/2` (mix = 1).
///
/// A phenomenological parameterization, not a model of the fiber optics.
pub fn lo_from_polarization(mix_parameter: f64, max_amplitude: f64) -> Result<LocalOscillator> {
    if !(0.0..=1.0).contains(&mix_parameter) {
        return Err(Error::param("mix_parameter", format!("must lie in [0, 1], got {mix_parameter}")));
    }
    LocalOscillator::new(max_amplitude * mix_parameter, PI - FRAC_PI_2 * mix_parameter)
}

/// Evaluation path for [`reflected_intensity_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Numerical steady state of the full master equation at each detuning.
    SteadyState,
    /// Closed-form lowest-order response of a two-level emitter
    /// (`⟨σ₋⟩` linear and `ρ_ee` quadratic in the drive).
    WeakDrive,
}

#[derive(Debug, Clone)]
pub struct OutputFieldModel {
    pub lo: LocalOscillator,
    pub emitter_generator: LindbladGenerator,
    /// Emission rate into the collected mode (1/ns).
    pub coupling_rate: f64,
    lowering: Operator,
    detuning_projector: Operator,
    two_level: Option<TwoLevelParams>,
}

impl OutputFieldModel {
    /// General form: `lowering` is the emitter operator radiating into the
    /// collected mode and `detuning_projector` the operator a laser detuning
    /// multiplies (`H → H − δ P`).
    pub fn new(
        lo: LocalOscillator,
        emitter_generator: LindbladGenerator,
        coupling_rate: f64,
        lowering: Operator,
        detuning_projector: Operator,
    ) -> Result<Self> {
        if !(coupling_rate >= 0.0) || !coupling_rate.is_finite() {
            return Err(Error::param("coupling_rate", format!("must be finite and non-negative, got {coupling_rate}")));
        }
        let n = emitter_generator.dim();
        for (name, op) in [("lowering", &lowering), ("detuning_projector", &detuning_projector)] {
            if op.nrows() != n || op.ncols() != n {
                return Err(Error::param(name, format!("must be {n}×{n}")));
            }
        }
        Ok(OutputFieldModel { lo, emitter_generator, coupling_rate, lowering, detuning_projector, two_level: None })
    }

    /// Two-level emitter with `κ = coupling_mhz` expressed as an angular rate.
    pub fn two_level(lo: LocalOscillator, emitter: TwoLevelParams, coupling_mhz: f64) -> Result<Self> {
        let mut m = OutputFieldModel::new(
            lo,
            emitter.generator()?,
            mhz_to_angular(coupling_mhz),
            dynamics::sigma_minus(),
            dynamics::excited_projector(),
        )?;
        m.two_level = Some(emitter);
        Ok(m)
    }

    pub fn with_lo(&self, lo: LocalOscillator) -> Self {
        OutputFieldModel { lo, ..self.clone() }
    }

    pub fn lowering(&self) -> &Operator {
        &self.lowering
    }

    fn generator_at(&self, detuning_mhz: f64) -> Result<LindbladGenerator> {
        if detuning_mhz == 0.0 {
            return Ok(self.emitter_generator.clone());
        }
        let shift = &self.detuning_projector * linalg::real(-mhz_to_angular(detuning_mhz));
        self.emitter_generator.with_hamiltonian_term(&shift)
    }

    /// Unit phasor of the resonant coherent scattering `⟨σ₋⟩`.
    pub fn phase_reference(&self) -> Result<Complex64> {
        let s = match (self.two_level, self.emitter_generator.dim()) {
            (Some(p), _) => weak_drive_response(&p, 0.0).0,
            _ => dynamics::steady_state(&self.emitter_generator)?.expectation(&self.lowering),
        };
        let n = s.norm();
        Ok(if n > 0.0 { s / n } else { Complex64::new(1.0, 0.0) })
    }

    /// Complex LO amplitude `α`.
    pub fn alpha(&self) -> Result<Complex64> {
        Ok(Complex64::from_polar(self.lo.amplitude, self.lo.phase) * self.phase_reference()?)
    }

    /// `a_out = α·1 + √κ L`.
    pub fn output_operator(&self) -> Result<Operator> {
        let n = self.emitter_generator.dim();
        Ok(linalg::identity(n) * self.alpha()? + &self.lowering * linalg::real(self.coupling_rate.sqrt()))
    }

    /// Generator with the collected part of the emission rerouted through the
    /// displaced jump `a_out`, plus the Hamiltonian that leaves the master
    /// equation unchanged. A quantum-jump unraveling of it yields the
    /// detected photons of the output field.
    ///
    /// The collected channel must be a collapse operator proportional to
    /// `lowering` with rate at least `κ`.
    pub fn displaced_generator(&self) -> Result<LindbladGenerator> {
        let kappa = self.coupling_rate;
        let alpha = self.alpha()?;
        let mut ops: Vec<CollapseOperator> = self.emitter_generator.collapse_ops().to_vec();
        let k = ops
            .iter()
            .position(|op| proportional(&op.matrix, &self.lowering))
            .ok_or_else(|| Error::ModelInconsistency("no collapse channel matches the collected lowering operator".into()))?;
        // same channel rewritten as rate·D[lowering]
        let rate = ops[k].rate * (ops[k].matrix.norm() / self.lowering.norm()).powi(2);
        if kappa > rate * (1.0 + 1e-12) {
            return Err(Error::param("coupling_rate", format!("collected rate {kappa} exceeds channel rate {rate}")));
        }
        ops[k] = CollapseOperator::new(self.lowering.clone(), (rate - kappa).max(0.0));
        let n = self.emitter_generator.dim();
        let c = &self.lowering * linalg::real(kappa.sqrt());
        if kappa > 0.0 {
            let displaced = &self.lowering + linalg::identity(n) * (alpha / kappa.sqrt());
            ops.push(CollapseOperator::new(displaced, kappa));
        }
        let h_c = (&c * alpha.conj() - c.adjoint() * alpha) * Complex64::new(0.0, -0.5);
        LindbladGenerator::new(self.emitter_generator.hamiltonian() + h_c, ops)
    }
}

fn proportional(a: &Operator, b: &Operator) -> bool {
    let nb = b.norm();
    let na = a.norm();
    if na == 0.0 || nb == 0.0 {
        return false;
    }
    // |⟨a, b⟩| = |a||b| iff a ∥ b
    let inner: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    (inner.norm() - na * nb).abs() <= 1e-12 * na * nb
}

/// Weak-drive `⟨σ₋⟩` and `ρ_ee` of a two-level emitter at an extra detuning.
fn weak_drive_response(p: &TwoLevelParams, extra_detuning_mhz: f64) -> (Complex64, f64) {
    let omega = mhz_to_angular(p.rabi_mhz);
    let delta = mhz_to_angular(p.detuning_mhz + extra_detuning_mhz);
    let g1 = mhz_to_angular(p.gamma0_mhz + p.extra_decay_mhz);
    let g2 = mhz_to_angular(p.coherence_decay_mhz());
    let coherence = Complex64::new(0.0, -0.5 * omega) / Complex64::new(g2, -delta);
    let rho_ee = omega * omega * g2 / (2.0 * g1 * (g2 * g2 + delta * delta));
    (coherence, rho_ee)
}

/// Output intensity against laser detuning, split into its parts:
/// `total = |α|² + interference + fluorescence`, with
/// `interference = 2√κ Re(α*⟨L⟩)` and `fluorescence = κ⟨L†L⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomodyneSpectrum {
    pub detuning_mhz: Vec<f64>,
    pub total: Vec<f64>,
    pub interference: Vec<f64>,
    pub fluorescence: Vec<f64>,
    /// `|α|²`, the far-detuned baseline.
    pub lo_flux: f64,
}

impl HomodyneSpectrum {
    pub fn total_spectrum(&self) -> Spectrum {
        Spectrum::new(self.detuning_mhz.clone(), self.total.clone(), "intensity_per_ns")
    }

    pub fn interference_spectrum(&self) -> Spectrum {
        Spectrum::new(self.detuning_mhz.clone(), self.interference.clone(), "interference_per_ns")
    }

    pub fn fluorescence_spectrum(&self) -> Spectrum {
        Spectrum::new(self.detuning_mhz.clone(), self.fluorescence.clone(), "fluorescence_per_ns")
    }
}

pub fn reflected_intensity_spectrum(
    model: &OutputFieldModel,
    detunings_mhz: &[f64],
    regime: Regime,
) -> Result<HomodyneSpectrum> {
    if detunings_mhz.is_empty() {
        return Err(Error::param("detunings", "must be non-empty"));
    }
    let alpha = model.alpha()?;
    let sk = model.coupling_rate.sqrt();
    let number = model.lowering.adjoint() * &model.lowering;
    let mut interference = Vec::with_capacity(detunings_mhz.len());
    let mut fluorescence = Vec::with_capacity(detunings_mhz.len());
    for &d in detunings_mhz {
        let (coh, pop) = match regime {
            Regime::WeakDrive => {
                let p = model
                    .two_level
                    .ok_or_else(|| Error::param("regime", "weak-drive path needs a two-level emitter"))?;
                weak_drive_response(&p, d)
            }
            Regime::SteadyState => {
                let rho = dynamics::steady_state(&model.generator_at(d)?)?;
                (rho.expectation(&model.lowering), rho.expectation(&number).re)
            }
        };
        interference.push(2.0 * sk * (alpha.conj() * coh).re);
        fluorescence.push(model.coupling_rate * pop);
    }
    let lo_flux = alpha.norm_sqr();
    let total = interference.iter().zip(&fluorescence).map(|(i, f)| lo_flux + i + f).collect();
    Ok(HomodyneSpectrum { detuning_mhz: detunings_mhz.to_vec(), total, interference, fluorescence, lo_flux })
}

/// Even/odd split of `y(δ) − baseline` on a grid symmetric about zero:
/// returns `‖odd‖ / (‖odd‖ + ‖even‖)`, 0 for a symmetric line and 1 for a
/// purely dispersive one.
pub fn odd_fraction(detunings_mhz: &[f64], values: &[f64], baseline: f64) -> Result<f64> {
    let n = detunings_mhz.len();
    if values.len() != n || n == 0 {
        return Err(Error::param("values", "length must match detunings"));
    }
    let scale = detunings_mhz.iter().fold(0.0f64, |a, d| a.max(d.abs())).max(1.0);
    let (mut odd, mut even) = (0.0, 0.0);
    for i in 0..n {
        let j = n - 1 - i;
        if (detunings_mhz[i] + detunings_mhz[j]).abs() > 1e-9 * scale {
            return Err(Error::param("detunings", "grid must be symmetric about zero"));
        }
        let a = values[i] - baseline;
        let b = values[j] - baseline;
        odd += (0.5 * (a - b)).powi(2);
        even += (0.5 * (a + b)).powi(2);
    }
    let (odd, even) = (odd.sqrt(), even.sqrt());
    Ok(if odd + even == 0.0 { 0.0 } else { odd / (odd + even) })
}

/// Normalized intensity correlation of the output field,
/// `⟨a†a†(τ)a(τ)a⟩ / ⟨a†a⟩²`. Negative delays are mapped to `|τ|`.
pub fn homodyne_g2(model: &OutputFieldModel, taus: &[f64]) -> Result<CorrelationFunction> {
    let rho = dynamics::steady_state(&model.emitter_generator)?;
    homodyne_g2_in(model, &rho, taus)
}

fn homodyne_g2_in(model: &OutputFieldModel, rho: &DensityOperator, taus: &[f64]) -> Result<CorrelationFunction> {
    let a = model.output_operator()?;
    let number = a.adjoint() * &a;
    let mean = rho.expectation(&number).re;
    // below rounding level of the operator scale the flux is zero
    let scale = model.lo.flux() + model.coupling_rate;
    if !(mean > 1e-12 * scale) {
        return Err(Error::Normalization(format!("mean output intensity {mean:e} is not positive")));
    }
    let abs_taus: Vec<f64> = taus.iter().map(|t| t.abs()).collect();
    let g = dynamics::two_time_correlation(&model.emitter_generator, rho, &a, &number, &abs_taus)?;
    let counts = g.into_iter().map(|z| z.re).collect();
    CorrelationFunction::from_counts(taus.to_vec(), counts, vec![mean * mean; taus.len()])
}

/// Zero-delay `g²` of the output field.
pub fn homodyne_g2_zero(model: &OutputFieldModel) -> Result<f64> {
    Ok(homodyne_g2(model, &[0.0])?.g2[0])
}

/// Result of tuning the LO amplitude toward a target zero-delay bunching.
#[derive(Debug, Clone, Serialize)]
pub struct LoFit {
    pub lo: LocalOscillator,
    /// `|α|²` in 1/ns.
    pub lo_flux_per_ns: f64,
    pub g2_zero: f64,
    /// `1/e` recovery time from an exponential fit of `g²(τ)`.
    pub recovery_time_ns: f64,
    pub recovery_time_uncertainty_ns: f64,
    pub taus: Vec<f64>,
    pub g2: Vec<f64>,
}

/// Finds the LO amplitude (phase fixed) that gives `g²(0) = target` on the
/// LO-dominated branch, where `g²(0)` falls monotonically toward 1 as the
/// amplitude grows, then fits an exponential to `g²(τ)` over `taus`.
pub fn fit_lo_amplitude(model: &OutputFieldModel, target_g2: f64, taus: &[f64]) -> Result<LoFit> {
    if !(target_g2 > 1.0) {
        return Err(Error::param("target_g2", "bunching target must exceed 1"));
    }
    let rho = dynamics::steady_state(&model.emitter_generator)?;
    let g0 = |amp: f64| -> Result<f64> {
        let m = model.with_lo(LocalOscillator::new(amp, model.lo.phase)?);
        Ok(homodyne_g2_in(&m, &rho, &[0.0])?.g2[0])
    };

    // natural amplitude scale: the coherently scattered field
    let coh = rho.expectation(&model.lowering).norm() * model.coupling_rate.sqrt();
    let scale = coh.max(1e-6);
    let mut grid = Vec::new();
    let mut a = scale * 1e-2;
    while a < scale * 1e4 {
        grid.push(a);
        a *= 1.15;
    }
    let values: Vec<f64> = grid.iter().map(|&a| g0(a)).collect::<Result<_>>()?;
    // last crossing of the target when scanning upward in amplitude
    let k = (0..grid.len() - 1)
        .rev()
        .find(|&k| (values[k] - target_g2) * (values[k + 1] - target_g2) <= 0.0)
        .ok_or_else(|| Error::ModelInconsistency(format!("g2(0) = {target_g2} is not reachable by tuning the LO amplitude")))?;
    let (mut lo, mut hi) = (grid[k], grid[k + 1]);
    let (mut flo, _) = (values[k] - target_g2, values[k + 1] - target_g2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = g0(mid)? - target_g2;
        if fm == 0.0 || (hi - lo) <= 1e-14 * mid {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let amp = 0.5 * (lo + hi);
    let fitted = model.with_lo(LocalOscillator::new(amp, model.lo.phase)?);
    let cf = homodyne_g2_in(&fitted, &rho, taus)?;
    let g2_zero = homodyne_g2_in(&fitted, &rho, &[0.0])?.g2[0];
    let fit = fitting::fit(&model_exponential(), taus, &cf.g2, None, None)?;
    Ok(LoFit {
        lo: fitted.lo,
        lo_flux_per_ns: amp * amp,
        g2_zero,
        recovery_time_ns: fit.get("tau").unwrap_or(f64::NAN),
        recovery_time_uncertainty_ns: fit.uncertainty("tau").unwrap_or(f64::NAN),
        taus: cf.taus,
        g2: cf.g2,
    })
}
