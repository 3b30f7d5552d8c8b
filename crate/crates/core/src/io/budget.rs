//! Photon-flux bookkeeping from excitation to detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonBudget {
    pub lifetime_ns: f64,
    pub zpl_branching: f64,
    pub waveguide_beta: f64,
    pub fiber_coupling: f64,
    /// Filter transmission times detector efficiency. Always an explicit
    /// input; there is no default.
    pub filter_and_detector: f64,
}

impl PhotonBudget {
    pub fn validate(&self) -> Result<()> {
        if !(self.lifetime_ns > 0.0) || !self.lifetime_ns.is_finite() {
            return Err(Error::Validation { field: "budget.lifetime_ns".into(), reason: "must be positive".into() });
        }
        for (name, v) in [
            ("budget.zpl_branching", self.zpl_branching),
            ("budget.waveguide_beta", self.waveguide_beta),
            ("budget.fiber_coupling", self.fiber_coupling),
            ("budget.filter_and_detector", self.filter_and_detector),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation { field: name.into(), reason: format!("fraction must lie in [0, 1], got {v}") });
            }
        }
        Ok(())
    }

    /// Product of all collection fractions.
    pub fn chain_efficiency(&self) -> f64 {
        self.zpl_branching * self.waveguide_beta * self.fiber_coupling * self.filter_and_detector
    }
}

/// Upper bound on the emitted photon rate, one photon per lifetime (Mcps).
pub fn max_photon_flux(lifetime_ns: f64) -> Result<f64> {
    if !(lifetime_ns > 0.0) || !lifetime_ns.is_finite() {
        return Err(Error::param("lifetime_ns", format!("must be positive, got {lifetime_ns}")));
    }
    Ok(1000.0 / lifetime_ns)
}

/// Detected rate (Mcps) for an excitation rate (Mcps).
pub fn detected_rate(budget: &PhotonBudget, excitation_rate_mcps: f64) -> Result<f64> {
    budget.validate()?;
    let bound = max_photon_flux(budget.lifetime_ns)?;
    if !(excitation_rate_mcps >= 0.0) {
        return Err(Error::param("excitation_rate", "must be non-negative"));
    }
    if excitation_rate_mcps > bound * (1.0 + 1e-12) {
        return Err(Error::SaturationViolation { requested: excitation_rate_mcps, bound });
    }
    Ok(excitation_rate_mcps * budget.chain_efficiency())
}

/// Waveguide coupling needed to detect `detected_mcps` with the emitter
/// cycling at its maximum rate.
pub fn solve_waveguide_beta(
    detected_mcps: f64,
    lifetime_ns: f64,
    zpl_branching: f64,
    fiber_coupling: f64,
    filter_and_detector: f64,
) -> Result<f64> {
    let rest = max_photon_flux(lifetime_ns)? * zpl_branching * fiber_coupling * filter_and_detector;
    if !(rest > 0.0) {
        return Err(Error::param("budget", "collection fractions must be positive to solve for beta"));
    }
    if !(detected_mcps >= 0.0) {
        return Err(Error::param("detected_mcps", "must be non-negative"));
    }
    Ok(detected_mcps / rest)
}
