//! Coherent single-pass scattering of a weak probe by an emitter coupled to
//! a bidirectional waveguide, and the extinction ↔ cooperativity algebra.
//!
//! All rates are ordinary frequencies in MHz. `gamma_1d` counts decay into
//! both waveguide directions; `gamma_prime` collects every other decay path
//! plus pure dephasing, which is the weak-probe limit of the full
//! master-equation treatment.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideCoupling {
    pub gamma_1d_mhz: f64,
    pub gamma_prime_mhz: f64,
}

/// Cooperativity inferred for the measured device.
pub const DEVICE_COOPERATIVITY: f64 = 0.104;

impl WaveguideCoupling {
    pub fn new(gamma_1d_mhz: f64, gamma_prime_mhz: f64) -> Result<Self> {
        let wg = WaveguideCoupling { gamma_1d_mhz, gamma_prime_mhz };
        wg.validate()?;
        Ok(wg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_1d_mhz >= 0.0) || !(self.gamma_prime_mhz >= 0.0) {
            return Err(Error::param("waveguide", "gamma_1d and gamma_prime must be non-negative"));
        }
        if !(self.total_mhz() > 0.0) {
            return Err(Error::param("waveguide", "total linewidth gamma_1d + gamma_prime must be positive"));
        }
        Ok(())
    }

    /// Split a total linewidth so that `Γ₁D/Γ′ = cooperativity`.
    pub fn from_cooperativity(cooperativity: f64, total_mhz: f64) -> Result<Self> {
        if !(cooperativity >= 0.0) {
            return Err(Error::param("cooperativity", "must be non-negative"));
        }
        let gamma_prime = total_mhz / (1.0 + cooperativity);
        WaveguideCoupling::new(total_mhz - gamma_prime, gamma_prime)
    }

    /// The measured device: C = 0.104 with the coherence-limited linewidth
    /// `γ₀ + 2γ_φ` of a 26.1 MHz radiative rate and 9.3 MHz pure dephasing.
    pub fn device() -> Self {
        WaveguideCoupling::from_cooperativity(DEVICE_COOPERATIVITY, 26.1 + 2.0 * 9.3).expect("valid device")
    }

    pub fn total_mhz(&self) -> f64 {
        self.gamma_1d_mhz + self.gamma_prime_mhz
    }

    /// Fraction `β = Γ₁D/γ` of the line into the guided mode.
    pub fn beta(&self) -> f64 {
        self.gamma_1d_mhz / self.total_mhz()
    }
}

/// `C = Γ₁D/Γ′`.
pub fn cooperativity(wg: &WaveguideCoupling) -> Result<f64> {
    if !(wg.gamma_prime_mhz > 0.0) {
        return Err(Error::Domain("cooperativity undefined for gamma_prime = 0".into()));
    }
    Ok(wg.gamma_1d_mhz / wg.gamma_prime_mhz)
}

/// `t(δ) = 1 − (Γ₁D/γ) / (1 − 2iδ/γ)`, `γ = Γ₁D + Γ′`.
pub fn transmission_amplitude(detuning_mhz: f64, wg: &WaveguideCoupling) -> Complex64 {
    let gamma = wg.total_mhz();
    let denom = Complex64::new(1.0, -2.0 * detuning_mhz / gamma);
    Complex64::new(1.0, 0.0) - wg.beta() / denom
}

/// On-resonance extinction `1 − 1/(1 + C)²`.
pub fn extinction_on_resonance(c: f64) -> Result<f64> {
    if !(c >= 0.0) {
        return Err(Error::Domain(format!("cooperativity must be non-negative, got {c}")));
    }
    Ok(1.0 - (1.0 + c).powi(-2))
}

/// Inverse of [`extinction_on_resonance`]: `C = 1/√(1 − ext) − 1`.
pub fn cooperativity_from_extinction(extinction: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&extinction) {
        return Err(Error::Domain(format!("extinction must lie in [0, 1), got {extinction}")));
    }
    Ok(1.0 / (1.0 - extinction).sqrt() - 1.0)
}

/// `|t(δ)|²` on the given grid. The dip is Lorentzian with FWHM `γ`.
pub fn transmission_spectrum(wg: &WaveguideCoupling, detunings_mhz: &[f64]) -> Result<Spectrum> {
    if detunings_mhz.is_empty() {
        return Err(Error::param("detunings", "must be non-empty"));
    }
    wg.validate()?;
    let values = detunings_mhz.iter().map(|&d| transmission_amplitude(d, wg).norm_sqr()).collect();
    Ok(Spectrum::new(detunings_mhz.to_vec(), values, "transmission"))
}

/// Resonant extinction when a fraction `p_dark` of the population sits in
/// a ground level the probe does not address.
pub fn thermally_weighted_extinction(c: f64, p_dark: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_dark) {
        return Err(Error::param("p_dark", "population must lie in [0, 1]"));
    }
    Ok((1.0 - p_dark) * extinction_on_resonance(c)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cooperativity_cases() {
        assert_eq!(cooperativity(&WaveguideCoupling::new(0.0, 5.0).unwrap()).unwrap(), 0.0);
        assert_eq!(cooperativity(&WaveguideCoupling::new(3.0, 3.0).unwrap()).unwrap(), 1.0);
        assert!((cooperativity(&WaveguideCoupling::device()).unwrap() - 0.104).abs() < 1e-12);
        assert!(matches!(cooperativity(&WaveguideCoupling::new(1.0, 0.0).unwrap()), Err(Error::Domain(_))));
        assert!(WaveguideCoupling::new(0.0, 0.0).is_err());
        assert!(WaveguideCoupling::new(-1.0, 2.0).is_err());
    }

    #[test]
    fn uncoupled_emitter_is_transparent() {
        let wg = WaveguideCoupling::new(0.0, 30.0).unwrap();
        for d in [-100.0, 0.0, 3.0, 1e4] {
            assert_eq!(transmission_amplitude(d, &wg), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn far_detuned_transparency() {
        let wg = WaveguideCoupling::device();
        assert!((transmission_amplitude(1e9, &wg).norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn device_extinction() {
        let wg = WaveguideCoupling::device();
        let t0 = transmission_amplitude(0.0, &wg).norm_sqr();
        assert!((t0 - 0.82).abs() < 1e-3, "{t0}");
        let ext = extinction_on_resonance(0.104).unwrap();
        assert!((ext - 0.180).abs() < 1e-3);
        assert!((1.0 - t0 - extinction_on_resonance(cooperativity(&wg).unwrap()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn extinction_closed_form() {
        assert_eq!(extinction_on_resonance(0.0).unwrap(), 0.0);
        assert_eq!(extinction_on_resonance(1.0).unwrap(), 0.75);
        assert!(extinction_on_resonance(-0.1).is_err());
        assert_eq!(cooperativity_from_extinction(0.0).unwrap(), 0.0);
        assert!((cooperativity_from_extinction(0.18).unwrap() - 0.104).abs() < 1e-3);
        assert!(cooperativity_from_extinction(1.0).is_err());
        assert!(cooperativity_from_extinction(-0.01).is_err());
        for k in 0..100 {
            let ext = k as f64 / 100.0 * 0.99;
            let back = extinction_on_resonance(cooperativity_from_extinction(ext).unwrap()).unwrap();
            assert!((back - ext).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_symmetry_and_minimum() {
        let wg = WaveguideCoupling::device();
        let grid: Vec<f64> = (-100..=100).map(|k| k as f64 * 1.5).collect();
        let s = transmission_spectrum(&wg, &grid).unwrap();
        for k in 0..grid.len() {
            assert!((s.values[k] - s.values[grid.len() - 1 - k]).abs() < 1e-12);
        }
        let c = cooperativity(&wg).unwrap();
        assert!((s.min() - (1.0 - extinction_on_resonance(c).unwrap())).abs() < 1e-12);
        assert!(transmission_spectrum(&wg, &[]).is_err());
    }

    #[test]
    fn dip_half_width_is_half_gamma() {
        let wg = WaveguideCoupling::device();
        let depth = 1.0 - transmission_amplitude(0.0, &wg).norm_sqr();
        let half = 1.0 - transmission_amplitude(0.5 * wg.total_mhz(), &wg).norm_sqr();
        assert!((half - 0.5 * depth).abs() < 1e-12);
    }

    #[test]
    fn thermal_population_lowers_inferred_cooperativity() {
        let c = 0.2;
        let ext = thermally_weighted_extinction(c, 0.19).unwrap();
        assert!(cooperativity_from_extinction(ext).unwrap() < c);
        assert_eq!(thermally_weighted_extinction(c, 0.0).unwrap(), extinction_on_resonance(c).unwrap());
    }
}
