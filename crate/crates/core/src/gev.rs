//! Germanium-vacancy level structure and its temperature-dependent rate
//! models: Bose–Einstein phonon occupation, orbital relaxation with detailed
//! balance, the cubic high-temperature broadening law, the linear low
//! temperature Rabi-decay law, and the phonon-relaxation estimate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{ghz_to_mev, thermal_energy_mev, wavelength_nm_to_ghz, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// An optical transition between a ground level (1 or 2) and an excited level
/// (3 or 4). Level indices are zero-based in code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub lower: usize,
    pub upper: usize,
    /// Radiative rate, 1/ns.
    pub radiative_rate: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterModel {
    /// Level frequencies in GHz relative to level 1. Excited levels include
    /// the optical offset `c / zpl_wavelength_nm` of transition 1-3.
    pub level_energies_ghz: [f64; 4],
    pub zpl_wavelength_nm: f64,
    pub transitions: Vec<Transition>,
    /// Zero-phonon-line fraction of the total emission.
    pub zpl_branching: f64,
}

/// Measured GeV orbital splittings (GHz).
pub const GROUND_SPLITTING_GHZ: f64 = 152.0;
pub const EXCITED_SPLITTING_GHZ: f64 = 981.0;
pub const ZPL_WAVELENGTH_NM: f64 = 602.0;
pub const ZPL_BRANCHING: f64 = 0.60;
/// Excited-state lifetime at 5 K (ns).
pub const LIFETIME_NS: f64 = 6.1;
/// Lifetimes in waveguides and bulk diamond (ns).
pub const WAVEGUIDE_LIFETIME_NS: f64 = 6.6;
pub const BULK_LIFETIME_NS: f64 = 6.0;
/// Energy of the local vibrational modes (meV).
pub const LOCAL_MODE_ENERGY_MEV: f64 = 60.0;
/// Validity bound of the cubic broadening law (K).
pub const CUBIC_MODEL_MIN_TEMPERATURE_K: f64 = 50.0;
/// Validity bound of the linear Rabi-decay law (K).
pub const RABI_LINEAR_MAX_TEMPERATURE_K: f64 = 10.0;

impl EmitterModel {
    pub fn new(
        level_energies_ghz: [f64; 4],
        zpl_wavelength_nm: f64,
        transitions: Vec<Transition>,
        zpl_branching: f64,
    ) -> Result<Self> {
        let m = EmitterModel { level_energies_ghz, zpl_wavelength_nm, transitions, zpl_branching };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.level_energies_ghz[0] != 0.0 {
            return Err(Error::param("level_energies_ghz", "level 1 is the zero reference"));
        }
        if self.level_energies_ghz.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("level_energies_ghz", "levels must be strictly ordered by energy"));
        }
        if !(0.0..=1.0).contains(&self.zpl_branching) {
            return Err(Error::param("zpl_branching", "must lie in [0, 1]"));
        }
        if !(self.zpl_wavelength_nm > 0.0) {
            return Err(Error::param("zpl_wavelength_nm", "must be positive"));
        }
        for t in &self.transitions {
            if !(t.radiative_rate >= 0.0) {
                return Err(Error::param("transitions.radiative_rate", format!("negative rate on {}", t.label)));
            }
            if t.lower > 1 || !(2..=3).contains(&t.upper) {
                return Err(Error::param("transitions", format!("{} must join a ground and an excited level", t.label)));
            }
        }
        Ok(())
    }

    pub fn ground_splitting_ghz(&self) -> f64 {
        self.level_energies_ghz[1] - self.level_energies_ghz[0]
    }

    pub fn excited_splitting_ghz(&self) -> f64 {
        self.level_energies_ghz[3] - self.level_energies_ghz[2]
    }

    pub fn transition_frequency_ghz(&self, t: &Transition) -> f64 {
        self.level_energies_ghz[t.upper] - self.level_energies_ghz[t.lower]
    }

    /// Transition frequencies relative to transition 1-3 (GHz), in the
    /// order stored.
    pub fn transition_offsets_ghz(&self) -> Vec<f64> {
        let reference = self.level_energies_ghz[2];
        self.transitions.iter().map(|t| self.transition_frequency_ghz(t) - reference).collect()
    }

    /// Total radiative decay rate out of excited level `upper` (1/ns).
    pub fn total_decay_rate(&self, upper: usize) -> f64 {
        self.transitions.iter().filter(|t| t.upper == upper).map(|t| t.radiative_rate).sum()
    }
}

/// The GeV four-level system with equal branching from each excited level
/// into both ground levels (the true branching ratios are unknown).
pub fn gev_default() -> EmitterModel {
    let optical = wavelength_nm_to_ghz(ZPL_WAVELENGTH_NM);
    let rate = 1.0 / LIFETIME_NS;
    let transitions = [(0, 2, "1-3"), (0, 3, "1-4"), (1, 2, "2-3"), (1, 3, "2-4")]
        .into_iter()
        .map(|(lower, upper, label)| Transition { lower, upper, radiative_rate: 0.5 * rate, label: label.into() })
        .collect();
    EmitterModel {
        level_energies_ghz: [0.0, GROUND_SPLITTING_GHZ, optical, optical + EXCITED_SPLITTING_GHZ],
        zpl_wavelength_nm: ZPL_WAVELENGTH_NM,
        transitions,
        zpl_branching: ZPL_BRANCHING,
    }
}

/// Phonon bath parameters. Cubic-law constants are in nm (of optical
/// linewidth) and K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhononEnvironment {
    pub temperature_k: f64,
    pub cubic_a_nm: f64,
    pub cubic_b_nm_per_k3: f64,
    pub cubic_t0_k: f64,
    pub single_phonon_coefficient_mhz_per_k: f64,
    pub local_mode_energy_mev: f64,
}

impl Default for PhononEnvironment {
    fn default() -> Self {
        PhononEnvironment {
            temperature_k: 5.0,
            cubic_a_nm: 0.0,
            cubic_b_nm_per_k3: 1.9e-7,
            cubic_t0_k: -13.0,
            single_phonon_coefficient_mhz_per_k: RabiDecayModel::default().slope_mhz_per_k,
            local_mode_energy_mev: LOCAL_MODE_ENERGY_MEV,
        }
    }
}

impl PhononEnvironment {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature_k > 0.0) {
            return Err(Error::param("temperature_k", "must be positive"));
        }
        if !(self.local_mode_energy_mev > 0.0) {
            return Err(Error::param("local_mode_energy_mev", "must be positive"));
        }
        Ok(())
    }

    /// Occupation of the local vibrational mode at this temperature.
    pub fn local_mode_occupation(&self) -> Result<f64> {
        thermal_occupation(self.local_mode_energy_mev, self.temperature_k)
    }
}

/// Bose–Einstein occupation `1/(e^{E/kT} − 1)`; zero at `T = 0`.
pub fn thermal_occupation(mode_energy_mev: f64, temperature_k: f64) -> Result<f64> {
    if !(mode_energy_mev > 0.0) {
        return Err(Error::param("mode_energy", format!("must be positive, got {mode_energy_mev}")));
    }
    if !(temperature_k >= 0.0) {
        return Err(Error::param("temperature", format!("must be non-negative, got {temperature_k}")));
    }
    if temperature_k == 0.0 {
        return Ok(0.0);
    }
    let x = mode_energy_mev / thermal_energy_mev(temperature_k);
    Ok(1.0 / x.exp_m1())
}

/// Single-phonon absorption (upward) and emission (downward) rates across an
/// orbital splitting: `base·n̄` and `base·(n̄ + 1)`.
pub fn orbital_phonon_rates(splitting_ghz: f64, temperature_k: f64, base_rate: f64) -> Result<(f64, f64)> {
    if !(splitting_ghz > 0.0) {
        return Err(Error::param("splitting", format!("must be positive, got {splitting_ghz}")));
    }
    if !(base_rate >= 0.0) {
        return Err(Error::param("base_rate", "must be non-negative"));
    }
    let n = thermal_occupation(ghz_to_mev(splitting_ghz), temperature_k)?;
    Ok((base_rate * n, base_rate * (n + 1.0)))
}

/// Boltzmann populations `(p₁, p₂)` of a two-level ground doublet.
pub fn ground_state_populations(splitting_ghz: f64, temperature_k: f64) -> Result<(f64, f64)> {
    let (up, down) = orbital_phonon_rates(splitting_ghz, temperature_k, 1.0)?;
    let p2 = up / (up + down);
    Ok((1.0 - p2, p2))
}

/// Cubic phonon broadening `a + b (T − T₀)³` in nm, valid above 50 K.
pub fn linewidth_vs_temperature(env: &PhononEnvironment, temperature_k: f64) -> Result<f64> {
    if !(temperature_k >= CUBIC_MODEL_MIN_TEMPERATURE_K) {
        return Err(Error::OutOfModelRange { temperature: temperature_k, min: CUBIC_MODEL_MIN_TEMPERATURE_K });
    }
    Ok(linewidth_vs_temperature_extrapolated(env, temperature_k))
}

/// The cubic law evaluated without the validity check.
pub fn linewidth_vs_temperature_extrapolated(env: &PhononEnvironment, temperature_k: f64) -> f64 {
    env.cubic_a_nm + env.cubic_b_nm_per_k3 * (temperature_k - env.cubic_t0_k).powi(3)
}

/// Wavelength linewidth to frequency linewidth, `Δν = c Δλ / λ²` (MHz).
pub fn linewidth_nm_to_mhz(delta_lambda_nm: f64, center_wavelength_nm: f64) -> f64 {
    SPEED_OF_LIGHT * delta_lambda_nm * 1e-9 / (center_wavelength_nm * 1e-9).powi(2) * 1e-6
}

pub fn linewidth_mhz_to_nm(delta_nu_mhz: f64, center_wavelength_nm: f64) -> f64 {
    delta_nu_mhz * 1e6 * (center_wavelength_nm * 1e-9).powi(2) / SPEED_OF_LIGHT * 1e9
}

/// `1/(2πτ)` in MHz for a lifetime in ns.
pub fn lifetime_limited_linewidth(lifetime_ns: f64) -> Result<f64> {
    if !(lifetime_ns > 0.0) {
        return Err(Error::param("lifetime", "must be positive"));
    }
    Ok(1e3 / (2.0 * PI * lifetime_ns))
}

/// Linear low-temperature law for the Rabi-oscillation decay rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiDecayModel {
    pub slope_mhz_per_k: f64,
    pub intercept_mhz: f64,
}

impl Default for RabiDecayModel {
    /// Passes through 24 MHz at 5 K and tends to `(3/4)γ₀` as `T → 0`.
    fn default() -> Self {
        RabiDecayModel { slope_mhz_per_k: 0.88, intercept_mhz: 19.6 }
    }
}

impl RabiDecayModel {
    pub fn rate(&self, temperature_k: f64) -> Result<f64> {
        rabi_decay_vs_temperature(self.slope_mhz_per_k, self.intercept_mhz, temperature_k)
    }

    /// Slope for which the line passes through `(T, rate)` with the given intercept.
    pub fn through(temperature_k: f64, rate_mhz: f64, intercept_mhz: f64) -> Self {
        RabiDecayModel { slope_mhz_per_k: (rate_mhz - intercept_mhz) / temperature_k, intercept_mhz }
    }
}

/// `γ_Rabi(T) = intercept + slope·T` (MHz). Logs a warning outside the
/// measured range `T < 10 K`.
pub fn rabi_decay_vs_temperature(slope_mhz_per_k: f64, intercept_mhz: f64, temperature_k: f64) -> Result<f64> {
    if !(temperature_k > 0.0) {
        return Err(Error::param("temperature", "must be positive"));
    }
    if temperature_k > RABI_LINEAR_MAX_TEMPERATURE_K {
        log::warn!("linear Rabi-decay law extrapolated to {temperature_k} K (measured below 10 K)");
    }
    Ok(intercept_mhz + slope_mhz_per_k * temperature_k)
}

/// Phonon relaxation rate `γ_p = 2γ_Rabi − (3/2)γ₀` (MHz).
pub fn phonon_relaxation_estimate(gamma_rabi_mhz: f64, gamma_0_mhz: f64) -> Result<f64> {
    let gp = 2.0 * gamma_rabi_mhz - 1.5 * gamma_0_mhz;
    if gp < 0.0 {
        return Err(Error::ModelInconsistency(format!(
            "γ_Rabi = {gamma_rabi_mhz} MHz is below (3/4)γ₀ for γ₀ = {gamma_0_mhz} MHz (γ_p = {gp})"
        )));
    }
    Ok(gp)
}

/// Inverse of [`phonon_relaxation_estimate`]: the Rabi envelope decay rate
/// `(3/4)γ₀ + γ_p/2` (MHz).
pub fn rabi_decay_from_rates(gamma_0_mhz: f64, gamma_p_mhz: f64) -> f64 {
    0.75 * gamma_0_mhz + 0.5 * gamma_p_mhz
}
