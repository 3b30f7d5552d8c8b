//! Physical constants (exact SI values) and the unit conversions built on them.
//!
//! User-facing rates are ordinary frequencies in MHz; the dynamics work in
//! angular units of rad/ns. [`mhz_to_angular`] is the single crossing point.

use std::f64::consts::PI;

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Elementary charge, C (J per eV).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Ordinary frequency in MHz to angular frequency in rad/ns.
#[inline]
pub fn mhz_to_angular(nu_mhz: f64) -> f64 {
    2.0 * PI * nu_mhz * 1e-3
}

/// Angular frequency in rad/ns to ordinary frequency in MHz.
#[inline]
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega * 1e3 / (2.0 * PI)
}

/// Photon energy in meV for a frequency in GHz.
pub fn ghz_to_mev(nu_ghz: f64) -> f64 {
    PLANCK * nu_ghz * 1e9 / ELEMENTARY_CHARGE * 1e3
}

/// Frequency in GHz for a photon energy in meV.
pub fn mev_to_ghz(energy_mev: f64) -> f64 {
    energy_mev * 1e-3 * ELEMENTARY_CHARGE / PLANCK * 1e-9
}

/// Optical frequency in GHz of light with the given vacuum wavelength in nm.
pub fn wavelength_nm_to_ghz(lambda_nm: f64) -> f64 {
    SPEED_OF_LIGHT / (lambda_nm * 1e-9) * 1e-9
}

/// Thermal energy k_B T in meV.
pub fn thermal_energy_mev(temperature_k: f64) -> f64 {
    BOLTZMANN * temperature_k / ELEMENTARY_CHARGE * 1e3
}
