//! Tunes the LO amplitude until the output field shows a target bunching
//! and reports the recovery time of `g²(τ)`.

use std::f64::consts::PI;

use wgqed::dynamics::TwoLevelParams;
use wgqed::homodyne::{fit_lo_amplitude, LocalOscillator, OutputFieldModel};
use wgqed::waveguide::WaveguideCoupling;

fn main() -> wgqed::Result<()> {
    let emitter = TwoLevelParams { rabi_mhz: 3.41, detuning_mhz: 0.0, gamma0_mhz: 26.09, dephasing_mhz: 9.3, extra_decay_mhz: 0.0 };
    let coupling = 0.5 * WaveguideCoupling::device().gamma_1d_mhz;
    let model = OutputFieldModel::two_level(LocalOscillator::new(0.0, PI)?, emitter, coupling)?;
    let taus: Vec<f64> = (0..=240).map(|k| 0.25 * k as f64).collect();
    let fit = fit_lo_amplitude(&model, 1.09, &taus)?;
    println!("LO flux {:.6} /ns, g2(0) {:.4}", fit.lo_flux_per_ns, fit.g2_zero);
    println!("recovery time {:.3} ± {:.3} ns", fit.recovery_time_ns, fit.recovery_time_uncertainty_ns);
    Ok(())
}
