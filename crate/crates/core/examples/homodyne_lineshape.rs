//! Reflected intensity with a local oscillator: the LO phase turns a
//! symmetric dip into a dispersive line.

use std::f64::consts::PI;

use wgqed::dynamics::TwoLevelParams;
use wgqed::homodyne::{odd_fraction, reflected_intensity_spectrum, LocalOscillator, OutputFieldModel, Regime};

fn main() -> wgqed::Result<()> {
    let emitter = TwoLevelParams { rabi_mhz: 3.41, detuning_mhz: 0.0, gamma0_mhz: 26.09, dephasing_mhz: 9.3, extra_decay_mhz: 0.0 };
    let scan: Vec<f64> = (-150..=150).map(f64::from).collect();
    for phase in [PI, 0.5 * PI] {
        let model = OutputFieldModel::two_level(LocalOscillator::new(0.02, phase)?, emitter, 2.105)?;
        let s = reflected_intensity_spectrum(&model, &scan, Regime::SteadyState)?;
        let total_odd = odd_fraction(&scan, &s.total, s.lo_flux)?;
        let interference_odd = odd_fraction(&scan, &s.interference, 0.0)?;
        println!("phase {phase:.3}: odd fraction total {total_odd:.3}, interference {interference_odd:.3}");
    }
    Ok(())
}
