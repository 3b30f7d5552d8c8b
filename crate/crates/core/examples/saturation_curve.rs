//! Stationary excited population against drive strength, fitted with the
//! saturation law `R∞·s/(1+s)`.

use wgqed::dynamics::{steady_state, TwoLevelParams, EXCITED};
use wgqed::fitting::{fit, model_saturation};

fn main() -> wgqed::Result<()> {
    let (gamma0, dephasing) = (26.09, 9.3);
    let s: Vec<f64> = (1..=40).map(|k| 0.25 * k as f64).collect();
    let mut rate = Vec::new();
    for &si in &s {
        let rabi = TwoLevelParams::rabi_for_saturation(si, gamma0, dephasing);
        let gen = TwoLevelParams { rabi_mhz: rabi, detuning_mhz: 0.0, gamma0_mhz: gamma0, dephasing_mhz: dephasing, extra_decay_mhz: 0.0 }.generator()?;
        rate.push(2.0 * steady_state(&gen)?.population(EXCITED));
    }
    let r = fit(&model_saturation(), &s, &rate, None, None)?;
    print!("{}", r.report());
    Ok(())
}
