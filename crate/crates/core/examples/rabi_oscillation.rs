//! Driven emitter starting in the ground state; the damped-Rabi fit recovers
//! the drive frequency and the envelope decay.

use wgqed::dynamics::{evolve, DensityOperator, TwoLevelParams, EXCITED};
use wgqed::fitting::{fit, model_damped_rabi};

fn main() -> wgqed::Result<()> {
    let emitter = TwoLevelParams { rabi_mhz: 100.0, detuning_mhz: 0.0, gamma0_mhz: 26.09, dephasing_mhz: 9.3, extra_decay_mhz: 0.0 };
    let times: Vec<f64> = (0..801).map(|k| k as f64 * 0.05).collect();
    let traj = evolve(&emitter.generator()?, &DensityOperator::basis(2, 0), &times)?;
    let pe = traj.population(EXCITED);

    let r = fit(&model_damped_rabi(), &times, &pe, None, None)?;
    print!("{}", r.report());
    let decay = r.get("decay").unwrap();
    println!("rabi frequency {:.2} MHz, envelope decay {:.2} MHz ({:.2} ns)", r.get("frequency").unwrap() * 1e3, decay * 1e3 / (2.0 * std::f64::consts::PI), 1.0 / decay);
    Ok(())
}
