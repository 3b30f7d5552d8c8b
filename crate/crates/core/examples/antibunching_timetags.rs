//! Quantum-jump time tags on two detectors behind a beamsplitter, with the
//! coincidence histogram compared to the regression-theorem curve.

use wgqed::dynamics::{normalized_g2, sigma_minus, steady_state, TwoLevelParams};
use wgqed::photon_stats::{g2_from_timetags, simulate_timetags_with, MonteCarloOptions};

fn main() -> wgqed::Result<()> {
    let emitter = TwoLevelParams { rabi_mhz: 13.0, detuning_mhz: 0.0, gamma0_mhz: 26.0, dephasing_mhz: 0.0, extra_decay_mhz: 0.0 };
    let gen = emitter.generator()?;
    let jump = gen.jump_operator(0);
    let opts = MonteCarloOptions { segments: 8, ..MonteCarloOptions::default() };
    let streams = simulate_timetags_with(&gen, &[(jump.clone(), 0.5), (jump, 0.5)], 5.0e6, 42, &opts)?;
    println!("tags: {} and {}", streams[0].len(), streams[1].len());

    let g2 = g2_from_timetags(&streams[0], &streams[1], 2.0, 30.0)?;
    let taus: Vec<f64> = g2.taus.iter().map(|t| t.abs()).collect();
    let mut sorted = taus.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let theory = normalized_g2(&gen, &steady_state(&gen)?, &sigma_minus(), &sorted)?;
    for (k, t) in g2.taus.iter().enumerate() {
        let th = theory[sorted.partition_point(|u| *u < taus[k])];
        println!("{t:6.1} ns  measured {:.3}  point QRT {th:.3}", g2.g2[k]);
    }
    Ok(())
}
