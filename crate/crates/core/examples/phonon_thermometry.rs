//! Thermal populations of the split ground state, the high-temperature
//! linewidth law, and the phonon rate inferred from Rabi damping.

use wgqed::gev::{
    ground_state_populations, linewidth_vs_temperature, phonon_relaxation_estimate, rabi_decay_vs_temperature, PhononEnvironment,
    GROUND_SPLITTING_GHZ,
};

fn main() -> wgqed::Result<()> {
    for t in [2.0, 5.0, 10.0] {
        let (p1, p2) = ground_state_populations(GROUND_SPLITTING_GHZ, t)?;
        let rabi = rabi_decay_vs_temperature(0.88, 19.6, t)?;
        println!("{t:5.1} K  ground populations {p1:.3}/{p2:.3}  rabi decay {rabi:.2} MHz");
    }
    let env = PhononEnvironment::default();
    for t in [50.0, 150.0, 300.0] {
        println!("{t:5.1} K  linewidth {:.3} nm", linewidth_vs_temperature(&env, t)?);
    }
    println!("phonon relaxation {:.1} MHz", phonon_relaxation_estimate(24.0, 26.0)?);
    Ok(())
}
