//! Detection-chain bookkeeping and the waveguide coupling implied by a
//! measured count rate.

use wgqed::io::{detected_rate, max_photon_flux, solve_waveguide_beta, PhotonBudget};

fn main() -> wgqed::Result<()> {
    let lifetime = 6.1;
    let beta = solve_waveguide_beta(0.79, lifetime, 0.6, 0.5, 0.15)?;
    println!("max flux {:.1} Mcps, required beta {beta:.3}", max_photon_flux(lifetime)?);
    let budget = PhotonBudget { lifetime_ns: lifetime, zpl_branching: 0.6, waveguide_beta: beta, fiber_coupling: 0.5, filter_and_detector: 0.15 };
    println!("detected at 80 Mcps excitation: {:.3} Mcps", detected_rate(&budget, 80.0)?);
    match detected_rate(&budget, 400.0) {
        Err(e) => println!("400 Mcps: {e}"),
        Ok(r) => println!("400 Mcps: {r}"),
    }
    Ok(())
}
