//! Transmission dip of an emitter side-coupled to a waveguide, and the
//! cooperativity recovered from the extinction.

use wgqed::waveguide::{cooperativity, cooperativity_from_extinction, thermally_weighted_extinction, transmission_spectrum, WaveguideCoupling};

fn main() -> wgqed::Result<()> {
    let wg = WaveguideCoupling::device();
    let scan: Vec<f64> = (-100..=100).map(|k| 2.0 * k as f64).collect();
    let t = transmission_spectrum(&wg, &scan)?;
    let c = cooperativity(&wg)?;
    let extinction = 1.0 - t.min();
    println!("gamma_1d {:.3} MHz, gamma' {:.3} MHz, C = {c:.4}", wg.gamma_1d_mhz, wg.gamma_prime_mhz);
    println!("minimum transmission {:.4}, inferred C {:.4}", t.min(), cooperativity_from_extinction(extinction)?);
    for p_dark in [0.0, 0.1, 0.2] {
        println!("dark-state population {p_dark}: extinction {:.4}", thermally_weighted_extinction(c, p_dark)?);
    }
    Ok(())
}
