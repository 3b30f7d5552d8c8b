//! Four-line fine structure fit; the ground and excited splittings follow
//! from the fitted centers.

use wgqed::fitting::{fit, four_lorentzian_centers, model_four_lorentzian};
use wgqed::gev::gev_default;

fn main() -> wgqed::Result<()> {
    let offsets = gev_default().transition_offsets_ghz();
    let heights = [1.0, 1.0, 0.3, 0.3];
    let x: Vec<f64> = (0..851).map(|k| -400.0 + 2.0 * k as f64).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&f| offsets.iter().zip(heights).map(|(&c, h)| h * 400.0 / ((f - c).powi(2) + 400.0)).sum())
        .collect();
    let r = fit(&model_four_lorentzian(), &x, &y, None, None)?;
    let c = four_lorentzian_centers(&r.parameters);
    println!("centers {c:?} GHz");
    println!("ground splitting {:.2} GHz, excited splitting {:.2} GHz", c[1] - c[0], c[3] - c[1]);
    Ok(())
}
