//! Slow spectral wander of the emitter line, the broadened average line,
//! and a probe-and-recenter loop that tracks it.

use wgqed::diffusion::{averaged_lineshape, fitted_fwhm, run_feedback, AveragingMode, DiffusionModel, FeedbackProtocol};

fn main() -> wgqed::Result<()> {
    let model = DiffusionModel::new(22.0, 1.0e9, 5)?;
    let scan: Vec<f64> = (-300..=300).map(f64::from).collect();
    let raw = averaged_lineshape(35.0, &model, &scan, 1.0e11, AveragingMode::Raw)?;
    let locked = averaged_lineshape(35.0, &model, &scan, 1.0e11, AveragingMode::Recentered { window_ns: 1.0e7 })?;
    println!("averaged FWHM {:.1} MHz, recentered {:.1} MHz", fitted_fwhm(&scan, &raw.values)?, fitted_fwhm(&scan, &locked.values)?);

    let protocol = FeedbackProtocol {
        probe_scan_width_mhz: 400.0,
        probe_duration_ns: 1.0e6,
        measure_duration_ns: 9.0e6,
        recenter_threshold_mhz: 10.0,
        scan_points: 41,
        probe_linewidth_mhz: 60.0,
        peak_counts: 400.0,
    };
    let res = run_feedback(&protocol, &DiffusionModel::new(30.0, 1.0e9, 11)?, 2.0e9)?;
    println!(
        "duty cycle {:.3}, residual rms {:.2} MHz, free-running rms {:.2} MHz, {} recenters, {} lock losses",
        res.duty_cycle, res.residual_rms, res.free_running_rms, res.recenters, res.lock_lost_events
    );
    Ok(())
}
