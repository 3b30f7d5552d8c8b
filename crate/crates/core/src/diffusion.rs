//! Spectral diffusion as an Ornstein–Uhlenbeck wander of the line center,
//! time-averaged lineshapes, and a probe-fit-recenter feedback loop.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{self, model_lorentzian};
use crate::observables::Spectrum;
use crate::photon_stats::poisson_count;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionModel {
    /// Stationary standard deviation of the center (MHz).
    pub rms_amplitude_mhz: f64,
    pub correlation_time_ns: f64,
    pub seed: u64,
}

impl DiffusionModel {
    pub fn new(rms_amplitude_mhz: f64, correlation_time_ns: f64, seed: u64) -> Result<Self> {
        let m = DiffusionModel { rms_amplitude_mhz, correlation_time_ns, seed };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rms_amplitude_mhz >= 0.0) || !self.rms_amplitude_mhz.is_finite() {
            return Err(Error::param("rms_amplitude_mhz", "must be finite and non-negative"));
        }
        if !(self.correlation_time_ns > 0.0) || !self.correlation_time_ns.is_finite() {
            return Err(Error::param("correlation_time_ns", "must be positive"));
        }
        Ok(())
    }
}

/// Exact OU sample path at `times`, started from the stationary
/// distribution. Stream 0 of the model seed drives the path.
pub fn frequency_trace(model: &DiffusionModel, times: &[f64]) -> Result<Vec<f64>> {
    model.validate()?;
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("times", "must be strictly increasing"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(model.seed);
    Ok(ou_path(model, times, &mut rng))
}

fn ou_path(model: &DiffusionModel, times: &[f64], rng: &mut ChaCha20Rng) -> Vec<f64> {
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let sigma = model.rms_amplitude_mhz;
    if sigma == 0.0 {
        return vec![0.0; times.len()];
    }
    let mut out = Vec::with_capacity(times.len());
    let mut x = sigma * normal();
    let mut last = times.first().copied().unwrap_or(0.0);
    for &t in times {
        let decay = (-(t - last) / model.correlation_time_ns).exp();
        x = x * decay + sigma * (1.0 - decay * decay).sqrt() * normal();
        out.push(x);
        last = t;
    }
    out
}

fn lorentzian_peak(x: f64, center: f64, fwhm: f64) -> f64 {
    let hw = 0.5 * fwhm;
    hw * hw / ((x - center).powi(2) + hw * hw)
}

/// How the sampled centers enter [`averaged_lineshape`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum AveragingMode {
    /// Plain time average.
    Raw,
    /// Each window of `window_ns` is re-referenced to its own mean center,
    /// as a drift-corrected acquisition would be.
    Recentered { window_ns: f64 },
}

/// Number of center samples used by [`averaged_lineshape`].
pub const LINESHAPE_SAMPLES: usize = 20_000;

/// Time average of a unit-peak Lorentzian of `homogeneous_fwhm_mhz` whose
/// center follows the OU trace over `averaging_time_ns`.
pub fn averaged_lineshape(
    homogeneous_fwhm_mhz: f64,
    model: &DiffusionModel,
    scan_mhz: &[f64],
    averaging_time_ns: f64,
    mode: AveragingMode,
) -> Result<Spectrum> {
    if !(homogeneous_fwhm_mhz > 0.0) {
        return Err(Error::param("homogeneous_fwhm_mhz", "must be positive"));
    }
    if !(averaging_time_ns > 0.0) {
        return Err(Error::param("averaging_time_ns", "must be positive"));
    }
    if scan_mhz.is_empty() {
        return Err(Error::param("scan", "must be non-empty"));
    }
    let n = LINESHAPE_SAMPLES;
    let dt = averaging_time_ns / n as f64;
    let times: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * dt).collect();
    let mut centers = frequency_trace(model, &times)?;
    if let AveragingMode::Recentered { window_ns } = mode {
        if !(window_ns > 0.0) {
            return Err(Error::param("window_ns", "must be positive"));
        }
        let per = ((window_ns / dt).round() as usize).clamp(1, n);
        for chunk in centers.chunks_mut(per) {
            let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
            chunk.iter_mut().for_each(|c| *c -= mean);
        }
    }
    let values = scan_mhz
        .iter()
        .map(|&x| centers.iter().map(|&c| lorentzian_peak(x, c, homogeneous_fwhm_mhz)).sum::<f64>() / n as f64)
        .collect();
    Ok(Spectrum::new(scan_mhz.to_vec(), values, "averaged_intensity"))
}

/// Lorentzian of `homogeneous_fwhm_mhz` convolved with a Gaussian of
/// standard deviation `sigma_mhz`, by midpoint
/// quadrature over ±8σ. The deterministic limit of [`averaged_lineshape`].
pub fn voigt_lineshape(homogeneous_fwhm_mhz: f64, sigma_mhz: f64, scan_mhz: &[f64]) -> Vec<f64> {
    if sigma_mhz == 0.0 {
        return scan_mhz.iter().map(|&x| lorentzian_peak(x, 0.0, homogeneous_fwhm_mhz)).collect();
    }
    let m = 2001;
    let span = 16.0 * sigma_mhz;
    let h = span / m as f64;
    let nodes: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let c = -0.5 * span + (k as f64 + 0.5) * h;
            (c, (-0.5 * (c / sigma_mhz).powi(2)).exp())
        })
        .collect();
    let wsum: f64 = nodes.iter().map(|n| n.1).sum();
    scan_mhz
        .iter()
        .map(|&x| nodes.iter().map(|&(c, w)| w * lorentzian_peak(x, c, homogeneous_fwhm_mhz)).sum::<f64>() / wsum)
        .collect()
}

/// FWHM of a Lorentzian fitted to a lineshape.
pub fn fitted_fwhm(scan_mhz: &[f64], values: &[f64]) -> Result<f64> {
    let r = fitting::fit(&model_lorentzian(), scan_mhz, values, None, None)?;
    Ok(r.get("fwhm").unwrap_or(f64::NAN))
}

/// Gaussian wander rms for which a Lorentzian fit of the broadened line
/// returns `target_fwhm_mhz`, solved on the deterministic Voigt profile.
pub fn diffusion_rms_for_fitted_width(homogeneous_fwhm_mhz: f64, target_fwhm_mhz: f64) -> Result<f64> {
    if !(target_fwhm_mhz > homogeneous_fwhm_mhz) {
        return Err(Error::param("target_fwhm_mhz", "must exceed the homogeneous width"));
    }
    let width_at = |sigma: f64| -> Result<f64> {
        let half = 6.0 * target_fwhm_mhz;
        let scan: Vec<f64> = (0..401).map(|k| -half + 2.0 * half * k as f64 / 400.0).collect();
        fitted_fwhm(&scan, &voigt_lineshape(homogeneous_fwhm_mhz, sigma, &scan))
    };
    let (mut lo, mut hi) = (0.0, target_fwhm_mhz);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if width_at(mid)? < target_fwhm_mhz {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackProtocol {
    /// Full width of the probe scan around the current laser setting (MHz).
    pub probe_scan_width_mhz: f64,
    pub probe_duration_ns: f64,
    pub measure_duration_ns: f64,
    /// Laser is reset only when the fitted center is further than this.
    pub recenter_threshold_mhz: f64,
    pub scan_points: usize,
    /// Linewidth seen by the probe (MHz).
    pub probe_linewidth_mhz: f64,
    /// Expected counts per scan point on resonance.
    pub peak_counts: f64,
}

/// Samples of the residual detuning recorded per measure window.
pub const SAMPLES_PER_WINDOW: usize = 8;
/// Largest scan widening after repeated lock loss.
pub const MAX_SCAN_WIDENING: f64 = 10.0;

impl FeedbackProtocol {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("probe_scan_width_mhz", self.probe_scan_width_mhz),
            ("probe_duration_ns", self.probe_duration_ns),
            ("measure_duration_ns", self.measure_duration_ns),
            ("recenter_threshold_mhz", self.recenter_threshold_mhz),
            ("probe_linewidth_mhz", self.probe_linewidth_mhz),
            ("peak_counts", self.peak_counts),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if self.scan_points < 6 {
            return Err(Error::param("scan_points", "need at least 6 points to fit a Lorentzian"));
        }
        Ok(())
    }

    pub fn cycle_ns(&self) -> f64 {
        self.probe_duration_ns + self.measure_duration_ns
    }

    pub fn nominal_duty_cycle(&self) -> f64 {
        self.measure_duration_ns / self.cycle_ns()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackResult {
    /// Times of the residual samples (ns).
    pub times: Vec<f64>,
    /// Emitter center minus laser setting during measure windows (MHz).
    pub locked_trace: Vec<f64>,
    /// Emitter center at the same times, i.e. the free-running detuning.
    pub free_trace: Vec<f64>,
    pub duty_cycle: f64,
    pub residual_rms: f64,
    pub free_running_rms: f64,
    pub lock_lost_events: usize,
    pub recenters: usize,
}

fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
    }
}

/// Probe-fit-recenter loop. Each cycle scans the laser across
/// `probe_scan_width` (times the current widening) with Poisson counts from
/// the instantaneous line, fits a Lorentzian, and moves the laser to the
/// fitted center when it is off by more than the threshold. A scan without a
/// credible peak counts as a lock loss and doubles the next scan width up
/// to [`MAX_SCAN_WIDENING`]. The emitter center is sampled on the same OU
/// path as [`frequency_trace`] of `model`.
pub fn run_feedback(protocol: &FeedbackProtocol, model: &DiffusionModel, total_time_ns: f64) -> Result<FeedbackResult> {
    protocol.validate()?;
    model.validate()?;
    if !(total_time_ns > 0.0) {
        return Err(Error::param("total_time_ns", "must be positive"));
    }

    // every time the emitter center is needed, in order
    let mut sample_times = Vec::new();
    let mut cycle_start = 0.0;
    let point_dt = protocol.probe_duration_ns / protocol.scan_points as f64;
    let mut probe_time = 0.0;
    let mut measure_time = 0.0;
    let mut cycles = Vec::new();
    while cycle_start < total_time_ns {
        let probe_end = (cycle_start + protocol.probe_duration_ns).min(total_time_ns);
        let measure_end = (cycle_start + protocol.cycle_ns()).min(total_time_ns);
        probe_time += probe_end - cycle_start;
        measure_time += measure_end - probe_end;
        let probe_samples: Vec<f64> = (0..protocol.scan_points)
            .map(|i| cycle_start + (i as f64 + 0.5) * point_dt)
            .filter(|&t| t < probe_end)
            .collect();
        let window = measure_end - probe_end;
        let measure_samples: Vec<f64> = if window > 0.0 {
            (0..SAMPLES_PER_WINDOW).map(|i| probe_end + (i as f64 + 0.5) * window / SAMPLES_PER_WINDOW as f64).collect()
        } else {
            Vec::new()
        };
        sample_times.extend(&probe_samples);
        sample_times.extend(&measure_samples);
        cycles.push((probe_samples.len(), measure_samples));
        cycle_start += protocol.cycle_ns();
    }
    let centers = frequency_trace(model, &sample_times)?;

    // stream 1 of the seed is reserved for photon counting
    let mut rng = ChaCha20Rng::seed_from_u64(model.seed);
    rng.set_stream(1);
    let lorentz = model_lorentzian();
    let mut laser = 0.0;
    let mut widening: f64 = 1.0;
    let mut lock_lost_events = 0;
    let mut recenters = 0;
    let mut times = Vec::new();
    let mut locked = Vec::new();
    let mut free = Vec::new();
    let mut idx = 0;
    for (n_probe, measure_samples) in cycles {
        if n_probe == protocol.scan_points {
            let width = protocol.probe_scan_width_mhz * widening;
            let xs: Vec<f64> = (0..n_probe)
                .map(|i| laser - 0.5 * width + width * i as f64 / (n_probe - 1) as f64)
                .collect();
            let counts: Vec<f64> = xs
                .iter()
                .zip(&centers[idx..idx + n_probe])
                .map(|(&x, &c)| poisson_count(protocol.peak_counts * lorentzian_peak(x, c, protocol.probe_linewidth_mhz), &mut rng))
                .collect();
            match locate_peak(&lorentz, &xs, &counts, protocol) {
                Some(center) => {
                    widening = 1.0;
                    if (center - laser).abs() > protocol.recenter_threshold_mhz {
                        laser = center;
                        recenters += 1;
                    }
                }
                None => {
                    lock_lost_events += 1;
                    widening = (2.0 * widening).min(MAX_SCAN_WIDENING);
                }
            }
        }
        idx += n_probe;
        for &t in &measure_samples {
            times.push(t);
            free.push(centers[idx]);
            locked.push(centers[idx] - laser);
            idx += 1;
        }
    }

    let total = probe_time + measure_time;
    Ok(FeedbackResult {
        residual_rms: rms(&locked),
        free_running_rms: rms(&free),
        times,
        locked_trace: locked,
        free_trace: free,
        duty_cycle: measure_time / total,
        lock_lost_events,
        recenters,
    })
}

/// Fitted center if the scan shows a credible peak inside its range.
fn locate_peak(model: &fitting::FitModel, xs: &[f64], counts: &[f64], protocol: &FeedbackProtocol) -> Option<f64> {
    let total: f64 = counts.iter().sum();
    let max = counts.iter().cloned().fold(0.0, f64::max);
    // a peak needs a handful of counts above shot noise
    if max < 5.0 || max < 3.0 * (total / counts.len() as f64).sqrt() + total / counts.len() as f64 {
        return None;
    }
    let sigma: Vec<f64> = counts.iter().map(|c| c.max(1.0).sqrt()).collect();
    let r = fitting::fit(model, xs, counts, Some(&sigma), None).ok()?;
    let (amp, center) = (r.get("amplitude")?, r.get("center")?);
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    (amp > 0.25 * protocol.peak_counts && center > lo && center < hi).then_some(center)
}
