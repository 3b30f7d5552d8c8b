//! The fit forms used across the toolkit, each with a data-driven initial
//! guess. Lorentzian-type models are parameterized by full width at half
//! maximum.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

use super::lm::{FitModel, Parameter};

fn lorentz(x: f64, center: f64, fwhm: f64) -> f64 {
    let hw = 0.5 * fwhm;
    if hw == 0.0 {
        return 0.0;
    }
    hw * hw / ((x - center).powi(2) + hw * hw)
}

/// Dispersive partner of [`lorentz`]: `hw (x − c) / ((x − c)² + hw²)`.
fn dispersive(x: f64, center: f64, fwhm: f64) -> f64 {
    let hw = 0.5 * fwhm;
    if hw == 0.0 {
        return 0.0;
    }
    hw * (x - center) / ((x - center).powi(2) + hw * hw)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    if s.is_empty() {
        0.0
    } else {
        s[s.len() / 2]
    }
}

/// Peak (or dip) position, height above baseline, width and baseline.
fn peak_guess(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let base = median(y);
    let (imax, _) = y.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
    let (imin, _) = y.iter().enumerate().fold((0, f64::INFINITY), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
    let k = if (y[imax] - base).abs() >= (y[imin] - base).abs() { imax } else { imin };
    let height = y[k] - base;
    let half = base + 0.5 * height;
    let above = |v: f64| if height >= 0.0 { v >= half } else { v <= half };
    let mut lo = k;
    while lo > 0 && above(y[lo - 1]) {
        lo -= 1;
    }
    let mut hi = k;
    while hi + 1 < y.len() && above(y[hi + 1]) {
        hi += 1;
    }
    let span = (x[x.len() - 1] - x[0]).abs();
    let mut width = (x[hi] - x[lo]).abs();
    if width == 0.0 {
        width = span / x.len() as f64 * 2.0;
    }
    (x[k], height, width, base)
}

/// `A·(Γ/2)² / ((x − c)² + (Γ/2)²) + offset`.
pub fn model_lorentzian() -> FitModel {
    FitModel::new(
        "lorentzian",
        vec![
            Parameter::free("amplitude"),
            Parameter::free("center"),
            Parameter::non_negative("fwhm"),
            Parameter::free("offset"),
        ],
        |p, x| p[0] * lorentz(x, p[1], p[2]) + p[3],
    )
    .with_jacobian(|p, x, out| {
        let (a, c, w) = (p[0], p[1], p[2]);
        let hw = 0.5 * w;
        let d = x - c;
        let den = d * d + hw * hw;
        out[0] = hw * hw / den;
        out[1] = a * hw * hw * 2.0 * d / (den * den);
        out[2] = a * hw * d * d / (den * den);
        out[3] = 1.0;
    })
    .with_guess(|x, y| {
        let (c, h, w, b) = peak_guess(x, y);
        vec![h, c, w, b]
    })
}

/// Four Lorentzian peaks on a common offset. Centers are ordered by
/// construction: peak 1 is placed by `center_1` and each later peak by a
/// non-negative `gap_k` from its predecessor.
pub fn model_four_lorentzian() -> FitModel {
    let mut params = Vec::new();
    for k in 1..=4 {
        params.push(Parameter::free(&format!("amplitude_{k}")));
        if k == 1 {
            params.push(Parameter::free("center_1"));
        } else {
            params.push(Parameter::non_negative(&format!("gap_{k}")));
        }
        params.push(Parameter::non_negative(&format!("fwhm_{k}")));
    }
    params.push(Parameter::free("offset"));
    FitModel::new("four_lorentzian", params, |p, x| {
        let mut c = p[1];
        let mut y = p[12];
        for k in 0..4 {
            if k > 0 {
                c += p[3 * k + 1];
            }
            y += p[3 * k] * lorentz(x, c, p[3 * k + 2]);
        }
        y
    })
    .with_guess(four_peak_guess)
}

/// Peak centers `[c1, c2, c3, c4]` from four-Lorentzian parameters.
pub fn four_lorentzian_centers(p: &[f64]) -> [f64; 4] {
    let mut c = [p[1]; 4];
    for k in 1..4 {
        c[k] = c[k - 1] + p[3 * k + 1];
    }
    c
}

fn four_peak_guess(x: &[f64], y: &[f64]) -> Vec<f64> {
    let base = y.iter().cloned().fold(f64::INFINITY, f64::min).max(median(y).min(0.0));
    let (_, _, w0, _) = peak_guess(x, y);
    let exclusion = 1.5 * w0;
    // Candidates are maxima of a lightly smoothed curve within one FWHM on
    // either side, which rejects noise ripples on the flank of a taller line.
    let n = y.len();
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let (mut sum, mut count) = (0.0, 0.0);
            for j in 0..n {
                if (x[j] - x[i]).abs() <= 0.25 * w0 {
                    sum += y[j];
                    count += 1.0;
                }
            }
            sum / count
        })
        .collect();
    let mut taken: Vec<(f64, f64)> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| smooth[b].total_cmp(&smooth[a]));
    for i in idx {
        if taken.len() == 4 {
            break;
        }
        let dominant = (0..n).all(|j| (x[j] - x[i]).abs() > w0 || smooth[j] <= smooth[i]);
        if dominant && taken.iter().all(|&(c, _)| (c - x[i]).abs() > exclusion) {
            taken.push((x[i], smooth[i] - base));
        }
    }
    while taken.len() < 4 {
        let last = taken.last().map(|t| t.0).unwrap_or(x[0]);
        taken.push((last + exclusion, 0.0));
    }
    taken.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut p = Vec::with_capacity(13);
    for (k, &(c, h)) in taken.iter().enumerate() {
        p.push(h);
        p.push(if k == 0 { c } else { c - taken[k - 1].0 });
        p.push(w0);
    }
    p.push(base);
    p
}

/// `A·exp(−|x|/τ) + offset`; the symmetric form suits correlation
/// histograms and reduces to a plain decay for `x ≥ 0`.
pub fn model_exponential() -> FitModel {
    FitModel::new(
        "exponential",
        vec![Parameter::free("amplitude"), Parameter::bounded("tau", 1e-300, f64::INFINITY), Parameter::free("offset")],
        |p, x| p[0] * (-x.abs() / p[1]).exp() + p[2],
    )
    .with_jacobian(|p, x, out| {
        let e = (-x.abs() / p[1]).exp();
        out[0] = e;
        out[1] = p[0] * e * x.abs() / (p[1] * p[1]);
        out[2] = 1.0;
    })
    .with_guess(|x, y| {
        let mut pairs: Vec<(f64, f64)> = x.iter().map(|v| v.abs()).zip(y.iter().cloned()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let tail = &pairs[pairs.len() * 4 / 5..];
        let offset = tail.iter().map(|p| p.1).sum::<f64>() / tail.len() as f64;
        let amplitude = pairs[0].1 - offset;
        let target = amplitude.abs() / std::f64::consts::E;
        let tau = pairs.iter().find(|p| (p.1 - offset).abs() < target).map(|p| p.0).unwrap_or(pairs[pairs.len() / 2].0);
        vec![amplitude, tau.max(1e-12), offset]
    })
}

/// Two-level saturation `R∞ · I / (I + I_sat)`.
pub fn model_saturation() -> FitModel {
    FitModel::new(
        "saturation",
        vec![Parameter::free("r_inf"), Parameter::bounded("i_sat", 1e-300, f64::INFINITY)],
        |p, x| p[0] * x / (x + p[1]),
    )
    .with_jacobian(|p, x, out| {
        out[0] = x / (x + p[1]);
        out[1] = -p[0] * x / (x + p[1]).powi(2);
    })
    .with_guess(|x, y| {
        let ymax = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let r_inf = 1.5 * ymax;
        // invert the model at the point nearest half of the guessed plateau
        let k = y.iter().enumerate().min_by(|a, b| (a.1 - 0.5 * r_inf).abs().total_cmp(&(b.1 - 0.5 * r_inf).abs())).map(|(k, _)| k).unwrap_or(0);
        let i_sat = if y[k] > 0.0 && y[k] < r_inf { x[k] * (r_inf - y[k]) / y[k] } else { median(x) };
        vec![r_inf, i_sat.max(1e-12)]
    })
}

/// `A·e^(−γx)·cos(2πfx + φ) + offset`, with `f` in cycles per unit of `x`
/// (GHz for `x` in ns) and `γ` the envelope decay rate.
pub fn model_damped_rabi() -> FitModel {
    FitModel::new(
        "damped_rabi",
        vec![
            Parameter::free("amplitude"),
            Parameter::non_negative("frequency"),
            Parameter::non_negative("decay"),
            Parameter::free("phase"),
            Parameter::free("offset"),
        ],
        |p, x| p[0] * (-p[2] * x).exp() * (2.0 * PI * p[1] * x + p[3]).cos() + p[4],
    )
    .with_jacobian(|p, x, out| {
        let e = (-p[2] * x).exp();
        let arg = 2.0 * PI * p[1] * x + p[3];
        let (s, c) = arg.sin_cos();
        out[0] = e * c;
        out[1] = -p[0] * e * s * 2.0 * PI * x;
        out[2] = -x * p[0] * e * c;
        out[3] = -p[0] * e * s;
        out[4] = 1.0;
    })
    .with_guess(damped_rabi_guess)
}

/// FFT peak for the frequency, log-envelope regression for the decay, then
/// a linear solve for amplitude, phase and offset.
fn damped_rabi_guess(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let dt = (x[n - 1] - x[0]) / (n - 1) as f64;
    let mean = y.iter().sum::<f64>() / n as f64;

    let len = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = (0..len).map(|k| Complex::new(if k < n { y[k] - mean } else { 0.0 }, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let mags: Vec<f64> = buf[..len / 2].iter().map(|z| z.norm()).collect();
    let k = (1..mags.len()).max_by(|&a, &b| mags[a].total_cmp(&mags[b])).unwrap_or(1);
    let shift = if k + 1 < mags.len() {
        let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
        let den = a - 2.0 * b + c;
        if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 }
    } else {
        0.0
    };
    let freq = (k as f64 + shift) / (len as f64 * dt);

    // local maxima of |y − mean| as envelope samples
    let dev: Vec<f64> = y.iter().map(|v| (v - mean).abs()).collect();
    let peaks: Vec<(f64, f64)> = (1..n.saturating_sub(1))
        .filter(|&i| dev[i] >= dev[i - 1] && dev[i] >= dev[i + 1] && dev[i] > 0.0)
        .map(|i| (x[i], dev[i].ln()))
        .collect();
    let mut decay = 1.0 / (x[n - 1] - x[0]).abs().max(1e-12);
    if peaks.len() >= 3 {
        let m = peaks.len() as f64;
        let sx: f64 = peaks.iter().map(|p| p.0).sum();
        let sy: f64 = peaks.iter().map(|p| p.1).sum();
        let sxx: f64 = peaks.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = peaks.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        if slope < 0.0 && slope.is_finite() {
            decay = -slope;
        }
    }

    // y ≈ off + e^{−γx}(C cos ωx + S sin ωx)
    let w = 2.0 * PI * freq;
    let mut ata = nalgebra::Matrix3::<f64>::zeros();
    let mut atb = nalgebra::Vector3::<f64>::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let e = (-decay * xi).exp();
        let row = nalgebra::Vector3::new(1.0, e * (w * xi).cos(), e * (w * xi).sin());
        ata += row * row.transpose();
        atb += row * yi;
    }
    let sol = ata.try_inverse().map(|inv| inv * atb).unwrap_or(nalgebra::Vector3::new(mean, 0.0, 0.0));
    let (off, cc, ss) = (sol[0], sol[1], sol[2]);
    let amplitude = (cc * cc + ss * ss).sqrt();
    let phase = (-ss).atan2(cc);
    vec![amplitude, freq, decay, phase, off]
}

/// Cubic phonon broadening `a + b (x − T₀)³`.
pub fn model_cubic_linewidth() -> FitModel {
    FitModel::new(
        "cubic_linewidth",
        vec![Parameter::free("a"), Parameter::free("b"), Parameter::free("t0")],
        |p, x| p[0] + p[1] * (x - p[2]).powi(3),
    )
    .with_jacobian(|p, x, out| {
        let d = x - p[2];
        out[0] = 1.0;
        out[1] = d.powi(3);
        out[2] = -3.0 * p[1] * d * d;
    })
    .with_guess(|x, y| {
        let (a, b) = linear_regression(&x.iter().map(|v| v.powi(3)).collect::<Vec<_>>(), y);
        vec![a, b, 0.0]
    })
}

/// Generic Fano-type lineshape: absorptive plus dispersive Lorentzian
/// components on an offset. A phenomenological stand-in for homodyne
/// lineshape data.
pub fn model_fano() -> FitModel {
    FitModel::new(
        "fano",
        vec![
            Parameter::free("absorptive"),
            Parameter::free("dispersive"),
            Parameter::free("center"),
            Parameter::non_negative("fwhm"),
            Parameter::free("offset"),
        ],
        |p, x| p[0] * lorentz(x, p[2], p[3]) + p[1] * dispersive(x, p[2], p[3]) + p[4],
    )
    .with_note("phenomenological stand-in lineshape (absorptive + dispersive Lorentzian)")
    .with_guess(|x, y| {
        let (c, h, w, b) = peak_guess(x, y);
        vec![h, 0.0, c, w, b]
    })
}

/// `intercept + slope·x`.
pub fn model_linear() -> FitModel {
    FitModel::new("linear", vec![Parameter::free("intercept"), Parameter::free("slope")], |p, x| p[0] + p[1] * x)
        .with_jacobian(|_, x, out| {
            out[0] = 1.0;
            out[1] = x;
        })
        .with_guess(|x, y| {
            let (a, b) = linear_regression(x, y);
            vec![a, b]
        })
}

fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mx, b)
}

/// Looks a model up by the name used on the command line.
pub fn model_by_name(name: &str) -> Option<FitModel> {
    Some(match name {
        "lorentzian" => model_lorentzian(),
        "four_lorentzian" | "four-lorentzian" => model_four_lorentzian(),
        "exponential" => model_exponential(),
        "saturation" => model_saturation(),
        "damped_rabi" | "damped-rabi" | "rabi" => model_damped_rabi(),
        "cubic_linewidth" | "cubic-linewidth" | "cubic" => model_cubic_linewidth(),
        "fano" => model_fano(),
        "linear" => model_linear(),
        _ => return None,
    })
}

pub const MODEL_NAMES: [&str; 8] =
    ["lorentzian", "four_lorentzian", "exponential", "saturation", "damped_rabi", "cubic_linewidth", "fano", "linear"];
