//! Photon time tags: Monte Carlo wave-function unraveling of a Lindblad
//! generator, synthetic Poisson sources, background and jitter, and the
//! full cross-correlation `g²` histogram.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`). A simulation seeded with
//! `seed` runs segment `k` on stream `k` of that seed, so segments are
//! independent and the output does not depend on thread scheduling.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::LindbladGenerator;
use crate::error::{Error, Result};
use crate::linalg::{self, Operator};
use crate::observables::CorrelationFunction;

pub const RNG_NAME: &str = "ChaCha20";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeTagStream {
    pub detector_id: u32,
    /// Arrival times in ns, ascending, within `[0, duration]`.
    pub tags: Vec<f64>,
    pub duration: f64,
}

impl TimeTagStream {
    pub fn new(detector_id: u32, tags: Vec<f64>, duration: f64) -> Result<Self> {
        let s = TimeTagStream { detector_id, tags, duration };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::param("duration", "must be positive"));
        }
        if self.tags.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidState("time tags are not sorted".into()));
        }
        if let (Some(&a), Some(&b)) = (self.tags.first(), self.tags.last()) {
            if a < 0.0 || b > self.duration {
                return Err(Error::InvalidState("time tags outside [0, duration]".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Mean count rate in 1/ns.
    pub fn rate(&self) -> f64 {
        self.tags.len() as f64 / self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    /// Coarse step of the no-jump evolution (ns). The propagator is exact,
    /// so the step only trades bisection depth against per-step cost.
    pub step_ns: f64,
    /// Target accuracy of jump times (ns).
    pub time_resolution_ns: f64,
    /// Independent trajectories the duration is divided among, each
    /// restarted from `initial_level`.
    pub segments: usize,
    pub initial_level: usize,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        MonteCarloOptions { step_ns: 2.0, time_resolution_ns: 1e-3, segments: 1, initial_level: 0 }
    }
}

/// One stream per collection operator. See [`simulate_timetags_with`].
pub fn simulate_timetags(
    gen: &LindbladGenerator,
    collection_ops: &[(Operator, f64)],
    duration: f64,
    seed: u64,
) -> Result<Vec<TimeTagStream>> {
    simulate_timetags_with(gen, collection_ops, duration, seed, &MonteCarloOptions::default())
}

/// Quantum-jump unraveling of `gen`.
///
/// Each collection operator `(matrix, efficiency)` must equal the jump
/// operator `√r·L` of one of the generator's channels. A jump through that
/// channel is sent to detector `i` with probability `efficiency_i`; several
/// collection operators on the same channel act as a beamsplitter and their
/// efficiencies must sum to at most 1.
pub fn simulate_timetags_with(
    gen: &LindbladGenerator,
    collection_ops: &[(Operator, f64)],
    duration: f64,
    seed: u64,
    opts: &MonteCarloOptions,
) -> Result<Vec<TimeTagStream>> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::param("duration", format!("must be positive, got {duration}")));
    }
    if !(opts.step_ns > 0.0) || !(opts.time_resolution_ns > 0.0) || opts.segments == 0 {
        return Err(Error::param("options", "step, resolution and segment count must be positive"));
    }
    if opts.initial_level >= gen.dim() {
        return Err(Error::param("initial_level", "outside the Hilbert space"));
    }
    let routing = route_collection(gen, collection_ops)?;
    let engine = JumpEngine::new(gen, opts)?;

    let seg_len = duration / opts.segments as f64;
    let pieces: Vec<Vec<Vec<f64>>> = (0..opts.segments)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let start = k as f64 * seg_len;
            let end = if k + 1 == opts.segments { duration } else { (k + 1) as f64 * seg_len };
            engine.run(&routing, collection_ops.len(), start, end, opts.initial_level, &mut rng)
        })
        .collect();

    let mut streams: Vec<Vec<f64>> = vec![Vec::new(); collection_ops.len()];
    for piece in pieces {
        for (s, p) in streams.iter_mut().zip(piece) {
            s.extend(p);
        }
    }
    Ok(streams
        .into_iter()
        .enumerate()
        .map(|(i, tags)| TimeTagStream { detector_id: i as u32, tags, duration })
        .collect())
}

/// Per generator channel: `(detector, probability)` pairs.
fn route_collection(gen: &LindbladGenerator, ops: &[(Operator, f64)]) -> Result<Vec<Vec<(usize, f64)>>> {
    let mut routing = vec![Vec::new(); gen.collapse_ops().len()];
    for (i, (m, eff)) in ops.iter().enumerate() {
        if !(0.0..=1.0).contains(eff) {
            return Err(Error::param(&format!("collection_ops[{i}].efficiency"), format!("must lie in [0, 1], got {eff}")));
        }
        if m.nrows() != gen.dim() || m.ncols() != gen.dim() {
            return Err(Error::param(&format!("collection_ops[{i}].matrix"), "dimension does not match generator"));
        }
        let scale = m.norm().max(1e-300);
        let k = (0..gen.collapse_ops().len())
            .find(|&k| (gen.jump_operator(k) - m).norm() <= 1e-10 * scale)
            .ok_or_else(|| {
                Error::param(&format!("collection_ops[{i}].matrix"), "does not match any jump operator √r·L of the generator")
            })?;
        routing[k].push((i, *eff));
    }
    for (k, r) in routing.iter().enumerate() {
        let total: f64 = r.iter().map(|x| x.1).sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::param("collection_ops", format!("efficiencies on channel {k} sum to {total} > 1")));
        }
    }
    Ok(routing)
}

struct JumpEngine {
    /// `exp(−i H_eff step/2^j)` for `j = 0..levels`.
    propagators: Vec<Operator>,
    step: f64,
    jumps: Vec<Operator>,
    dim: usize,
}

impl JumpEngine {
    fn new(gen: &LindbladGenerator, opts: &MonteCarloOptions) -> Result<Self> {
        let levels = ((opts.step_ns / opts.time_resolution_ns).log2().ceil().max(0.0) as usize) + 1;
        let heff = gen.effective_hamiltonian();
        let propagators = (0..levels)
            .map(|j| {
                let dt = opts.step_ns / (1u64 << j) as f64;
                (heff * Complex64::new(0.0, -dt)).exp()
            })
            .collect();
        let jumps = (0..gen.collapse_ops().len()).map(|k| gen.jump_operator(k)).collect();
        Ok(JumpEngine { propagators, step: opts.step_ns, jumps, dim: gen.dim() })
    }

    fn run(
        &self,
        routing: &[Vec<(usize, f64)>],
        n_detectors: usize,
        start: f64,
        end: f64,
        initial_level: usize,
        rng: &mut ChaCha20Rng,
    ) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); n_detectors];
        let mut psi = DVector::<Complex64>::zeros(self.dim);
        psi[initial_level] = linalg::ONE;
        let mut t = start;
        let mut threshold: f64 = rng.random();
        while t < end {
            // coarse step; the unnormalized norm decays monotonically
            let next = &self.propagators[0] * &psi;
            if next.norm_squared() > threshold {
                psi = next;
                t += self.step;
                continue;
            }
            // bisect the crossing on the dyadic ladder
            for j in 1..self.propagators.len() {
                let trial = &self.propagators[j] * &psi;
                if trial.norm_squared() > threshold {
                    psi = trial;
                    t += self.step / (1u64 << j) as f64;
                }
            }
            let finest = self.step / (1u64 << (self.propagators.len() - 1)) as f64;
            t += 0.5 * finest;
            if t >= end {
                break;
            }
            let weights: Vec<f64> = self.jumps.iter().map(|j| (j * &psi).norm_squared()).collect();
            let total: f64 = weights.iter().sum();
            if !(total > 0.0) {
                // no channel can fire: stationary dark state
                break;
            }
            let mut u = rng.random::<f64>() * total;
            let mut k = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    k = i;
                    break;
                }
                u -= w;
            }
            psi = &self.jumps[k] * &psi;
            psi /= Complex64::new(psi.norm(), 0.0);
            if !routing[k].is_empty() {
                let mut v: f64 = rng.random();
                for &(det, p) in &routing[k] {
                    if v < p {
                        out[det].push(t);
                        break;
                    }
                    v -= p;
                }
            }
            threshold = rng.random();
        }
        out
    }
}

/// Homogeneous Poisson process at `rate` (1/ns).
pub fn poisson_stream(rate: f64, duration: f64, seed: u64, detector_id: u32) -> Result<TimeTagStream> {
    if !(rate >= 0.0) || !(duration > 0.0) {
        return Err(Error::param("rate/duration", "rate must be non-negative and duration positive"));
    }
    let mut tags = Vec::new();
    if rate > 0.0 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let exp = Exp::new(rate).map_err(|e| Error::param("rate", e.to_string()))?;
        let mut t = exp.sample(&mut rng);
        while t <= duration {
            tags.push(t);
            t += exp.sample(&mut rng);
        }
    }
    TimeTagStream::new(detector_id, tags, duration)
}

/// Merges a Poisson background at `background_rate` and applies Gaussian
/// timing jitter to the signal tags. Tags pushed outside `[0, duration]` by
/// the jitter are dropped.
pub fn add_background_and_jitter(
    stream: &TimeTagStream,
    background_rate: f64,
    jitter_sigma: f64,
    seed: u64,
) -> Result<TimeTagStream> {
    if !(background_rate >= 0.0) || !(jitter_sigma >= 0.0) {
        return Err(Error::param("background_rate/jitter_sigma", "must be non-negative"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut tags: Vec<f64> = if jitter_sigma > 0.0 {
        let normal = Normal::new(0.0, jitter_sigma).map_err(|e| Error::param("jitter_sigma", e.to_string()))?;
        stream
            .tags
            .iter()
            .map(|t| t + normal.sample(&mut rng))
            .filter(|t| (0.0..=stream.duration).contains(t))
            .collect()
    } else {
        stream.tags.clone()
    };
    if background_rate > 0.0 {
        let bg = poisson_stream(background_rate, stream.duration, rng.random(), stream.detector_id)?;
        tags.extend(bg.tags);
    }
    tags.sort_by(f64::total_cmp);
    TimeTagStream::new(stream.detector_id, tags, stream.duration)
}

/// Sends each tag to one of two outputs with probability `transmission` for
/// the first, as a beamsplitter in front of two detectors.
pub fn split_stream(stream: &TimeTagStream, transmission: f64, seed: u64) -> Result<(TimeTagStream, TimeTagStream)> {
    if !(0.0..=1.0).contains(&transmission) {
        return Err(Error::param("transmission", "must lie in [0, 1]"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for &t in &stream.tags {
        if rng.random::<f64>() < transmission {
            a.push(t);
        } else {
            b.push(t);
        }
    }
    Ok((
        TimeTagStream { detector_id: 0, tags: a, duration: stream.duration },
        TimeTagStream { detector_id: 1, tags: b, duration: stream.duration },
    ))
}

/// Full cross-correlation histogram of `b` relative to `a`, bins of width
/// `bin_width` centred on `k·bin_width` for `|k·bin_width| ≤ max_tau`,
/// normalized by the uncorrelated expectation `N_a N_b w / T`.
pub fn g2_from_timetags(a: &TimeTagStream, b: &TimeTagStream, bin_width: f64, max_tau: f64) -> Result<CorrelationFunction> {
    if !(bin_width > 0.0) || !bin_width.is_finite() {
        return Err(Error::param("bin_width", "must be positive"));
    }
    if !(max_tau >= bin_width) {
        return Err(Error::param("max_tau", "must be at least one bin width"));
    }
    if (a.duration - b.duration).abs() > 1e-9 * a.duration.max(b.duration) {
        return Err(Error::param("duration", "streams cover different durations"));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::Normalization(format!(
            "empty stream (detector {}: {} tags, detector {}: {} tags)",
            a.detector_id,
            a.len(),
            b.detector_id,
            b.len()
        )));
    }
    let half = (max_tau / bin_width + 1e-9).floor() as i64;
    let nbins = (2 * half + 1) as usize;
    let reach = (half as f64 + 0.5) * bin_width;
    let mut counts = vec![0u64; nbins];
    let mut lo = 0usize;
    for &ta in &a.tags {
        while lo < b.tags.len() && b.tags[lo] < ta - reach {
            lo += 1;
        }
        let mut j = lo;
        while j < b.tags.len() && b.tags[j] < ta + reach {
            let k = ((b.tags[j] - ta) / bin_width).round() as i64 + half;
            if (0..nbins as i64).contains(&k) {
                counts[k as usize] += 1;
            }
            j += 1;
        }
    }
    let norm = a.len() as f64 * b.len() as f64 * bin_width / a.duration;
    let taus = (0..nbins).map(|k| (k as i64 - half) as f64 * bin_width).collect();
    CorrelationFunction::from_counts(taus, counts.into_iter().map(|c| c as f64).collect(), vec![norm; nbins])
}

/// Writes the one-value-per-line format with its header.
pub fn write_timetags(path: &Path, stream: &TimeTagStream, seed: u64) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_timetags_to(&mut w, stream, seed)?;
    w.flush()?;
    Ok(())
}

pub fn write_timetags_to(w: &mut impl Write, stream: &TimeTagStream, seed: u64) -> Result<()> {
    writeln!(w, "# wgqed-timetags v1, detector={}, duration_ns={}, seed={}", stream.detector_id, stream.duration, seed)?;
    for t in &stream.tags {
        writeln!(w, "{t}")?;
    }
    Ok(())
}

/// Reads a time-tag file, returning the stream and the seed in its header.
pub fn read_timetags(path: &Path) -> Result<(TimeTagStream, u64)> {
    let ingest = |reason: String| Error::Ingestion { path: path.to_path_buf(), reason };
    let file = fs::File::open(path).map_err(|e| ingest(e.to_string()))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().ok_or_else(|| ingest("empty file".into()))?.map_err(|e| ingest(e.to_string()))?;
    let (detector_id, duration, seed) = parse_header(&header).map_err(|r| ingest(format!("line 1: {r}")))?;
    let mut tags = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| ingest(e.to_string()))?;
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        let v: f64 = s.parse().map_err(|_| ingest(format!("line {}: not a number: {s:?}", i + 2)))?;
        if tags.last().is_some_and(|&p| v < p) {
            return Err(ingest(format!("line {}: tags are not ascending", i + 2)));
        }
        if !(0.0..=duration).contains(&v) {
            return Err(ingest(format!("line {}: tag {v} outside [0, {duration}]", i + 2)));
        }
        tags.push(v);
    }
    Ok((TimeTagStream { detector_id, tags, duration }, seed))
}

fn parse_header(line: &str) -> std::result::Result<(u32, f64, u64), String> {
    let rest = line
        .strip_prefix("# wgqed-timetags v1")
        .ok_or_else(|| format!("expected '# wgqed-timetags v1, ...' header, found {line:?}"))?;
    let (mut det, mut dur, mut seed) = (None, None, None);
    for field in rest.split(',').map(str::trim).filter(|f| !f.is_empty()) {
        let (k, v) = field.split_once('=').ok_or_else(|| format!("malformed header field {field:?}"))?;
        match k {
            "detector" => det = v.parse().ok(),
            "duration_ns" => dur = v.parse::<f64>().ok().filter(|d| *d > 0.0),
            "seed" => seed = v.parse().ok(),
            _ => return Err(format!("unknown header field {k:?}")),
        }
    }
    Ok((
        det.ok_or("missing or invalid detector")?,
        dur.ok_or("missing or invalid duration_ns")?,
        seed.ok_or("missing or invalid seed")?,
    ))
}

/// Draws a Poisson count; used by the probe simulations.
pub(crate) fn poisson_count(mean: f64, rng: &mut ChaCha20Rng) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    Poisson::new(mean).map(|p| p.sample(rng)).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::mhz_to_angular;
    use crate::dynamics::{self, build_two_level_generator, sigma_minus};

    fn ks_p_value(d: f64, n: usize) -> f64 {
        // Kolmogorov distribution tail with the Stephens small-sample factor
        let sn = (n as f64).sqrt();
        let lambda = (sn + 0.12 + 0.11 / sn) * d;
        let mut p = 0.0;
        for k in 1..100 {
            let term = 2.0 * (-1.0f64).powi(k - 1) * (-2.0 * (k as f64 * lambda).powi(2)).exp();
            p += term;
            if term.abs() < 1e-12 {
                break;
            }
        }
        p.clamp(0.0, 1.0)
    }

    #[test]
    fn undriven_ground_start_is_dark() {
        let g = build_two_level_generator(0.0, 0.0, 26.0, 0.0, 0.0).unwrap();
        let s = simulate_timetags(&g, &[(g.jump_operator(0), 1.0)], 1e4, 1).unwrap();
        assert!(s[0].is_empty());
    }

    #[test]
    fn count_rate_matches_steady_state() {
        let g = build_two_level_generator(60.0, 0.0, 26.0, 0.0, 0.0).unwrap();
        let rho = dynamics::steady_state(&g).unwrap();
        let gamma = mhz_to_angular(26.0);
        let duration = 2e5;
        let opts = MonteCarloOptions { segments: 4, ..Default::default() };
        let s = simulate_timetags_with(&g, &[(g.jump_operator(0), 1.0)], duration, 9, &opts).unwrap();
        let expected = gamma * rho.population(1) * duration;
        // photon counts of a driven emitter are sub-Poissonian, √N bounds them
        assert!((s[0].len() as f64 - expected).abs() < 3.0 * expected.sqrt(), "{} vs {expected}", s[0].len());
    }

    #[test]
    fn deterministic_per_seed() {
        let g = build_two_level_generator(40.0, 5.0, 26.0, 4.0, 0.0).unwrap();
        let ops = [(g.jump_operator(0), 0.5), (g.jump_operator(0), 0.5)];
        let opts = MonteCarloOptions { segments: 3, ..Default::default() };
        let a = simulate_timetags_with(&g, &ops, 2e4, 5, &opts).unwrap();
        let b = simulate_timetags_with(&g, &ops, 2e4, 5, &opts).unwrap();
        assert_eq!(a, b);
        let c = simulate_timetags_with(&g, &ops, 2e4, 6, &opts).unwrap();
        assert_ne!(a, c);
        for s in &a {
            s.validate().unwrap();
        }
    }

    #[test]
    fn collection_must_match_a_channel() {
        let g = build_two_level_generator(40.0, 0.0, 26.0, 0.0, 0.0).unwrap();
        assert!(simulate_timetags(&g, &[(sigma_minus(), 1.0)], 10.0, 1).is_err());
        let j = g.jump_operator(0);
        assert!(simulate_timetags(&g, &[(j.clone(), 0.7), (j, 0.7)], 10.0, 1).is_err());
    }

    #[test]
    fn poisson_interarrivals_are_exponential() {
        let rate = 0.05;
        let s = poisson_stream(rate, 2.0e6 + 1.0, 3, 0).unwrap();
        let mut gaps: Vec<f64> = s.tags.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.truncate(100_000);
        assert_eq!(gaps.len(), 100_000);
        gaps.sort_by(f64::total_cmp);
        let n = gaps.len();
        let d = gaps
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let f = 1.0 - (-rate * g).exp();
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks_p_value(d, n) > 0.01, "KS D = {d}");
    }

    #[test]
    fn independent_poisson_streams_are_uncorrelated() {
        let a = poisson_stream(0.02, 1e7, 1, 0).unwrap();
        let b = poisson_stream(0.02, 1e7, 2, 1).unwrap();
        let g = g2_from_timetags(&a, &b, 5.0, 100.0).unwrap();
        let err = g.poisson_errors();
        let chi2: f64 = g.g2.iter().zip(&err).map(|(v, e)| ((v - 1.0) / e).powi(2)).sum();
        let dof = g.len() as f64;
        // χ² within 4 standard deviations of its mean
        assert!((chi2 - dof).abs() < 4.0 * (2.0 * dof).sqrt(), "chi2 {chi2} for {dof} bins");
    }

    #[test]
    fn histogram_bins_are_centred() {
        let a = TimeTagStream::new(0, vec![10.0, 50.0], 100.0).unwrap();
        let b = TimeTagStream::new(1, vec![10.4, 52.0], 100.0).unwrap();
        let g = g2_from_timetags(&a, &b, 1.0, 5.0).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.taus[5], 0.0);
        assert_eq!(g.counts[5], 1.0);
        assert_eq!(g.counts[7], 1.0);
        assert_eq!(g.counts.iter().sum::<f64>(), 2.0);
        assert_eq!(g.normalization[0], 2.0 * 2.0 * 1.0 / 100.0);
    }

    #[test]
    fn empty_stream_is_normalization_error() {
        let a = TimeTagStream::new(0, vec![], 100.0).unwrap();
        let b = TimeTagStream::new(1, vec![1.0], 100.0).unwrap();
        assert!(matches!(g2_from_timetags(&a, &b, 1.0, 5.0), Err(Error::Normalization(_))));
    }

    #[test]
    fn background_and_jitter_identity_and_pure_background() {
        let s = poisson_stream(0.01, 1e4, 4, 0).unwrap();
        assert_eq!(add_background_and_jitter(&s, 0.0, 0.0, 1).unwrap(), s);
        let empty = TimeTagStream::new(0, vec![], 1e6).unwrap();
        let bg = add_background_and_jitter(&empty, 0.01, 0.3, 2).unwrap();
        let n = bg.len() as f64;
        assert!((n - 1e4).abs() < 4.0 * 100.0);
    }

    #[test]
    fn timetag_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.tags");
        let s = poisson_stream(0.1, 1e3, 8, 3).unwrap();
        write_timetags(&path, &s, 8).unwrap();
        let (r, seed) = read_timetags(&path).unwrap();
        assert_eq!(seed, 8);
        assert_eq!(r, s);
        let body = fs::read_to_string(&path).unwrap();
        assert!(body.starts_with("# wgqed-timetags v1, detector=3, duration_ns=1000, seed=8\n"));
    }

    #[test]
    fn corrupted_timetag_line_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.tags");
        fs::write(&path, "# wgqed-timetags v1, detector=0, duration_ns=10, seed=1\n1.0\n2.x\n3.0\n").unwrap();
        match read_timetags(&path) {
            Err(Error::Ingestion { reason, .. }) => assert!(reason.contains("line 3"), "{reason}"),
            other => panic!("{other:?}"),
        }
    }
}
