//! Executes an [`ExperimentConfig`] and writes CSV data, a plot spec and a
//! manifest. Outputs are deterministic for a given config and seed.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::diffusion::run_feedback;
use crate::dynamics::{evolve, normalized_g2, sigma_minus, steady_state, DensityOperator, TwoLevelParams, EXCITED};
use crate::error::{Error, Result};
use crate::fitting::{fit, four_lorentzian_centers, model_damped_rabi, model_four_lorentzian, model_lorentzian, model_saturation};
use crate::gev::{gev_default, ground_state_populations, linewidth_nm_to_mhz, linewidth_vs_temperature, EXCITED_SPLITTING_GHZ};
use crate::homodyne::{fit_lo_amplitude, homodyne_g2, reflected_intensity_spectrum, LocalOscillator, OutputFieldModel};
use crate::io::budget::{detected_rate, max_photon_flux, solve_waveguide_beta};
use crate::io::config::{require, ExperimentConfig, ExperimentKind};
use crate::io::table::{csv_string, spectrum_csv};
use crate::photon_stats::{
    add_background_and_jitter, g2_from_timetags, simulate_timetags_with, write_timetags_to, MonteCarloOptions, RNG_NAME,
};
use crate::waveguide::{cooperativity, extinction_on_resonance, transmission_spectrum};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "WGQED_OUTPUT_DIR";

/// A file produced by a run, held in memory until every artifact succeeds.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub kind: ExperimentKind,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Headline numbers, also stored in the manifest.
    pub results: Map<String, Value>,
}

struct Outputs {
    prefix: String,
    artifacts: Vec<Artifact>,
    plots: Vec<Value>,
    results: Map<String, Value>,
}

impl Outputs {
    fn new(prefix: String) -> Self {
        Outputs { prefix, artifacts: Vec::new(), plots: Vec::new(), results: Map::new() }
    }

    fn file(&mut self, suffix: &str, contents: String) -> String {
        let name = format!("{}_{suffix}", self.prefix);
        self.artifacts.push(Artifact { name: name.clone(), contents });
        name
    }

    fn plot(&mut self, csv: &str, title: &str, x: &str, ys: &[&str]) {
        self.plots.push(json!({ "title": title, "data": csv, "x": x, "y": ys }));
    }

    fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }
}

fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect()
}

fn seeded(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy)]
enum Noise {
    /// Standard deviation a fraction of the largest value.
    OfPeak,
    /// Standard deviation a fraction of each value.
    Relative,
}

fn add_noise(values: &mut [f64], fraction: f64, noise: Noise, seed: u64, stream: u64) -> Result<()> {
    if fraction <= 0.0 {
        return Ok(());
    }
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let normal = Normal::new(0.0, fraction).map_err(|e| Error::param("noise_fraction", e.to_string()))?;
    let mut rng = seeded(seed, stream);
    for v in values {
        let scale = match noise {
            Noise::OfPeak => peak,
            Noise::Relative => *v,
        };
        *v += scale * normal.sample(&mut rng);
    }
    Ok(())
}

/// Resolution order: explicit override, `[output].dir`, `$WGQED_OUTPUT_DIR`,
/// then the working directory.
pub fn output_dir(cfg: &ExperimentConfig, override_dir: Option<&Path>) -> PathBuf {
    override_dir
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Runs the experiment and writes its artifacts into the output directory.
pub fn run(cfg: &ExperimentConfig, override_dir: Option<&Path>) -> Result<RunReport> {
    let (artifacts, results) = execute(cfg)?;
    let dir = output_dir(cfg, override_dir);
    let files = write_artifacts(&dir, &artifacts)?;
    Ok(RunReport { kind: cfg.kind, output_dir: dir, files, results })
}

/// Runs the experiment in memory: the artifacts (manifest last) and the
/// headline results.
pub fn execute(cfg: &ExperimentConfig) -> Result<(Vec<Artifact>, Map<String, Value>)> {
    cfg.validate()?;
    let mut out = Outputs::new(cfg.prefix());
    match cfg.kind {
        ExperimentKind::Transmission => run_transmission(cfg, &mut out)?,
        ExperimentKind::Spectrum => run_spectrum(cfg, &mut out)?,
        ExperimentKind::Rabi => run_rabi(cfg, &mut out)?,
        ExperimentKind::G2 => run_g2(cfg, &mut out)?,
        ExperimentKind::Homodyne => run_homodyne(cfg, &mut out)?,
        ExperimentKind::LinewidthSweep => run_linewidth_sweep(cfg, &mut out)?,
        ExperimentKind::Feedback => run_feedback_kind(cfg, &mut out)?,
        ExperimentKind::Saturation => run_saturation(cfg, &mut out)?,
        ExperimentKind::Budget => run_budget(cfg, &mut out)?,
    }

    if !out.plots.is_empty() {
        let plots = json!({ "kind": cfg.kind.name(), "plots": out.plots });
        out.file("plot.json", pretty(&plots)?);
    }
    let mut outputs: Vec<Value> = out.artifacts.iter().map(|a| Value::String(a.name.clone())).collect();
    let manifest_name = format!("{}_manifest.json", out.prefix);
    outputs.push(Value::String(manifest_name.clone()));
    let manifest = json!({
        "tool": "wgqed",
        "version": env!("CARGO_PKG_VERSION"),
        "kind": cfg.kind.name(),
        "seed": cfg.seed,
        "rng": RNG_NAME,
        "config": serde_json::to_value(cfg).map_err(|e| Error::ModelInconsistency(e.to_string()))?,
        "outputs": outputs,
        "results": Value::Object(out.results.clone()),
    });
    out.artifacts.push(Artifact { name: manifest_name, contents: pretty(&manifest)? });
    Ok((out.artifacts, out.results))
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::ModelInconsistency(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes every artifact to a temporary file first and renames them only
/// once all writes succeeded; nothing is left behind on failure.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(a.contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(&a.name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        if let Err(e) = tmp.persist(&target) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(Error::Io(e.error));
        }
        written.push(target);
    }
    Ok(written)
}

fn scan_points(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let s = require(&cfg.scan, "scan", cfg.kind)?;
    Ok(linspace(s.start_mhz, s.stop_mhz, s.points))
}

fn run_transmission(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let wg = require(&cfg.waveguide, "waveguide", cfg.kind)?.coupling()?;
    let scan = scan_points(cfg)?;
    let spectrum = transmission_spectrum(&wg, &scan)?;
    let csv = out.file("transmission.csv", spectrum_csv(&spectrum));
    out.plot(&csv, "Waveguide transmission", "detuning_mhz", &[&spectrum.quantity]);

    let dip: Vec<f64> = spectrum.values.iter().map(|t| 1.0 - t).collect();
    let line = fit(&model_lorentzian(), &scan, &dip, None, None)?;
    let c = cooperativity(&wg)?;
    out.result("gamma_1d_mhz", wg.gamma_1d_mhz);
    out.result("gamma_prime_mhz", wg.gamma_prime_mhz);
    out.result("cooperativity", c);
    out.result("beta", wg.beta());
    out.result("extinction_on_resonance", extinction_on_resonance(c)?);
    out.result("min_transmission", spectrum.min());
    out.result("fitted_fwhm_mhz", line.get("fwhm").unwrap_or(f64::NAN));
    Ok(())
}

/// Photoluminescence of the four-line ZPL fine structure: each line is
/// weighted by the thermal population of its excited level.
fn run_spectrum(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let s = *require(&cfg.spectrum, "spectrum", cfg.kind)?;
    let model = gev_default();
    let (p_lower, p_upper) = ground_state_populations(EXCITED_SPLITTING_GHZ, s.temperature_k)?;
    let offsets = model.transition_offsets_ghz();
    let x = linspace(s.start_ghz, s.stop_ghz, s.points);
    let half = 0.5 * s.linewidth_ghz;
    let mut y: Vec<f64> = x
        .iter()
        .map(|&f| {
            model
                .transitions
                .iter()
                .zip(&offsets)
                .map(|(t, &c)| {
                    let pop = if t.upper == 2 { p_lower } else { p_upper };
                    pop * t.radiative_rate * half * half / ((f - c).powi(2) + half * half)
                })
                .sum::<f64>()
        })
        .collect();
    let peak = y.iter().cloned().fold(0.0, f64::max);
    y.iter_mut().for_each(|v| *v /= peak);
    add_noise(&mut y, s.noise_fraction, Noise::OfPeak, cfg.seed.unwrap_or(0), 0)?;

    let fitted = fit(&model_four_lorentzian(), &x, &y, None, None)?;
    let mut fit_column = model_four_lorentzian().predict(&fitted.parameters, &x);
    fit_column.iter_mut().for_each(|v| *v = (*v * 1e12).round() / 1e12);
    let csv = out.file("spectrum.csv", csv_string(&["offset_ghz", "intensity", "fit"], &[&x, &y, &fit_column]));
    out.plot(&csv, "Zero-phonon-line fine structure", "offset_ghz", &["intensity", "fit"]);
    out.file("fit.csv", fitted.to_csv());

    let c = four_lorentzian_centers(&fitted.parameters);
    out.result("centers_ghz", c.to_vec());
    out.result("ground_splitting_ghz", c[1] - c[0]);
    out.result("excited_splitting_ghz", c[3] - c[1]);
    out.result("reduced_chi_square", fitted.reduced_chi_square);
    Ok(())
}

fn run_rabi(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let params = cfg.emitter_params()?;
    let r = *require(&cfg.rabi, "rabi", cfg.kind)?;
    let gen = params.generator()?;
    let times = linspace(0.0, r.duration_ns, r.points);
    let traj = evolve(&gen, &DensityOperator::basis(2, 0), &times)?;
    let pe = traj.population(EXCITED);
    let csv = out.file("rabi.csv", csv_string(&["time_ns", "excited_population"], &[&times, &pe]));
    out.plot(&csv, "Rabi oscillation", "time_ns", &["excited_population"]);

    let fitted = fit(&model_damped_rabi(), &times, &pe, None, None)?;
    out.file("fit.csv", fitted.to_csv());
    let freq = fitted.get("frequency").unwrap_or(f64::NAN);
    let decay = fitted.get("decay").unwrap_or(f64::NAN);
    out.result("rabi_frequency_mhz", freq * 1e3);
    out.result("decay_rate_per_ns", decay);
    out.result("decay_time_ns", 1.0 / decay);
    out.result("decay_rate_mhz", decay * 1e3 / (2.0 * std::f64::consts::PI));
    Ok(())
}

fn run_g2(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let params = cfg.emitter_params()?;
    let g = *require(&cfg.g2, "g2", cfg.kind)?;
    let seed = cfg.seed.unwrap_or(0);
    let gen = params.generator()?;
    let jump = gen.jump_operator(0);
    let half = 0.5 * g.efficiency;
    let opts = MonteCarloOptions { segments: g.segments, ..MonteCarloOptions::default() };
    let mut streams = simulate_timetags_with(&gen, &[(jump.clone(), half), (jump, half)], g.duration_ns, seed, &opts)?;
    if g.background_rate_per_ns > 0.0 || g.jitter_ns > 0.0 {
        for (k, s) in streams.iter_mut().enumerate() {
            *s = add_background_and_jitter(s, g.background_rate_per_ns, g.jitter_ns, seed.wrapping_add(1 + k as u64))?;
        }
    }
    for (k, s) in streams.iter().enumerate() {
        let mut buf = Vec::new();
        write_timetags_to(&mut buf, s, seed)?;
        out.file(&format!("detector{k}.tags"), String::from_utf8(buf).expect("ascii"));
    }
    let measured = g2_from_timetags(&streams[0], &streams[1], g.bin_ns, g.window_ns)?;

    let rho = steady_state(&gen)?;
    let abs_taus: Vec<f64> = measured.taus.iter().map(|t| t.abs()).collect();
    let mut unique = abs_taus.clone();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let theory = normalized_g2(&gen, &rho, &sigma_minus(), &unique)?;
    let qrt: Vec<f64> = abs_taus.iter().map(|t| theory[unique.partition_point(|u| u < t)]).collect();

    let name = out.file(
        "g2.csv",
        csv_string(&["tau_ns", "g2", "counts", "qrt_g2"], &[&measured.taus, &measured.g2, &measured.counts, &qrt]),
    );
    out.plot(&name, "Intensity correlation", "tau_ns", &["g2", "qrt_g2"]);
    out.result("tags_detector0", streams[0].len());
    out.result("tags_detector1", streams[1].len());
    out.result("g2_zero", measured.at_zero());
    out.result("qrt_g2_zero", theory[0]);
    Ok(())
}

fn run_homodyne(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let params: TwoLevelParams = cfg.emitter_params()?;
    let h = *require(&cfg.homodyne, "homodyne", cfg.kind)?;
    let lo = LocalOscillator::new(h.lo_amplitude, h.lo_phase_rad)?;
    let mut model = OutputFieldModel::two_level(lo, params, h.coupling_mhz)?;
    let n_tau = (h.max_tau_ns / h.tau_step_ns).round() as usize + 1;
    let taus = linspace(0.0, h.tau_step_ns * (n_tau - 1) as f64, n_tau);

    if let Some(target) = h.target_g2 {
        let fitted = fit_lo_amplitude(&model, target, &taus)?;
        model = model.with_lo(fitted.lo);
        out.result("target_g2", target);
        out.result("recovery_time_ns", fitted.recovery_time_ns);
        out.result("recovery_time_uncertainty_ns", fitted.recovery_time_uncertainty_ns);
    }
    out.result("lo_amplitude", model.lo.amplitude);
    out.result("lo_phase_rad", model.lo.phase);
    out.result("lo_flux_per_ns", model.lo.flux());

    let scan = scan_points(cfg)?;
    let spectra = reflected_intensity_spectrum(&model, &scan, h.regime)?;
    let csv = out.file(
        "spectrum.csv",
        csv_string(
            &["detuning_mhz", "total", "interference", "fluorescence"],
            &[&spectra.detuning_mhz, &spectra.total, &spectra.interference, &spectra.fluorescence],
        ),
    );
    out.plot(&csv, "Reflected intensity", "detuning_mhz", &["total", "interference", "fluorescence"]);

    let g2 = homodyne_g2(&model, &taus)?;
    let csv = out.file("g2.csv", csv_string(&["tau_ns", "g2"], &[&g2.taus, &g2.g2]));
    out.plot(&csv, "Output-field intensity correlation", "tau_ns", &["g2"]);
    out.result("g2_zero", g2.at_zero());
    Ok(())
}

fn run_linewidth_sweep(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let t = *require(&cfg.temperature, "temperature", cfg.kind)?;
    let phonon = *require(&cfg.phonon, "phonon", cfg.kind)?;
    let temps = linspace(t.start_k, t.stop_k, t.points);
    let zpl = gev_default().zpl_wavelength_nm;
    let rows: Vec<(f64, f64)> = temps
        .par_iter()
        .map(|&temp| -> Result<(f64, f64)> {
            let env = phonon.environment(temp);
            let nm = linewidth_vs_temperature(&env, temp)?;
            Ok((nm, env.local_mode_occupation()?))
        })
        .collect::<Result<_>>()?;
    let nm: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ghz: Vec<f64> = nm.iter().map(|&l| linewidth_nm_to_mhz(l, zpl) * 1e-3).collect();
    let occupation: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let csv = out.file(
        "linewidth.csv",
        csv_string(
            &["temperature_k", "linewidth_nm", "linewidth_ghz", "local_mode_occupation"],
            &[&temps, &nm, &ghz, &occupation],
        ),
    );
    out.plot(&csv, "Linewidth versus temperature", "temperature_k", &["linewidth_nm"]);
    out.result("min_linewidth_nm", nm.iter().cloned().fold(f64::INFINITY, f64::min));
    out.result("max_linewidth_nm", nm.iter().cloned().fold(0.0, f64::max));
    Ok(())
}

fn run_feedback_kind(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let model = cfg.diffusion_model()?;
    let f = *require(&cfg.feedback, "feedback", cfg.kind)?;
    let res = run_feedback(&f.protocol(), &model, f.total_time_ns)?;
    let csv = out.file(
        "feedback.csv",
        csv_string(&["time_ns", "locked_mhz", "free_mhz"], &[&res.times, &res.locked_trace, &res.free_trace]),
    );
    out.plot(&csv, "Spectral diffusion with feedback", "time_ns", &["free_mhz", "locked_mhz"]);
    out.result("duty_cycle", res.duty_cycle);
    out.result("residual_rms_mhz", res.residual_rms);
    out.result("free_running_rms_mhz", res.free_running_rms);
    out.result("lock_lost_events", res.lock_lost_events);
    out.result("recenters", res.recenters);
    Ok(())
}

/// Detected rate `R∞·2ρ_ee` from the stationary excited population, with
/// the drive set so that `P/I_sat` is the saturation parameter.
fn run_saturation(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let e = cfg.emitter_params()?;
    let s = *require(&cfg.saturation, "saturation", cfg.kind)?;
    let powers = linspace(s.power_max_mw / s.points as f64, s.power_max_mw, s.points);
    let mut rates: Vec<f64> = powers
        .par_iter()
        .map(|&p| -> Result<f64> {
            let rabi = TwoLevelParams::rabi_for_saturation(p / s.i_sat_mw, e.gamma0_mhz, e.dephasing_mhz);
            let gen = TwoLevelParams { rabi_mhz: rabi, detuning_mhz: 0.0, ..e }.generator()?;
            Ok(s.r_inf_mcps * 2.0 * steady_state(&gen)?.population(EXCITED))
        })
        .collect::<Result<_>>()?;
    let sigma: Vec<f64> = rates.iter().map(|r| r * s.noise_fraction).collect();
    add_noise(&mut rates, s.noise_fraction, Noise::Relative, cfg.seed.unwrap_or(0), 0)?;
    let csv = out.file("saturation.csv", csv_string(&["power_mw", "rate_mcps"], &[&powers, &rates]));
    out.plot(&csv, "Saturation", "power_mw", &["rate_mcps"]);
    let weights = (s.noise_fraction > 0.0).then_some(sigma.as_slice());
    let fitted = fit(&model_saturation(), &powers, &rates, weights, None)?;
    out.file("fit.csv", fitted.to_csv());
    out.result("r_inf_mcps", fitted.get("r_inf").unwrap_or(f64::NAN));
    out.result("i_sat_mw", fitted.get("i_sat").unwrap_or(f64::NAN));
    Ok(())
}

fn run_budget(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let b = *require(&cfg.budget, "budget", cfg.kind)?;
    out.result("max_photon_flux_mcps", max_photon_flux(b.lifetime_ns)?);
    let beta = match (b.waveguide_beta, b.detected_mcps) {
        (Some(beta), _) => beta,
        (None, Some(d)) => {
            let beta = solve_waveguide_beta(d, b.lifetime_ns, b.zpl_branching, b.fiber_coupling, b.filter_and_detector)?;
            out.result("solved_waveguide_beta", beta);
            beta
        }
        (None, None) => unreachable!("rejected by validation"),
    };
    let budget = b.budget(beta);
    budget.validate()?;
    out.result("chain_efficiency", budget.chain_efficiency());
    if let Some(x) = b.excitation_mcps {
        out.result("detected_rate_mcps", detected_rate(&budget, x)?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(text).unwrap()
    }

    #[test]
    fn transmission_run_writes_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let c = cfg(r#"
kind = "transmission"
[waveguide]
cooperativity = 0.104
total_linewidth_mhz = 44.7
[scan]
start_mhz = -150.0
stop_mhz = 150.0
points = 61
"#);
        let rep = run(&c, Some(dir.path())).unwrap();
        assert_eq!(rep.files.len(), 3);
        let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("transmission_manifest.json")).unwrap()).unwrap();
        assert_eq!(m["rng"], "ChaCha20");
        assert!((m["results"]["min_transmission"].as_f64().unwrap() - 1.0 / 1.104f64.powi(2)).abs() < 1e-9);
    }

    #[test]
    fn failed_write_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("x_b.csv")).unwrap();
        let arts = vec![
            Artifact { name: "x_a.csv".into(), contents: "a\n".into() },
            Artifact { name: "x_b.csv".into(), contents: "b\n".into() },
        ];
        assert!(write_artifacts(dir.path(), &arts).is_err());
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, vec![std::ffi::OsString::from("x_b.csv")]);
    }

    #[test]
    fn budget_solves_beta() {
        let c = cfg(r#"
kind = "budget"
[budget]
lifetime_ns = 6.1
zpl_branching = 0.6
fiber_coupling = 0.5
filter_and_detector = 0.15
detected_mcps = 0.79
"#);
        let dir = tempfile::tempdir().unwrap();
        let rep = run(&c, Some(dir.path())).unwrap();
        let beta = rep.results["solved_waveguide_beta"].as_f64().unwrap();
        assert!((beta - 0.79 / (1000.0 / 6.1 * 0.6 * 0.5 * 0.15)).abs() < 1e-12);
    }

    #[test]
    fn budget_rejects_excess_excitation() {
        let c = cfg(r#"
kind = "budget"
[budget]
lifetime_ns = 6.1
zpl_branching = 0.6
fiber_coupling = 0.5
filter_and_detector = 0.15
waveguide_beta = 0.1
excitation_mcps = 500.0
"#);
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(run(&c, Some(dir.path())), Err(Error::SaturationViolation { .. })));
        assert_eq!(std::fs::read_dir(dir.path()).map(|d| d.count()).unwrap_or(0), 0);
    }
}
