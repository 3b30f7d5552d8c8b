//! TOML experiment configuration. Keys carry their units
//! (`gamma_1d_mhz`, `duration_ns`); unknown keys are rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diffusion::{DiffusionModel, FeedbackProtocol};
use crate::dynamics::TwoLevelParams;
use crate::error::{Error, Result};
use crate::gev::PhononEnvironment;
use crate::homodyne::Regime;
use crate::io::budget::PhotonBudget;
use crate::waveguide::WaveguideCoupling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Spectrum,
    Rabi,
    G2,
    Homodyne,
    Transmission,
    LinewidthSweep,
    Feedback,
    Saturation,
    Budget,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Rabi => "rabi",
            ExperimentKind::G2 => "g2",
            ExperimentKind::Homodyne => "homodyne",
            ExperimentKind::Transmission => "transmission",
            ExperimentKind::LinewidthSweep => "linewidth-sweep",
            ExperimentKind::Feedback => "feedback",
            ExperimentKind::Saturation => "saturation",
            ExperimentKind::Budget => "budget",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// File-name prefix; defaults to the experiment kind.
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSection {
    #[serde(default)]
    pub rabi_mhz: f64,
    #[serde(default)]
    pub detuning_mhz: f64,
    pub gamma0_mhz: f64,
    #[serde(default)]
    pub dephasing_mhz: f64,
    #[serde(default)]
    pub extra_decay_mhz: f64,
}

impl From<EmitterSection> for TwoLevelParams {
    fn from(e: EmitterSection) -> Self {
        TwoLevelParams {
            rabi_mhz: e.rabi_mhz,
            detuning_mhz: e.detuning_mhz,
            gamma0_mhz: e.gamma0_mhz,
            dephasing_mhz: e.dephasing_mhz,
            extra_decay_mhz: e.extra_decay_mhz,
        }
    }
}

/// Either `cooperativity` with `total_linewidth_mhz`, or the two rates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSection {
    pub cooperativity: Option<f64>,
    pub total_linewidth_mhz: Option<f64>,
    pub gamma_1d_mhz: Option<f64>,
    pub gamma_prime_mhz: Option<f64>,
}

impl WaveguideSection {
    pub fn coupling(&self) -> Result<WaveguideCoupling> {
        match (self.cooperativity, self.total_linewidth_mhz, self.gamma_1d_mhz, self.gamma_prime_mhz) {
            (Some(c), Some(t), None, None) => WaveguideCoupling::from_cooperativity(c, t).map_err(|e| invalid("waveguide", e)),
            (None, None, Some(g), Some(p)) => WaveguideCoupling::new(g, p).map_err(|e| invalid("waveguide", e)),
            _ => Err(Error::Validation {
                field: "waveguide".into(),
                reason: "give cooperativity and total_linewidth_mhz, or gamma_1d_mhz and gamma_prime_mhz".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub start_mhz: f64,
    pub stop_mhz: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiSection {
    pub duration_ns: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct G2Section {
    pub duration_ns: f64,
    /// Total collection efficiency, split equally between two detectors.
    pub efficiency: f64,
    pub bin_ns: f64,
    pub window_ns: f64,
    #[serde(default)]
    pub background_rate_per_ns: f64,
    #[serde(default)]
    pub jitter_ns: f64,
    #[serde(default = "default_segments")]
    pub segments: usize,
}

fn default_segments() -> usize {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomodyneSection {
    /// Emission rate into the collected mode (MHz).
    pub coupling_mhz: f64,
    #[serde(default)]
    pub lo_amplitude: f64,
    #[serde(default = "default_lo_phase")]
    pub lo_phase_rad: f64,
    #[serde(default = "default_regime")]
    pub regime: Regime,
    /// When set, the LO amplitude is tuned to reach this `g²(0)`.
    pub target_g2: Option<f64>,
    #[serde(default = "default_max_tau")]
    pub max_tau_ns: f64,
    #[serde(default = "default_tau_step")]
    pub tau_step_ns: f64,
}

fn default_lo_phase() -> f64 {
    PI
}

fn default_regime() -> Regime {
    Regime::SteadyState
}

fn default_max_tau() -> f64 {
    60.0
}

fn default_tau_step() -> f64 {
    0.25
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSection {
    pub start_k: f64,
    pub stop_k: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononSection {
    #[serde(default)]
    pub cubic_a_nm: f64,
    pub cubic_b_nm_per_k3: f64,
    pub cubic_t0_k: f64,
    #[serde(default = "default_local_mode")]
    pub local_mode_energy_mev: f64,
}

fn default_local_mode() -> f64 {
    crate::gev::LOCAL_MODE_ENERGY_MEV
}

impl PhononSection {
    pub fn environment(&self, temperature_k: f64) -> PhononEnvironment {
        PhononEnvironment {
            temperature_k,
            cubic_a_nm: self.cubic_a_nm,
            cubic_b_nm_per_k3: self.cubic_b_nm_per_k3,
            cubic_t0_k: self.cubic_t0_k,
            local_mode_energy_mev: self.local_mode_energy_mev,
            ..PhononEnvironment::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionSection {
    pub rms_mhz: f64,
    pub correlation_time_ns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackSection {
    pub probe_scan_width_mhz: f64,
    pub probe_duration_ns: f64,
    pub measure_duration_ns: f64,
    pub recenter_threshold_mhz: f64,
    pub scan_points: usize,
    pub probe_linewidth_mhz: f64,
    pub peak_counts: f64,
    pub total_time_ns: f64,
}

impl FeedbackSection {
    pub fn protocol(&self) -> FeedbackProtocol {
        FeedbackProtocol {
            probe_scan_width_mhz: self.probe_scan_width_mhz,
            probe_duration_ns: self.probe_duration_ns,
            measure_duration_ns: self.measure_duration_ns,
            recenter_threshold_mhz: self.recenter_threshold_mhz,
            scan_points: self.scan_points,
            probe_linewidth_mhz: self.probe_linewidth_mhz,
            peak_counts: self.peak_counts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationSection {
    pub r_inf_mcps: f64,
    pub i_sat_mw: f64,
    pub power_max_mw: f64,
    pub points: usize,
    /// Gaussian noise relative to each rate; the fit is weighted to match.
    #[serde(default)]
    pub noise_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub temperature_k: f64,
    pub linewidth_ghz: f64,
    pub start_ghz: f64,
    pub stop_ghz: f64,
    pub points: usize,
    /// Gaussian noise as a fraction of the tallest line.
    #[serde(default)]
    pub noise_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub lifetime_ns: f64,
    pub zpl_branching: f64,
    pub fiber_coupling: f64,
    pub filter_and_detector: f64,
    pub waveguide_beta: Option<f64>,
    /// Detected rate at saturation; solves for the waveguide beta.
    pub detected_mcps: Option<f64>,
    /// Excitation rate for the forward calculation (needs the beta).
    pub excitation_mcps: Option<f64>,
}

impl BudgetSection {
    pub fn budget(&self, beta: f64) -> PhotonBudget {
        PhotonBudget {
            lifetime_ns: self.lifetime_ns,
            zpl_branching: self.zpl_branching,
            waveguide_beta: beta,
            fiber_coupling: self.fiber_coupling,
            filter_and_detector: self.filter_and_detector,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputSection,
    pub emitter: Option<EmitterSection>,
    pub waveguide: Option<WaveguideSection>,
    pub scan: Option<ScanSection>,
    pub rabi: Option<RabiSection>,
    pub g2: Option<G2Section>,
    pub homodyne: Option<HomodyneSection>,
    pub temperature: Option<TemperatureSection>,
    pub phonon: Option<PhononSection>,
    pub diffusion: Option<DiffusionSection>,
    pub feedback: Option<FeedbackSection>,
    pub saturation: Option<SaturationSection>,
    pub spectrum: Option<SpectrumSection>,
    pub budget: Option<BudgetSection>,
}

fn invalid(field: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::Validation { field: format!("{field}.{name}"), reason },
        other => other,
    }
}

fn missing(section: &str, kind: ExperimentKind) -> Error {
    Error::Validation { field: section.into(), reason: format!("section [{section}] is required for kind {:?}", kind.name()) }
}

pub(crate) fn require<'a, T>(v: &'a Option<T>, section: &str, kind: ExperimentKind) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| missing(section, kind))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation { field: field.into(), reason: format!("must be positive, got {v}") })
    }
}

fn points(field: &str, n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(Error::Validation { field: field.into(), reason: format!("need at least {min} points, got {n}") })
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Validation {
            field: e.span().map(|s| format!("config bytes {}..{}", s.start, s.end)).unwrap_or_else(|| "config".into()),
            reason: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Ingestion { path: path.to_path_buf(), reason: e.to_string() })?;
        Ok((ExperimentConfig::from_toml_str(&text)?, text))
    }

    pub fn prefix(&self) -> String {
        self.output.prefix.clone().unwrap_or_else(|| self.kind.name().replace('-', "_"))
    }

    fn stochastic(&self) -> bool {
        match self.kind {
            ExperimentKind::G2 | ExperimentKind::Feedback => true,
            ExperimentKind::Saturation => self.saturation.is_some_and(|s| s.noise_fraction > 0.0),
            ExperimentKind::Spectrum => self.spectrum.is_some_and(|s| s.noise_fraction > 0.0),
            _ => false,
        }
    }

    pub fn emitter_params(&self) -> Result<TwoLevelParams> {
        let e: TwoLevelParams = (*require(&self.emitter, "emitter", self.kind)?).into();
        e.generator().map_err(|err| invalid("emitter", err))?;
        Ok(e)
    }

    pub fn diffusion_model(&self) -> Result<DiffusionModel> {
        let d = require(&self.diffusion, "diffusion", self.kind)?;
        DiffusionModel::new(d.rms_mhz, d.correlation_time_ns, self.seed.unwrap_or(0)).map_err(|e| invalid("diffusion", e))
    }

    /// Checks that every section the kind reads is present and sane.
    pub fn validate(&self) -> Result<()> {
        let k = self.kind;
        if self.stochastic() && self.seed.is_none() {
            return Err(Error::Validation { field: "seed".into(), reason: format!("kind {:?} is stochastic and needs a seed", k.name()) });
        }
        let scan = |cfg: &Self| -> Result<()> {
            let s = require(&cfg.scan, "scan", k)?;
            points("scan.points", s.points, 2)?;
            if !(s.stop_mhz > s.start_mhz) {
                return Err(Error::Validation { field: "scan.stop_mhz".into(), reason: "must exceed start_mhz".into() });
            }
            Ok(())
        };
        match k {
            ExperimentKind::Transmission => {
                require(&self.waveguide, "waveguide", k)?.coupling()?;
                scan(self)?;
            }
            ExperimentKind::Spectrum => {
                let s = require(&self.spectrum, "spectrum", k)?;
                positive("spectrum.temperature_k", s.temperature_k)?;
                positive("spectrum.linewidth_ghz", s.linewidth_ghz)?;
                points("spectrum.points", s.points, 14)?;
                if !(s.stop_ghz > s.start_ghz) {
                    return Err(Error::Validation { field: "spectrum.stop_ghz".into(), reason: "must exceed start_ghz".into() });
                }
            }
            ExperimentKind::Rabi => {
                self.emitter_params()?;
                let r = require(&self.rabi, "rabi", k)?;
                positive("rabi.duration_ns", r.duration_ns)?;
                points("rabi.points", r.points, 8)?;
            }
            ExperimentKind::G2 => {
                self.emitter_params()?;
                let g = require(&self.g2, "g2", k)?;
                positive("g2.duration_ns", g.duration_ns)?;
                positive("g2.bin_ns", g.bin_ns)?;
                if !(g.window_ns >= g.bin_ns) {
                    return Err(Error::Validation { field: "g2.window_ns".into(), reason: "must be at least bin_ns".into() });
                }
                if !(0.0..=1.0).contains(&g.efficiency) {
                    return Err(Error::Validation { field: "g2.efficiency".into(), reason: "must lie in [0, 1]".into() });
                }
                if g.segments == 0 {
                    return Err(Error::Validation { field: "g2.segments".into(), reason: "must be at least 1".into() });
                }
            }
            ExperimentKind::Homodyne => {
                self.emitter_params()?;
                let h = require(&self.homodyne, "homodyne", k)?;
                positive("homodyne.coupling_mhz", h.coupling_mhz)?;
                positive("homodyne.max_tau_ns", h.max_tau_ns)?;
                positive("homodyne.tau_step_ns", h.tau_step_ns)?;
                scan(self)?;
            }
            ExperimentKind::LinewidthSweep => {
                let t = require(&self.temperature, "temperature", k)?;
                require(&self.phonon, "phonon", k)?;
                points("temperature.points", t.points, 2)?;
                if !(t.stop_k > t.start_k) {
                    return Err(Error::Validation { field: "temperature.stop_k".into(), reason: "must exceed start_k".into() });
                }
            }
            ExperimentKind::Feedback => {
                self.diffusion_model()?;
                let f = require(&self.feedback, "feedback", k)?;
                f.protocol().validate().map_err(|e| invalid("feedback", e))?;
                positive("feedback.total_time_ns", f.total_time_ns)?;
            }
            ExperimentKind::Saturation => {
                let e = self.emitter_params()?;
                positive("emitter.gamma0_mhz", e.gamma0_mhz)?;
                let s = require(&self.saturation, "saturation", k)?;
                positive("saturation.r_inf_mcps", s.r_inf_mcps)?;
                positive("saturation.i_sat_mw", s.i_sat_mw)?;
                positive("saturation.power_max_mw", s.power_max_mw)?;
                points("saturation.points", s.points, 3)?;
            }
            ExperimentKind::Budget => {
                let b = require(&self.budget, "budget", k)?;
                b.budget(b.waveguide_beta.unwrap_or(0.0)).validate()?;
                if b.waveguide_beta.is_none() && b.detected_mcps.is_none() {
                    return Err(Error::Validation {
                        field: "budget".into(),
                        reason: "give waveguide_beta or detected_mcps (to solve for it)".into(),
                    });
                }
            }
        }
        Ok(())
    }
}
