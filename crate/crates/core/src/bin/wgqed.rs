use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wgqed::fitting::{fit, model_by_name, MODEL_NAMES};
use wgqed::io::{self, CsvSchema, ExperimentConfig, ExperimentKind};
use wgqed::photon_stats::{g2_from_timetags, read_timetags};
use wgqed::{Error, Result};

#[derive(Parser)]
#[command(name = "wgqed", version, about = "Waveguide-coupled emitter simulation and fitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config and WGQED_OUTPUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a model to a CSV with columns x,y[,sigma].
    Fit {
        model: String,
        csv: PathBuf,
        /// Write the fitted parameters as CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intensity correlation of two time-tag files.
    G2 {
        tags_a: PathBuf,
        tags_b: PathBuf,
        /// Bin width (ns).
        #[arg(long = "bin")]
        bin_ns: f64,
        /// Largest |tau| (ns).
        #[arg(long = "window")]
        window_ns: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the photon budget of a config.
    Budget { config: PathBuf },
}

fn write_or_print(out: Option<&Path>, name: &str, contents: String) -> Result<()> {
    match out {
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_else(|| name.into());
            io::write_artifacts(dir, &[io::Artifact { name: file, contents }])?;
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let (cfg, _) = ExperimentConfig::load(&config)?;
            let report = io::run(&cfg, out.as_deref())?;
            for f in &report.files {
                println!("{}", f.display());
            }
        }
        Command::Fit { model, csv, out } => {
            let m = model_by_name(&model).ok_or_else(|| Error::Validation {
                field: "model".into(),
                reason: format!("unknown model {model:?}; choose one of {}", MODEL_NAMES.join(", ")),
            })?;
            let table = io::ingest_csv(&csv, &CsvSchema::new(&["x", "y"], &["sigma"]))?;
            let x = table.column("x").expect("schema");
            let y = table.column("y").expect("schema");
            let result = fit(&m, x, y, table.column("sigma"), None)?;
            print!("{}", result.report());
            if let Some(path) = out {
                write_or_print(Some(&path), "fit.csv", result.to_csv())?;
            }
        }
        Command::G2 { tags_a, tags_b, bin_ns, window_ns, out } => {
            let (a, _) = read_timetags(&tags_a)?;
            let (b, _) = read_timetags(&tags_b)?;
            let g2 = g2_from_timetags(&a, &b, bin_ns, window_ns)?;
            write_or_print(out.as_deref(), "g2.csv", io::correlation_csv(&g2))?;
        }
        Command::Budget { config } => {
            let (cfg, _) = ExperimentConfig::load(&config)?;
            if cfg.kind != ExperimentKind::Budget {
                return Err(Error::Validation { field: "kind".into(), reason: "expected kind = \"budget\"".into() });
            }
            let (_, results) = io::execute(&cfg)?;
            let text = serde_json::to_string_pretty(&results).map_err(|e| Error::ModelInconsistency(e.to_string()))?;
            println!("{text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
