//! Configuration, CSV ingestion, photon budgets and the experiment runner.

pub mod budget;
pub mod config;
pub mod runner;
pub mod table;

pub use budget::{detected_rate, max_photon_flux, solve_waveguide_beta, PhotonBudget};
pub use config::{ExperimentConfig, ExperimentKind};
pub use runner::{execute, output_dir, run, write_artifacts, Artifact, RunReport, OUTPUT_DIR_ENV};
pub use table::{correlation_csv, csv_string, ingest_csv, spectrum_csv, spectrum_from_table, CsvSchema, Table};
