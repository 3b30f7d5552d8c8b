//! Tabulated observables shared across modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real observable tabulated against detuning (MHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub detuning_mhz: Vec<f64>,
    pub values: Vec<f64>,
    /// Column name used when the spectrum is written out.
    pub quantity: String,
}

impl Spectrum {
    pub fn new(detuning_mhz: Vec<f64>, values: Vec<f64>, quantity: impl Into<String>) -> Self {
        assert_eq!(detuning_mhz.len(), values.len());
        Spectrum { detuning_mhz, values, quantity: quantity.into() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Second-order intensity correlation against delay (ns).
///
/// `g2[k] = counts[k] / normalization[k]`. For histograms, `counts` are raw
/// coincidences and `normalization` the coincidences expected from
/// uncorrelated streams; for master-equation results `counts` holds the
/// unnormalized correlation and `normalization` the squared mean intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFunction {
    pub taus: Vec<f64>,
    pub g2: Vec<f64>,
    pub counts: Vec<f64>,
    pub normalization: Vec<f64>,
}

impl CorrelationFunction {
    pub fn from_counts(taus: Vec<f64>, counts: Vec<f64>, normalization: Vec<f64>) -> Result<Self> {
        if taus.len() != counts.len() || counts.len() != normalization.len() {
            return Err(Error::param("correlation", "column lengths differ"));
        }
        if normalization.iter().any(|&n| !(n > 0.0)) {
            return Err(Error::Normalization("non-positive normalization".into()));
        }
        let g2 = counts.iter().zip(&normalization).map(|(c, n)| c / n).collect();
        Ok(CorrelationFunction { taus, g2, counts, normalization })
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Value at the delay closest to zero.
    pub fn at_zero(&self) -> f64 {
        let k = self
            .taus
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        self.g2[k]
    }

    /// One-sigma Poisson error per bin, `√counts / normalization`.
    pub fn poisson_errors(&self) -> Vec<f64> {
        self.counts.iter().zip(&self.normalization).map(|(c, n)| c.max(1.0).sqrt() / n).collect()
    }
}
