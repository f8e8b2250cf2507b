//! TOML configuration file shared by the command-line subcommands.
//!
//! ```toml
//! [sim]
//! aci = 3.0
//! anci_max = 20.0
//!
//! [pipeline]
//! measure = "trimmed"
//! trim_c = 0.03
//! segments = 1
//!
//! [mc]
//! runs = 100
//! measures = ["trimmed", "quadrant", "pearson"]
//!
//! [sweep]
//! aci_values = [2, 3, 4, 5, 6]
//! anci_values = [10, 15, 20, 25, 30]
//! ```
//!
//! Every key is optional; command-line flags override file values.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cmap::Border;
use crate::corr::{CorrKind, CorrMeasure, TrimMode, DEFAULT_TRIM_C};
use crate::error::{Error, Result};
use crate::harness::SweepGrid;
use crate::pipeline::{Method, PipelineConfig};
use crate::sim::SimParams;
use crate::spectro::StftParams;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub sim: SimParams,
    pub pipeline: PipelineSection,
    pub mc: McSection,
    pub sweep: SweepGrid,
    pub bench: BenchSection,
}

/// Measure name as accepted on the command line: a correlation kind or
/// `kurtosis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub measure: String,
    pub trim_c: f64,
    pub trim_mode: TrimMode,
    pub segments: usize,
    pub median_filter: bool,
    pub border: Border,
    pub fault_freq: Option<f64>,
    pub harmonics: usize,
    pub peak_tol: f64,
    pub window_len: usize,
    pub overlap: usize,
    pub nfft: usize,
}

impl Default for PipelineSection {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            measure: "trimmed".into(),
            trim_c: DEFAULT_TRIM_C,
            trim_mode: TrimMode::Zero,
            segments: p.segments,
            median_filter: p.median_filter,
            border: p.border,
            fault_freq: None,
            harmonics: p.harmonics,
            peak_tol: p.peak_tol,
            window_len: p.stft.window_len,
            overlap: p.stft.overlap,
            nfft: p.stft.nfft,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub runs: usize,
    pub measures: Vec<String>,
    /// Run each measure with and without the median filter.
    pub both_filter_settings: bool,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            runs: 100,
            measures: ["trimmed", "quadrant", "kendall", "pearson"].map(String::from).to_vec(),
            both_filter_settings: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub durations: Vec<f64>,
    pub measures: Vec<String>,
    pub repeats: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            durations: vec![1.0, 2.0, 5.0, 10.0],
            measures: ["pearson", "quadrant", "trimmed", "kendall"].map(String::from).to_vec(),
            repeats: 3,
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidParameter(msg) => Error::format(path, msg),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(e.to_string()))
    }
}

/// Parses a correlation measure name, applying the trimming settings when
/// the measure is `trimmed`.
pub fn parse_measure(name: &str, trim_c: f64, trim_mode: TrimMode) -> Result<CorrMeasure> {
    let kind: CorrKind = name.parse()?;
    let mut m = CorrMeasure::new(kind);
    if kind == CorrKind::Trimmed {
        m.trim_c = trim_c;
        m.trim_mode = trim_mode;
    }
    m.validate()?;
    Ok(m)
}

/// Parses a measure name or `kurtosis`. The alpha-stable and conditional
/// variance selectors are recognised but not available.
pub fn parse_method(name: &str, trim_c: f64, trim_mode: TrimMode) -> Result<Method> {
    match name.to_ascii_lowercase().as_str() {
        "kurtosis" | "sk" | "spectral-kurtosis" => Ok(Method::SpectralKurtosis),
        "alpha" => Err(Error::NotImplemented("the alpha-stable selector")),
        "cvb" => Err(Error::NotImplemented("the conditional variance selector")),
        other => parse_measure(other, trim_c, trim_mode).map(Method::Correlation),
    }
}

impl PipelineSection {
    pub fn stft(&self) -> StftParams {
        StftParams {
            window_len: self.window_len,
            overlap: self.overlap,
            nfft: self.nfft,
            ..StftParams::default()
        }
    }

    /// Pipeline for `method`, scoring at `fault_freq` unless the section
    /// sets its own.
    pub fn to_pipeline(&self, method: Method, fault_freq: f64) -> Result<PipelineConfig> {
        let cfg = PipelineConfig {
            segments: self.segments,
            stft: self.stft(),
            method,
            median_filter: self.median_filter,
            border: self.border,
            fault_freq: self.fault_freq.unwrap_or(fault_freq),
            harmonics: self.harmonics,
            peak_tol: self.peak_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
