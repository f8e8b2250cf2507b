//! Informative frequency band selection for vibration signals with impulsive,
//! heavy-tailed noise.
//!
//! A signal's spectrogram rows are correlated pairwise with a robust
//! estimator (trimmed, quadrant or Kendall; Pearson for reference), the
//! resulting map is thresholded and median filtered, and its columns are
//! collapsed into a selector curve in `[0, 1]` that serves as the amplitude
//! response of a zero-phase filter. Filtering quality is scored by ENVSI, the
//! share of the squared envelope spectrum carried by the fault harmonics.
//!
//! ```no_run
//! use ifb_core::{pipeline, sim};
//!
//! let signal = sim::simulate(&sim::SimParams::default().with_seed(1)).unwrap().x;
//! let analysis = pipeline::analyze(&signal, &pipeline::PipelineConfig::default()).unwrap();
//! println!("ENVSI {} -> {}", analysis.report.envsi_raw, analysis.report.envsi_filtered);
//! ```

// Parameter checks are written as negated comparisons so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod cmap;
pub mod config;
pub mod corr;
pub mod error;
pub mod harness;
pub mod io;
pub mod pipeline;
pub mod signal;
pub mod sim;
pub mod spectro;
pub mod stats;

pub use cmap::{CorrelationMap, SelectorCurve, Stage};
pub use corr::{CorrKind, CorrMeasure, Estimate, TrimMode};
pub use error::{Error, Result};
pub use pipeline::{EnvsiReport, Method, PipelineConfig};
pub use signal::Signal;
pub use sim::{SimParams, SimulatedSignal};
pub use spectro::{Spectrogram, StftParams};
