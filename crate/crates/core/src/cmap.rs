//! Correlation maps between spectrogram subsignals and their reduction to a
//! one-dimensional band selector.
//!
//! The processing chain is `build_cm` -> `enhance_cm` -> `median_filter_2d`
//! (optional) -> `aggregate`. Each step checks the stage tag of its input.

use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corr::{CorrKind, CorrMeasure, RowEstimator, RowScratch};
use crate::error::{Error, Result};
use crate::spectro::Spectrogram;
use crate::stats::{cmp_f64, quantile_sorted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Raw,
    Enhanced,
    MedianFiltered,
}

/// Padding used by the median filter outside the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Border {
    #[default]
    Zero,
    Replicate,
}

impl std::str::FromStr for Border {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero" => Ok(Border::Zero),
            "replicate" => Ok(Border::Replicate),
            other => Err(Error::invalid(format!("unknown border mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationMap {
    /// Symmetric `F x F` matrix.
    pub values: Array2<f64>,
    pub freqs: Vec<f64>,
    pub measure: CorrMeasure,
    pub stage: Stage,
    /// Number of unordered off-diagonal pairs whose estimate was degenerate.
    pub degenerate_pairs: usize,
}

impl CorrelationMap {
    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (i + 1..n).all(|k| self.values[[i, k]] == self.values[[k, i]]))
    }
}

/// Band selector over the frequency axis, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorCurve {
    pub values: Vec<f64>,
    pub freqs: Vec<f64>,
}

impl SelectorCurve {
    /// An all-zero curve: nothing informative was found.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the first maximum.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmax_freq(&self) -> f64 {
        self.freqs[self.argmax()]
    }

    /// Divides by the maximum so the peak is exactly 1. All-zero curves are
    /// left untouched.
    pub fn normalize(&mut self) {
        let m = self.max();
        if m > 0.0 {
            for v in &mut self.values {
                *v /= m;
            }
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Builds the raw map of pairwise correlations between spectrogram rows,
/// evaluating each unordered pair once and mirroring it. Rows are processed
/// in parallel.
pub fn build_cm(spec: &Spectrogram, measure: CorrMeasure) -> Result<CorrelationMap> {
    build(spec, measure, true)
}

/// [`build_cm`] on the calling thread only.
pub fn build_cm_serial(spec: &Spectrogram, measure: CorrMeasure) -> Result<CorrelationMap> {
    build(spec, measure, false)
}

fn build(spec: &Spectrogram, measure: CorrMeasure, parallel: bool) -> Result<CorrelationMap> {
    if spec.num_frames() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: spec.num_frames(),
        });
    }
    if measure.kind == CorrKind::Pearson {
        measure.validate()?;
        return Ok(build_pearson(spec, measure));
    }
    let mag = spec.mag.as_standard_layout();
    let rows: Vec<&[f64]> = mag
        .rows()
        .into_iter()
        .map(|r| r.to_slice().expect("standard layout rows are contiguous"))
        .collect();
    let f = rows.len();
    let est = RowEstimator::new(rows, measure)?;

    let upper_row = |i: usize| -> (Vec<f64>, usize) {
        let mut scratch = RowScratch::default();
        let mut degenerate = 0;
        let vals = (i + 1..f)
            .map(|k| {
                let e = est.estimate(i, k, &mut scratch);
                degenerate += usize::from(e.degenerate);
                e.value
            })
            .collect();
        (vals, degenerate)
    };
    let upper: Vec<(Vec<f64>, usize)> = if parallel {
        (0..f).into_par_iter().map(upper_row).collect()
    } else {
        (0..f).map(upper_row).collect()
    };

    let mut values = Array2::zeros((f, f));
    let mut degenerate_pairs = 0;
    for (i, (row, deg)) in upper.into_iter().enumerate() {
        values[[i, i]] = if est.row_is_degenerate(i) { 0.0 } else { 1.0 };
        for (off, v) in row.into_iter().enumerate() {
            let k = i + 1 + off;
            values[[i, k]] = v;
            values[[k, i]] = v;
        }
        degenerate_pairs += deg;
    }
    Ok(CorrelationMap {
        values,
        freqs: spec.freqs.clone(),
        measure,
        stage: Stage::Raw,
        degenerate_pairs,
    })
}

/// Pearson maps come from one blocked matrix product of the centered rows,
/// `C C^T`, scaled by the row norms. Only the upper triangle of the product
/// is read, so the result is exactly symmetric.
fn build_pearson(spec: &Spectrogram, measure: CorrMeasure) -> CorrelationMap {
    let (f, t) = spec.mag.dim();
    let mut centered = Array2::<f64>::zeros((f, t));
    let mut norms = vec![0.0; f];
    for (i, row) in spec.mag.rows().into_iter().enumerate() {
        let first = row[0];
        if row.iter().all(|&v| v == first) {
            continue;
        }
        let mean = row.sum() / t as f64;
        let mut out = centered.row_mut(i);
        out.zip_mut_with(&row, |c, &v| *c = v - mean);
        norms[i] = out.dot(&out).sqrt();
    }
    let gram = centered.dot(&centered.t());

    let mut values = Array2::zeros((f, f));
    let mut degenerate_pairs = 0;
    for i in 0..f {
        values[[i, i]] = if norms[i] == 0.0 { 0.0 } else { 1.0 };
        for k in i + 1..f {
            let v = if norms[i] == 0.0 || norms[k] == 0.0 {
                degenerate_pairs += 1;
                0.0
            } else {
                (gram[[i, k]] / (norms[i] * norms[k])).clamp(-1.0, 1.0)
            };
            values[[i, k]] = v;
            values[[k, i]] = v;
        }
    }
    CorrelationMap {
        values,
        freqs: spec.freqs.clone(),
        measure,
        stage: Stage::Raw,
        degenerate_pairs,
    }
}

/// Zeroes the diagonal, negative correlations and everything below the
/// third quartile of the off-diagonal upper-triangle values.
pub fn enhance_cm(cm: &CorrelationMap) -> Result<CorrelationMap> {
    if cm.stage != Stage::Raw {
        return Err(Error::Stage {
            found: cm.stage,
            expected: "a raw map",
        });
    }
    let n = cm.size();
    let mut upper: Vec<f64> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for k in i + 1..n {
            upper.push(cm.values[[i, k]]);
        }
    }
    upper.sort_by(cmp_f64);
    let q3 = quantile_sorted(&upper, 0.75);
    let mut values = cm.values.clone();
    for ((i, k), v) in values.indexed_iter_mut() {
        if i == k || *v < 0.0 || *v < q3 {
            *v = 0.0;
        }
    }
    Ok(CorrelationMap {
        values,
        stage: Stage::Enhanced,
        ..cm.clone()
    })
}

fn median9(mut w: [f64; 9]) -> f64 {
    w.sort_unstable_by(cmp_f64);
    w[4]
}

/// 3x3 median filter. The result is re-symmetrized as `(M + M^T) / 2` and
/// its diagonal is cleared again for enhanced input.
pub fn median_filter_2d(cm: &CorrelationMap, border: Border) -> Result<CorrelationMap> {
    if !matches!(cm.stage, Stage::Raw | Stage::Enhanced) {
        return Err(Error::Stage {
            found: cm.stage,
            expected: "a raw or enhanced map",
        });
    }
    let (rows, cols) = cm.values.dim();
    let src = &cm.values;
    let at = |i: isize, k: isize| -> f64 {
        let inside = i >= 0 && k >= 0 && (i as usize) < rows && (k as usize) < cols;
        match (inside, border) {
            (true, _) => src[[i as usize, k as usize]],
            (false, Border::Zero) => 0.0,
            (false, Border::Replicate) => {
                let ii = i.clamp(0, rows as isize - 1) as usize;
                let kk = k.clamp(0, cols as isize - 1) as usize;
                src[[ii, kk]]
            }
        }
    };
    let mut filtered = Array2::zeros((rows, cols));
    for i in 0..rows {
        for k in 0..cols {
            let mut w = [0.0; 9];
            let mut idx = 0;
            for di in -1..=1isize {
                for dk in -1..=1isize {
                    w[idx] = at(i as isize + di, k as isize + dk);
                    idx += 1;
                }
            }
            filtered[[i, k]] = median9(w);
        }
    }
    let mut values = (&filtered + &filtered.t()) * 0.5;
    if cm.stage == Stage::Enhanced {
        values.diag_mut().fill(0.0);
    }
    Ok(CorrelationMap {
        values,
        stage: Stage::MedianFiltered,
        ..cm.clone()
    })
}

/// Collapses the map column-wise to the mean of its strictly positive
/// entries (0 for a column without any), then normalizes by the maximum.
pub fn aggregate(cm: &CorrelationMap) -> Result<SelectorCurve> {
    if cm.stage == Stage::Raw {
        return Err(Error::Stage {
            found: cm.stage,
            expected: "an enhanced or median-filtered map",
        });
    }
    let values = cm
        .values
        .columns()
        .into_iter()
        .map(|col| {
            let (sum, count) = col
                .iter()
                .filter(|&&v| v > 0.0)
                .fold((0.0, 0usize), |(s, c), &v| (s + v, c + 1));
            if count == 0 {
                0.0
            } else {
                sum / count as f64
            }
        })
        .collect();
    let mut curve = SelectorCurve {
        values,
        freqs: cm.freqs.clone(),
    };
    curve.normalize();
    Ok(curve)
}
