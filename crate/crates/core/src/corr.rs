//! Sample correlation estimators: Pearson, Kendall tau-a, quadrant and
//! trimmed.
//!
//! Every estimator reports a degenerate input (a constant vector, or a
//! trimmed sample with nothing left to correlate) as the value 0 with
//! [`Estimate::degenerate`] set, never as NaN.
//!
//! [`RowEstimator`] evaluates the same estimators over the rows of a matrix
//! with per-row work (centering, medians, sort orders) hoisted out of the
//! pair loop. Both routes share their kernels, so a pair evaluated through
//! either gives bit-identical results.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{cmp_f64, median_in_place};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrKind {
    Pearson,
    Kendall,
    Quadrant,
    Trimmed,
}

impl CorrKind {
    pub const ALL: [CorrKind; 4] = [
        CorrKind::Pearson,
        CorrKind::Kendall,
        CorrKind::Quadrant,
        CorrKind::Trimmed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorrKind::Pearson => "pearson",
            CorrKind::Kendall => "kendall",
            CorrKind::Quadrant => "quadrant",
            CorrKind::Trimmed => "trimmed",
        }
    }
}

impl fmt::Display for CorrKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorrKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" => Ok(CorrKind::Pearson),
            "kendall" => Ok(CorrKind::Kendall),
            "quadrant" => Ok(CorrKind::Quadrant),
            "trimmed" => Ok(CorrKind::Trimmed),
            other => Err(Error::invalid(format!("unknown correlation measure '{other}'"))),
        }
    }
}

/// What happens to observations the trimmed estimator excludes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrimMode {
    /// Excluded entries are set to zero and stay in both vectors.
    #[default]
    Zero,
    /// Excluded entries are removed before the Pearson step.
    Delete,
}

pub const DEFAULT_TRIM_C: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrMeasure {
    pub kind: CorrKind,
    /// Trimming fraction, used by [`CorrKind::Trimmed`] only.
    #[serde(default = "default_trim_c")]
    pub trim_c: f64,
    #[serde(default)]
    pub trim_mode: TrimMode,
}

fn default_trim_c() -> f64 {
    DEFAULT_TRIM_C
}

impl CorrMeasure {
    pub fn new(kind: CorrKind) -> Self {
        Self {
            kind,
            trim_c: DEFAULT_TRIM_C,
            trim_mode: TrimMode::Zero,
        }
    }

    pub fn pearson() -> Self {
        Self::new(CorrKind::Pearson)
    }

    pub fn kendall() -> Self {
        Self::new(CorrKind::Kendall)
    }

    pub fn quadrant() -> Self {
        Self::new(CorrKind::Quadrant)
    }

    pub fn trimmed(c: f64) -> Self {
        Self {
            trim_c: c,
            ..Self::new(CorrKind::Trimmed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_trim(self.trim_c)
    }

    pub fn estimate(&self, x: &[f64], y: &[f64]) -> Result<Estimate> {
        match self.kind {
            CorrKind::Pearson => pcc(x, y),
            CorrKind::Kendall => kcc(x, y),
            CorrKind::Quadrant => qcc(x, y),
            CorrKind::Trimmed => tcc_with_mode(x, y, self.trim_c, self.trim_mode),
        }
    }
}

impl fmt::Display for CorrMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CorrKind::Trimmed if self.trim_c != DEFAULT_TRIM_C || self.trim_mode != TrimMode::Zero => {
                write!(f, "trimmed(c={}", self.trim_c)?;
                if self.trim_mode == TrimMode::Delete {
                    f.write_str(",delete")?;
                }
                f.write_str(")")
            }
            kind => f.write_str(kind.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub degenerate: bool,
}

impl Estimate {
    fn ok(value: f64) -> Self {
        Self {
            value: value.clamp(-1.0, 1.0),
            degenerate: false,
        }
    }

    const DEGENERATE: Estimate = Estimate {
        value: 0.0,
        degenerate: true,
    };
}

fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < min_len {
        return Err(Error::TooShort {
            needed: min_len,
            got: x.len(),
        });
    }
    Ok(())
}

fn check_trim(c: f64) -> Result<()> {
    if !(0.0..0.5).contains(&c) {
        return Err(Error::invalid(format!(
            "trimming constant must lie in [0, 0.5), got {c}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pearson

/// Dot product with eight interleaved accumulators. The summation order
/// depends only on the index, so `dot(a, b) == dot(b, a)` bit for bit.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (p, q) in ca.zip(cb) {
        for j in 0..8 {
            acc[j] += p[j] * q[j];
        }
    }
    let mut tail = 0.0;
    for (p, q) in ra.iter().zip(rb) {
        tail += p * q;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail
}

/// Writes `x - mean(x)` into `out` and returns its Euclidean norm; a
/// constant input yields zeros and norm 0.
fn center_into(x: &[f64], out: &mut Vec<f64>) -> f64 {
    out.clear();
    let first = x[0];
    if x.iter().all(|&v| v == first) {
        out.resize(x.len(), 0.0);
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    out.extend(x.iter().map(|&v| v - mean));
    dot(out, out).sqrt()
}

#[inline]
fn pearson_centered(cx: &[f64], nx: f64, cy: &[f64], ny: f64) -> Estimate {
    if nx == 0.0 || ny == 0.0 {
        return Estimate::DEGENERATE;
    }
    Estimate::ok(dot(cx, cy) / (nx * ny))
}

fn pearson_with(x: &[f64], y: &[f64], cx: &mut Vec<f64>, cy: &mut Vec<f64>) -> Estimate {
    let nx = center_into(x, cx);
    let ny = center_into(y, cy);
    pearson_centered(cx, nx, cy, ny)
}

/// Pearson product-moment correlation.
pub fn pcc(x: &[f64], y: &[f64]) -> Result<Estimate> {
    check_pair(x, y, 2)?;
    Ok(pearson_with(x, y, &mut Vec::new(), &mut Vec::new()))
}

// ---------------------------------------------------------------------------
// Kendall

#[inline]
fn pairs(n: usize) -> i64 {
    (n as i64) * (n as i64 - 1) / 2
}

/// `2 S / (N (N - 1))` with `S` the concordance score.
pub(crate) fn tau_from_score(score: i64, n: usize) -> f64 {
    (2 * score) as f64 / (n as i64 * (n as i64 - 1)) as f64
}

/// Number of tied pairs in an ascending slice.
fn tied_pairs_sorted(sorted: &[f64]) -> i64 {
    let mut total = 0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        total += pairs(end - start);
        start = end;
    }
    total
}

/// Counts pairs `i < j` with `v[i] > v[j]` (strictly), sorting `v`.
fn count_inversions(v: &mut [f64], buf: &mut Vec<f64>) -> i64 {
    const RUN: usize = 16;
    let n = v.len();
    let mut inversions = 0i64;
    for block in v.chunks_mut(RUN) {
        for i in 1..block.len() {
            let cur = block[i];
            let mut j = i;
            while j > 0 && block[j - 1] > cur {
                block[j] = block[j - 1];
                j -= 1;
            }
            inversions += (i - j) as i64;
            block[j] = cur;
        }
    }
    if n <= RUN {
        return inversions;
    }
    buf.clear();
    buf.resize(n, 0.0);
    let mut src: &mut [f64] = v;
    let mut dst: &mut [f64] = buf.as_mut_slice();
    let mut width = RUN;
    while width < n {
        let mut lo = 0;
        while lo < n {
            let mid = (lo + width).min(n);
            let hi = (lo + 2 * width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if src[i] <= src[j] {
                    dst[k] = src[i];
                    i += 1;
                } else {
                    dst[k] = src[j];
                    inversions += (mid - i) as i64;
                    j += 1;
                }
                k += 1;
            }
            dst[k..k + (mid - i)].copy_from_slice(&src[i..mid]);
            k += mid - i;
            dst[k..k + (hi - j)].copy_from_slice(&src[j..hi]);
            lo = hi;
        }
        std::mem::swap(&mut src, &mut dst);
        width *= 2;
    }
    inversions
}

/// Per-vector data reused across every Kendall pair involving it.
#[derive(Debug, Clone)]
struct KendallPrep {
    order: Vec<u32>,
    sorted: Vec<f64>,
    ties: i64,
}

impl KendallPrep {
    fn new(x: &[f64]) -> Self {
        let mut order: Vec<u32> = (0..x.len() as u32).collect();
        order.sort_by(|&a, &b| cmp_f64(&x[a as usize], &x[b as usize]));
        let sorted: Vec<f64> = order.iter().map(|&i| x[i as usize]).collect();
        let ties = tied_pairs_sorted(&sorted);
        Self {
            order,
            sorted,
            ties,
        }
    }
}

#[derive(Debug, Default)]
struct KendallScratch {
    ys: Vec<f64>,
    buf: Vec<f64>,
}

/// Concordance score `sum_{i<j} sgn(x_i - x_j) sgn(y_i - y_j)` in
/// O(N log N): order by (x, y), count strict inversions of y, then correct
/// for ties in x, in y and in both.
fn kendall_score(px: &KendallPrep, py: &KendallPrep, y: &[f64], s: &mut KendallScratch) -> i64 {
    let n = px.order.len();
    s.ys.clear();
    s.ys.extend(px.order.iter().map(|&i| y[i as usize]));
    let mut joint_ties = 0;
    if px.ties > 0 {
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && px.sorted[end] == px.sorted[start] {
                end += 1;
            }
            if end - start > 1 {
                let block = &mut s.ys[start..end];
                block.sort_by(cmp_f64);
                joint_ties += tied_pairs_sorted(block);
            }
            start = end;
        }
    }
    let discordant = count_inversions(&mut s.ys, &mut s.buf);
    pairs(n) - px.ties - py.ties + joint_ties - 2 * discordant
}

fn kendall_estimate(score: i64, n: usize, px: &KendallPrep, py: &KendallPrep) -> Estimate {
    let total = pairs(n);
    if px.ties == total || py.ties == total {
        return Estimate::DEGENERATE;
    }
    Estimate::ok(tau_from_score(score, n))
}

/// Kendall tau-a: ties contribute zero and there is no tie correction in the
/// denominator.
pub fn kcc(x: &[f64], y: &[f64]) -> Result<Estimate> {
    check_pair(x, y, 2)?;
    let px = KendallPrep::new(x);
    let py = KendallPrep::new(y);
    let score = kendall_score(&px, &py, y, &mut KendallScratch::default());
    Ok(kendall_estimate(score, x.len(), &px, &py))
}

// ---------------------------------------------------------------------------
// Quadrant

/// Signs of the deviations from the sample median.
fn median_signs(x: &[f64]) -> Vec<i8> {
    let med = median_in_place(&mut x.to_vec());
    x.iter()
        .map(|&v| {
            if v > med {
                1
            } else if v < med {
                -1
            } else {
                0
            }
        })
        .collect()
}

#[inline]
fn quadrant_signs(sx: &[i8], sy: &[i8]) -> Estimate {
    let all_zero = |s: &[i8]| s.iter().all(|&v| v == 0);
    if all_zero(sx) || all_zero(sy) {
        return Estimate::DEGENERATE;
    }
    let sum: i32 = sx
        .iter()
        .zip(sy)
        .map(|(&a, &b)| i32::from(a * b))
        .sum();
    Estimate::ok(sum as f64 / sx.len() as f64)
}

/// Quadrant correlation, `(1/N) sum sgn((x_i - med x)(y_i - med y))`.
///
/// `sgn(ab) = sgn(a) sgn(b)`, which also sidesteps underflow of the product.
pub fn qcc(x: &[f64], y: &[f64]) -> Result<Estimate> {
    check_pair(x, y, 1)?;
    Ok(quadrant_signs(&median_signs(x), &median_signs(y)))
}

// ---------------------------------------------------------------------------
// Trimmed

#[derive(Debug, Default)]
struct TrimScratch {
    z: Vec<f64>,
    sel: Vec<f64>,
    zx: Vec<f64>,
    zy: Vec<f64>,
    cx: Vec<f64>,
    cy: Vec<f64>,
}

fn trimmed_with(x: &[f64], y: &[f64], c: f64, mode: TrimMode, s: &mut TrimScratch) -> Estimate {
    let n = x.len();
    let k = (c * n as f64).floor() as usize;
    if k == 0 {
        return pearson_with(x, y, &mut s.cx, &mut s.cy);
    }
    s.z.clear();
    s.z.extend(x.iter().zip(y).map(|(a, b)| a * b));
    s.sel.clear();
    s.sel.extend_from_slice(&s.z);
    // k-th smallest and k-th largest of z (1-indexed z^(k), z^(N-k+1))
    let lower = *s.sel.select_nth_unstable_by(k - 1, cmp_f64).1;
    let upper = *s.sel.select_nth_unstable_by(n - k, cmp_f64).1;
    s.zx.clear();
    s.zy.clear();
    match mode {
        TrimMode::Zero => {
            for ((&a, &b), &z) in x.iter().zip(y).zip(&s.z) {
                let keep = lower < z && z < upper;
                s.zx.push(if keep { a } else { 0.0 });
                s.zy.push(if keep { b } else { 0.0 });
            }
        }
        TrimMode::Delete => {
            for ((&a, &b), &z) in x.iter().zip(y).zip(&s.z) {
                if lower < z && z < upper {
                    s.zx.push(a);
                    s.zy.push(b);
                }
            }
            if s.zx.len() < 2 {
                return Estimate::DEGENERATE;
            }
        }
    }
    pearson_with(&s.zx, &s.zy, &mut s.cx, &mut s.cy)
}

/// Trimmed correlation with zeroing of excluded observations.
pub fn tcc(x: &[f64], y: &[f64], c: f64) -> Result<Estimate> {
    tcc_with_mode(x, y, c, TrimMode::Zero)
}

/// Trimmed correlation: Pearson correlation of `x` and `y` after excluding
/// every observation whose product `x_i y_i` is not strictly between the
/// `k`-th smallest and `k`-th largest products, `k = floor(c N)`.
pub fn tcc_with_mode(x: &[f64], y: &[f64], c: f64, mode: TrimMode) -> Result<Estimate> {
    check_pair(x, y, 2)?;
    check_trim(c)?;
    Ok(trimmed_with(x, y, c, mode, &mut TrimScratch::default()))
}

/// Inclusion indicator used by the trimmed estimator (1 = kept).
pub fn trim_indicator(x: &[f64], y: &[f64], c: f64) -> Result<Vec<bool>> {
    check_pair(x, y, 2)?;
    check_trim(c)?;
    let n = x.len();
    let k = (c * n as f64).floor() as usize;
    if k == 0 {
        return Ok(vec![true; n]);
    }
    let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let mut sorted = z.clone();
    sorted.sort_by(cmp_f64);
    let (lower, upper) = (sorted[k - 1], sorted[n - k]);
    Ok(z.iter().map(|&v| lower < v && v < upper).collect())
}

// ---------------------------------------------------------------------------
// Row-wise evaluation

enum Prepared {
    Pearson { centered: Vec<Vec<f64>>, norms: Vec<f64> },
    Kendall(Vec<KendallPrep>),
    Quadrant(Vec<Vec<i8>>),
    Trimmed,
}

/// Evaluates one measure over pairs of equal-length rows.
pub struct RowEstimator<'a> {
    rows: Vec<&'a [f64]>,
    measure: CorrMeasure,
    prepared: Prepared,
}

/// Per-thread working memory for [`RowEstimator::estimate`].
#[derive(Debug, Default)]
pub struct RowScratch {
    kendall: KendallScratch,
    trim: TrimScratch,
}

impl<'a> RowEstimator<'a> {
    pub fn new(rows: Vec<&'a [f64]>, measure: CorrMeasure) -> Result<Self> {
        measure.validate()?;
        let len = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != len) {
            return Err(Error::LengthMismatch {
                left: len,
                right: bad.len(),
            });
        }
        let min_len = if measure.kind == CorrKind::Quadrant { 1 } else { 2 };
        if !rows.is_empty() && len < min_len {
            return Err(Error::TooShort {
                needed: min_len,
                got: len,
            });
        }
        let prepared = match measure.kind {
            CorrKind::Pearson => {
                let mut centered = Vec::with_capacity(rows.len());
                let mut norms = Vec::with_capacity(rows.len());
                for r in &rows {
                    let mut c = Vec::new();
                    norms.push(center_into(r, &mut c));
                    centered.push(c);
                }
                Prepared::Pearson { centered, norms }
            }
            CorrKind::Kendall => Prepared::Kendall(rows.iter().map(|r| KendallPrep::new(r)).collect()),
            CorrKind::Quadrant => Prepared::Quadrant(rows.iter().map(|r| median_signs(r)).collect()),
            CorrKind::Trimmed => Prepared::Trimmed,
        };
        Ok(Self {
            rows,
            measure,
            prepared,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn measure(&self) -> CorrMeasure {
        self.measure
    }

    /// True when row `i` alone already makes every pair with it degenerate.
    pub fn row_is_degenerate(&self, i: usize) -> bool {
        let r = self.rows[i];
        r.iter().all(|&v| v == r[0])
    }

    pub fn estimate(&self, i: usize, k: usize, scratch: &mut RowScratch) -> Estimate {
        match &self.prepared {
            Prepared::Pearson { centered, norms } => {
                pearson_centered(&centered[i], norms[i], &centered[k], norms[k])
            }
            Prepared::Kendall(prep) => {
                let score = kendall_score(&prep[i], &prep[k], self.rows[k], &mut scratch.kendall);
                kendall_estimate(score, self.rows[i].len(), &prep[i], &prep[k])
            }
            Prepared::Quadrant(signs) => quadrant_signs(&signs[i], &signs[k]),
            Prepared::Trimmed => trimmed_with(
                self.rows[i],
                self.rows[k],
                self.measure.trim_c,
                self.measure.trim_mode,
                &mut scratch.trim,
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Literal double loop over all pairs.
    fn kendall_naive(x: &[f64], y: &[f64]) -> f64 {
        let sgn = |v: f64| {
            if v > 0.0 {
                1i64
            } else if v < 0.0 {
                -1
            } else {
                0
            }
        };
        let n = x.len();
        let mut s = 0i64;
        for i in 0..n - 1 {
            for j in i + 1..n {
                s += sgn(x[i] - x[j]) * sgn(y[i] - y[j]);
            }
        }
        2.0 * s as f64 / (n * (n - 1)) as f64
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 5.0, 4.0];
        // sxy = 3.5, sxx = 5, syy = 4.75
        let expected = 3.5 / (5.0f64 * 4.75).sqrt();
        assert!((pcc(&x, &y).unwrap().value - expected).abs() < 1e-14);
        assert!((expected - 0.7182).abs() < 1e-4);
        assert!((pcc(&x, &x).unwrap().value - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pcc(&x, &neg).unwrap().value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_degenerate_and_errors() {
        let e = pcc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.value, 0.0);
        let e = pcc(&[0.1, 0.1, 0.1], &[1.0, 2.0, 3.0]).unwrap();
        assert!(e.degenerate);
        assert!(matches!(
            pcc(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(pcc(&[1.0], &[1.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn kendall_examples() {
        assert_eq!(kcc(&[1.0, 2.0, 3.0], &[4.0, 5.0, 9.0]).unwrap().value, 1.0);
        assert_eq!(kcc(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap().value, -1.0);
        let v = kcc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap().value;
        assert_eq!(v, 2.0 / 3.0);
    }

    #[test]
    fn kendall_matches_naive_with_ties() {
        let x = [1.0, 1.0, 2.0, 2.0, 3.0, 0.0, 1.0, 5.0, 5.0, 5.0];
        let y = [0.0, 0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 5.0, 4.0, 5.0];
        assert_eq!(kcc(&x, &y).unwrap().value, kendall_naive(&x, &y));
        let long_x: Vec<f64> = (0..300).map(|i| ((i * 37) % 23) as f64).collect();
        let long_y: Vec<f64> = (0..300).map(|i| ((i * 11) % 17) as f64).collect();
        assert_eq!(
            kcc(&long_x, &long_y).unwrap().value,
            kendall_naive(&long_x, &long_y)
        );
    }

    #[test]
    fn quadrant_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert_eq!(qcc(&x, &y).unwrap().value, -0.8);
        assert_eq!(qcc(&x, &x).unwrap().value, 0.8);
        assert!(qcc(&[2.0, 2.0], &[1.0, 3.0]).unwrap().degenerate);
    }

    #[test]
    fn trimmed_hand_example() {
        // z = [2, 2, 12, 12, 30, -10000], k = 1: both extremes go.
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 100.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, -100.0];
        let keep = trim_indicator(&x, &y, 0.2).unwrap();
        assert_eq!(keep, vec![true, true, true, true, false, false]);
        let expected = pcc(&[1.0, 2.0, 3.0, 4.0, 0.0, 0.0], &[2.0, 1.0, 4.0, 3.0, 0.0, 0.0]).unwrap();
        assert_eq!(tcc(&x, &y, 0.2).unwrap(), expected);
    }

    #[test]
    fn trimmed_zero_c_is_pearson() {
        let x = [0.3, 1.7, -2.0, 4.4, 0.1];
        let y = [1.0, 0.2, -0.5, 3.3, 0.0];
        assert_eq!(tcc(&x, &y, 0.0).unwrap(), pcc(&x, &y).unwrap());
    }

    #[test]
    fn trimmed_delete_mode_drops_entries() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 100.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, -100.0];
        let e = tcc_with_mode(&x, &y, 0.2, TrimMode::Delete).unwrap();
        let expected = pcc(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert_eq!(e, expected);
        let e = tcc_with_mode(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 0.4, TrimMode::Delete).unwrap();
        assert!(e.degenerate);
    }

    #[test]
    fn trimmed_rejects_bad_c() {
        assert!(tcc(&[1.0, 2.0], &[1.0, 2.0], 0.5).is_err());
        assert!(tcc(&[1.0, 2.0], &[1.0, 2.0], -0.1).is_err());
    }

    #[test]
    fn inversion_count_matches_quadratic() {
        let v: Vec<f64> = (0..200).map(|i| ((i * 7919) % 101) as f64).collect();
        let mut brute = 0i64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    brute += 1;
                }
            }
        }
        let mut w = v.clone();
        assert_eq!(count_inversions(&mut w, &mut Vec::new()), brute);
    }

    #[test]
    fn row_estimator_matches_scalar_functions() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|r| (0..64).map(|t| (((t * (r + 3)) % 17) as f64).sin() + r as f64).collect())
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        for kind in CorrKind::ALL {
            let m = CorrMeasure::new(kind);
            let est = RowEstimator::new(refs.clone(), m).unwrap();
            let mut scratch = RowScratch::default();
            for i in 0..5 {
                for k in 0..5 {
                    assert_eq!(est.estimate(i, k, &mut scratch), m.estimate(&rows[i], &rows[k]).unwrap());
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("Kendall".parse::<CorrKind>().unwrap(), CorrKind::Kendall);
        assert!("spearman".parse::<CorrKind>().is_err());
        assert_eq!(CorrMeasure::trimmed(0.03).to_string(), "trimmed");
        assert_eq!(CorrMeasure::trimmed(0.05).to_string(), "trimmed(c=0.05)");
    }
}
