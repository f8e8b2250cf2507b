//! End-to-end band selection: segmentation, per-segment selectors, their
//! median average, filtering with the selector, and scoring of the result
//! by its squared envelope spectrum.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::baselines::spectral_kurtosis;
use crate::cmap::{aggregate, build_cm, enhance_cm, median_filter_2d, Border, CorrelationMap, SelectorCurve};
use crate::corr::CorrMeasure;
use crate::error::{Error, Result};
use crate::signal::Signal;
use crate::spectro::{spectrogram, StftParams};
use crate::stats::median_in_place;

/// How a segment's selector is derived from its spectrogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Correlation(CorrMeasure),
    SpectralKurtosis,
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Correlation(m) => m.to_string(),
            Method::SpectralKurtosis => "kurtosis".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub segments: usize,
    pub stft: StftParams,
    pub method: Method,
    pub median_filter: bool,
    pub border: Border,
    pub fault_freq: f64,
    pub harmonics: usize,
    /// Half-width of the harmonic peak search window, Hz.
    pub peak_tol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            segments: 1,
            stft: StftParams::default(),
            method: Method::Correlation(CorrMeasure::trimmed(crate::corr::DEFAULT_TRIM_C)),
            median_filter: true,
            border: Border::Zero,
            fault_freq: 30.0,
            harmonics: 10,
            peak_tol: 2.0,
        }
    }
}

impl PipelineConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_measure(self, measure: CorrMeasure) -> Self {
        self.with_method(Method::Correlation(measure))
    }

    pub fn with_median_filter(mut self, on: bool) -> Self {
        self.median_filter = on;
        self
    }

    /// Short name such as `trimmed+mf`.
    pub fn label(&self) -> String {
        let mut s = self.method.label();
        if self.median_filter && matches!(self.method, Method::Correlation(_)) {
            s.push_str("+mf");
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments == 0 {
            return Err(Error::invalid("segment count must be at least 1"));
        }
        if self.harmonics == 0 {
            return Err(Error::invalid("harmonic count must be at least 1"));
        }
        if !(self.fault_freq > 0.0) {
            return Err(Error::invalid("fault frequency must be positive"));
        }
        if !(self.peak_tol >= 0.0) {
            return Err(Error::invalid("peak tolerance must be non-negative"));
        }
        if let Method::Correlation(m) = self.method {
            m.validate()?;
        }
        self.stft.validate()
    }
}

/// Splits into `k` contiguous segments of `floor(N / k)` samples; the
/// remainder at the end is dropped.
pub fn segment(signal: &Signal, k: usize, min_len: usize) -> Result<Vec<Signal>> {
    if k == 0 {
        return Err(Error::invalid("segment count must be at least 1"));
    }
    let len = signal.len() / k;
    if len == 0 || len < min_len {
        return Err(Error::TooShort {
            needed: min_len.max(1) * k,
            got: signal.len(),
        });
    }
    (0..k).map(|i| signal.slice(i * len, len)).collect()
}

fn warn_short_segments(signal: &Signal, cfg: &PipelineConfig) {
    let seg_seconds = (signal.len() / cfg.segments) as f64 / signal.sample_rate();
    let cycles = seg_seconds * cfg.fault_freq;
    if cycles < 10.0 {
        log::warn!(
            "segments hold {cycles:.1} fault cycles; at least 10 are recommended"
        );
    }
}

/// Enhanced correlation maps, one per segment.
pub fn enhanced_maps(signal: &Signal, cfg: &PipelineConfig, measure: CorrMeasure) -> Result<Vec<CorrelationMap>> {
    cfg.validate()?;
    let segments = segment(signal, cfg.segments, cfg.stft.window_len)?;
    segments
        .par_iter()
        .map(|seg| {
            let spec = spectrogram(seg, &cfg.stft)?;
            enhance_cm(&build_cm(&spec, measure)?)
        })
        .collect()
}

/// Per-segment selector from an enhanced map.
pub fn selector_from_map(map: &CorrelationMap, median_filter: bool, border: Border) -> Result<SelectorCurve> {
    if median_filter {
        aggregate(&median_filter_2d(map, border)?)
    } else {
        aggregate(map)
    }
}

/// Element-wise median of equally sized curves, renormalized to peak 1.
pub fn median_of_curves(curves: &[SelectorCurve]) -> Result<SelectorCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::invalid("no selector curves to average"))?;
    let f = first.values.len();
    if let Some(bad) = curves.iter().find(|c| c.values.len() != f) {
        return Err(Error::LengthMismatch {
            left: f,
            right: bad.values.len(),
        });
    }
    let mut column = Vec::with_capacity(curves.len());
    let values = (0..f)
        .map(|i| {
            column.clear();
            column.extend(curves.iter().map(|c| c.values[i]));
            median_in_place(&mut column)
        })
        .collect();
    let mut out = SelectorCurve {
        values,
        freqs: first.freqs.clone(),
    };
    out.normalize();
    Ok(out)
}

/// Per-segment selectors for `cfg`.
pub fn segment_selectors(signal: &Signal, cfg: &PipelineConfig) -> Result<Vec<SelectorCurve>> {
    cfg.validate()?;
    warn_short_segments(signal, cfg);
    match cfg.method {
        Method::Correlation(measure) => enhanced_maps(signal, cfg, measure)?
            .iter()
            .map(|m| selector_from_map(m, cfg.median_filter, cfg.border))
            .collect(),
        Method::SpectralKurtosis => segment(signal, cfg.segments, cfg.stft.window_len)?
            .par_iter()
            .map(|seg| spectral_kurtosis(&spectrogram(seg, &cfg.stft)?))
            .collect(),
    }
}

/// Median of the per-segment selectors. An all-zero result means every
/// segment was degenerate.
pub fn averaged_selector(signal: &Signal, cfg: &PipelineConfig) -> Result<SelectorCurve> {
    median_of_curves(&segment_selectors(signal, cfg)?)
}

/// Linear interpolation of the selector at `freq`, clamped at the ends.
fn gain_at(curve: &SelectorCurve, freq: f64) -> f64 {
    let f = &curve.freqs;
    let v = &curve.values;
    if freq <= f[0] {
        return v[0];
    }
    let last = f.len() - 1;
    if freq >= f[last] {
        return v[last];
    }
    let j = f.partition_point(|&x| x <= freq) - 1;
    let w = (freq - f[j]) / (f[j + 1] - f[j]);
    v[j] + w * (v[j + 1] - v[j])
}

/// Zero-phase filtering: every bin of the full-length FFT is scaled by the
/// selector interpolated at the bin frequency; negative frequencies use the
/// mirrored gain so the output stays real.
pub fn apply_filter(signal: &Signal, curve: &SelectorCurve) -> Result<Signal> {
    let fs = signal.sample_rate();
    if curve.values.len() != curve.freqs.len() || curve.values.len() < 2 {
        return Err(Error::invalid("selector needs at least two points with matching axes"));
    }
    let nyquist = fs / 2.0;
    let df = curve.freqs[1] - curve.freqs[0];
    if curve.freqs[0] > 1e-9 * nyquist || *curve.freqs.last().unwrap() < nyquist - df.abs() * 1e-6 {
        return Err(Error::invalid(format!(
            "selector spans [{}, {}] Hz but must cover [0, {nyquist}] Hz",
            curve.freqs[0],
            curve.freqs.last().unwrap()
        )));
    }
    let n = signal.len();
    let mut buf: Vec<Complex64> = signal.samples().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for k in 0..=n / 2 {
        let g = gain_at(curve, k as f64 * fs / n as f64);
        buf[k] *= g;
        if k != 0 && n - k != k {
            buf[n - k] *= g;
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    debug_assert!({
        let norm: f64 = signal.samples().iter().map(|v| v * v).sum::<f64>().sqrt();
        let imag: f64 = buf.iter().map(|c| c.im * c.im).sum::<f64>().sqrt() * scale;
        imag <= 1e-9 * norm.max(f64::MIN_POSITIVE)
    });
    Signal::new(buf.iter().map(|c| c.re * scale).collect(), fs)
}

/// One-sided amplitude spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub amps: Vec<f64>,
    pub freqs: Vec<f64>,
}

/// Magnitude of the analytic signal, built by zeroing negative frequencies.
pub fn envelope(signal: &Signal) -> Vec<f64> {
    let n = signal.len();
    let mut buf: Vec<Complex64> = signal.samples().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    for (k, c) in buf.iter_mut().enumerate() {
        let h = if k == 0 || (n % 2 == 0 && k == half) {
            1.0
        } else if k <= (n - 1) / 2 {
            2.0
        } else {
            0.0
        };
        *c *= h;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.norm() * scale).collect()
}

/// Squared envelope spectrum: amplitude spectrum (`|X_k| / N`) of the
/// mean-removed squared envelope, bins `0..=N/2` at resolution `fs / N`.
pub fn ses(signal: &Signal) -> Result<Spectrum> {
    let n = signal.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    let fs = signal.sample_rate();
    let sq: Vec<f64> = envelope(signal).iter().map(|e| e * e).collect();
    let mean = sq.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = sq.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let amps = buf[..=n / 2].iter().map(|c| c.norm() * scale).collect();
    let freqs = (0..=n / 2).map(|k| k as f64 * fs / n as f64).collect();
    Ok(Spectrum { amps, freqs })
}

/// ENVSI of one spectrum and the harmonic peaks it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envsi {
    pub value: f64,
    pub harmonic_amps: Vec<f64>,
    pub harmonic_bins: Vec<usize>,
    /// Index of the last harmonic's bin; the denominator sums bins `1..=p_bins`.
    pub p_bins: usize,
}

/// Share of the squared envelope spectrum held by the first `m` fault
/// harmonics. Each harmonic amplitude is the largest bin within `±tol` Hz of
/// `h * fault_freq`, searched strictly after the previous harmonic's bin,
/// with equal maxima resolved toward the nominal frequency. The denominator
/// sums every bin from 1 (DC excluded) up to the `m`-th harmonic's bin.
pub fn envsi(spectrum: &Spectrum, fault_freq: f64, m: usize, tol: f64) -> Result<Envsi> {
    let Spectrum { amps, freqs } = spectrum;
    if amps.len() != freqs.len() || amps.len() < 2 {
        return Err(Error::invalid("spectrum needs at least two bins with matching axes"));
    }
    if m == 0 || !(fault_freq > 0.0) || !(tol >= 0.0) {
        return Err(Error::invalid("ENVSI needs m >= 1, a positive fault frequency and tol >= 0"));
    }
    let df = freqs[1] - freqs[0];
    let last = amps.len() - 1;
    if m as f64 * fault_freq >= freqs[last] {
        return Err(Error::invalid(format!(
            "harmonic {m} of {fault_freq} Hz lies beyond the spectrum ({} Hz)",
            freqs[last]
        )));
    }
    let mut harmonic_amps = Vec::with_capacity(m);
    let mut harmonic_bins = Vec::with_capacity(m);
    let mut prev = 0usize;
    for h in 1..=m {
        let centre = h as f64 * fault_freq;
        let lo = (((centre - tol) / df) - 1e-9).ceil().max(0.0) as usize;
        let hi = ((((centre + tol) / df) + 1e-9).floor() as usize).min(last);
        let lo = lo.max(prev + 1);
        if lo > hi {
            return Err(Error::EmptyHarmonicWindow { harmonic: h });
        }
        let offset = |k: usize| (k as f64 * df - centre).abs();
        let mut best = lo;
        for k in lo..=hi {
            if amps[k] > amps[best] || (amps[k] == amps[best] && offset(k) < offset(best)) {
                best = k;
            }
        }
        harmonic_amps.push(amps[best]);
        harmonic_bins.push(best);
        prev = best;
    }
    let p_bins = prev;
    let total: f64 = amps[1..=p_bins].iter().sum();
    let informative: f64 = harmonic_amps.iter().sum();
    let value = if total > 0.0 { informative / total } else { 0.0 };
    Ok(Envsi {
        value,
        harmonic_amps,
        harmonic_bins,
        p_bins,
    })
}

/// Relative improvement of the filtered ENVSI over the raw one, percent.
pub fn envsi_score(filtered: f64, raw: f64) -> Result<f64> {
    if raw == 0.0 {
        return Err(Error::UndefinedScore);
    }
    Ok((filtered - raw) / raw * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvsiReport {
    pub envsi_raw: f64,
    pub envsi_filtered: f64,
    /// `None` when the raw ENVSI is zero.
    pub score_pct: Option<f64>,
    /// Harmonic peaks of the filtered signal.
    pub harmonic_amps: Vec<f64>,
    pub harmonic_bins: Vec<usize>,
    pub p_bins: usize,
    /// The selector was all zeros, so the signal was left unfiltered.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub selector: SelectorCurve,
    pub filtered: Signal,
    pub ses_raw: Spectrum,
    pub ses_filtered: Spectrum,
    pub report: EnvsiReport,
}

/// ENVSI of a signal's squared envelope spectrum.
pub fn signal_envsi(signal: &Signal, cfg: &PipelineConfig) -> Result<Envsi> {
    envsi(&ses(signal)?, cfg.fault_freq, cfg.harmonics, cfg.peak_tol)
}

/// Filters with `selector` (or passes the signal through when it is all
/// zeros) and scores the result against `raw`.
pub fn evaluate_selector(signal: &Signal, selector: &SelectorCurve, raw: &Envsi, cfg: &PipelineConfig) -> Result<(Signal, Spectrum, EnvsiReport)> {
    let degenerate = selector.is_degenerate();
    let filtered = if degenerate {
        signal.clone()
    } else {
        apply_filter(signal, selector)?
    };
    let spectrum = ses(&filtered)?;
    let f = envsi(&spectrum, cfg.fault_freq, cfg.harmonics, cfg.peak_tol)?;
    let report = EnvsiReport {
        envsi_raw: raw.value,
        envsi_filtered: f.value,
        score_pct: envsi_score(f.value, raw.value).ok(),
        harmonic_amps: f.harmonic_amps,
        harmonic_bins: f.harmonic_bins,
        p_bins: f.p_bins,
        degenerate,
    };
    Ok((filtered, spectrum, report))
}

/// Full chain on one signal.
pub fn analyze(signal: &Signal, cfg: &PipelineConfig) -> Result<Analysis> {
    let selector = averaged_selector(signal, cfg)?;
    let ses_raw = ses(signal)?;
    let raw = envsi(&ses_raw, cfg.fault_freq, cfg.harmonics, cfg.peak_tol)?;
    let (filtered, ses_filtered, report) = evaluate_selector(signal, &selector, &raw, cfg)?;
    Ok(Analysis {
        selector,
        filtered,
        ses_raw,
        ses_filtered,
        report,
    })
}
