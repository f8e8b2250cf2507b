//! Short-time Fourier transform and magnitude spectrogram.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Hamming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftParams {
    pub window_len: usize,
    pub overlap: usize,
    pub nfft: usize,
    pub window: WindowKind,
}

impl Default for StftParams {
    fn default() -> Self {
        Self {
            window_len: 256,
            overlap: 217,
            nfft: 512,
            window: WindowKind::Hamming,
        }
    }
}

impl StftParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.overlap < self.window_len && self.window_len <= self.nfft) {
            return Err(Error::invalid(format!(
                "STFT parameters need overlap < window_len <= nfft, got {}/{}/{}",
                self.overlap, self.window_len, self.nfft
            )));
        }
        Ok(())
    }

    pub fn hop(&self) -> usize {
        self.window_len - self.overlap
    }

    /// Number of one-sided bins, `nfft / 2 + 1`.
    pub fn num_bins(&self) -> usize {
        self.nfft / 2 + 1
    }

    /// Number of whole frames that fit in `n` samples.
    pub fn num_frames(&self, n: usize) -> usize {
        if n < self.window_len {
            0
        } else {
            (n - self.window_len) / self.hop() + 1
        }
    }

    pub fn window_coefficients(&self) -> Vec<f64> {
        match self.window {
            WindowKind::Hamming => hamming(self.window_len),
        }
    }
}

/// Symmetric Hamming window, `0.54 - 0.46 cos(2 pi k / (n - 1))`.
pub fn hamming(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => {
            let denom = (n - 1) as f64;
            (0..n)
                .map(|k| 0.54 - 0.46 * (2.0 * PI * k as f64 / denom).cos())
                .collect()
        }
    }
}

/// Magnitude spectrogram with its axes. Rows are frequency bins, columns
/// are frames, so `mag.row(i)` is the subsignal of bin `i`.
#[derive(Debug, Clone)]
pub struct Spectrogram {
    pub mag: Array2<f64>,
    pub freqs: Vec<f64>,
    /// Frame centres, seconds.
    pub times: Vec<f64>,
    pub params: StftParams,
}

impl Spectrogram {
    pub fn num_bins(&self) -> usize {
        self.mag.nrows()
    }

    pub fn num_frames(&self) -> usize {
        self.mag.ncols()
    }
}

/// One-sided STFT, `F x T`. Column `j` is the unnormalized DFT of the
/// windowed frame starting at `j * hop`, zero-padded to `nfft`. Frames that
/// would run past the end of the signal are dropped.
pub fn stft(signal: &Signal, params: &StftParams) -> Result<Array2<Complex64>> {
    params.validate()?;
    let x = signal.samples();
    if x.len() < params.window_len {
        return Err(Error::TooShort {
            needed: params.window_len,
            got: x.len(),
        });
    }
    let frames = params.num_frames(x.len());
    let bins = params.num_bins();
    let hop = params.hop();
    let window = params.window_coefficients();
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(params.nfft);

    let columns: Vec<Vec<Complex64>> = (0..frames)
        .into_par_iter()
        .map(|j| {
            let start = j * hop;
            let mut buf = vec![Complex64::new(0.0, 0.0); params.nfft];
            for (b, (&s, &w)) in buf
                .iter_mut()
                .zip(x[start..start + params.window_len].iter().zip(&window))
            {
                b.re = s * w;
            }
            fft.process(&mut buf);
            buf.truncate(bins);
            buf
        })
        .collect();

    let mut out = Array2::zeros((bins, frames));
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

pub fn spectrogram(signal: &Signal, params: &StftParams) -> Result<Spectrogram> {
    let z = stft(signal, params)?;
    let fs = signal.sample_rate();
    let mag = z.mapv(|c| c.norm());
    let freqs = (0..params.num_bins())
        .map(|i| i as f64 * fs / params.nfft as f64)
        .collect();
    let half_window = params.window_len as f64 / 2.0;
    let times = (0..mag.ncols())
        .map(|j| ((j * params.hop()) as f64 + half_window) / fs)
        .collect();
    Ok(Spectrogram {
        mag,
        freqs,
        times,
        params: *params,
    })
}
