//! Spectral kurtosis selector, kept as a reference point for the
//! correlation-based selectors.

use crate::cmap::SelectorCurve;
use crate::error::{Error, Result};
use crate::spectro::Spectrogram;

/// Sample excess kurtosis `m4 / m2^2 - 3`; 0 for a constant input.
pub fn excess_kurtosis(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if m2 <= 0.0 || x.iter().all(|&v| v == x[0]) {
        return 0.0;
    }
    m4 / (m2 * m2) - 3.0
}

/// Excess kurtosis of each spectrogram row (magnitudes), floored at 0 and
/// normalized by its maximum.
pub fn spectral_kurtosis(spec: &Spectrogram) -> Result<SelectorCurve> {
    if spec.num_frames() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: spec.num_frames(),
        });
    }
    let values = spec
        .mag
        .rows()
        .into_iter()
        .map(|row| excess_kurtosis(&row.to_vec()).max(0.0))
        .collect();
    let mut curve = SelectorCurve {
        values,
        freqs: spec.freqs.clone(),
    };
    curve.normalize();
    Ok(curve)
}
