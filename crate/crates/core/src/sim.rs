//! Simulated bearing vibration: Gaussian background, cyclic fault impulses and
//! non-cyclic high-energy disturbances, mixed additively.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`. Each component draws from its own ChaCha stream so
//! that changing one component's parameters never perturbs another:
//!
//! | stream | draws                                                      |
//! |--------|------------------------------------------------------------|
//! | 0      | background noise, one standard normal per sample           |
//! | 1      | fractional bandwidth of each cyclic pulse, in time order   |
//! | 2      | per non-cyclic pulse: center time, amplitude, bandwidth    |

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

const STREAM_NOISE: u64 = 0;
const STREAM_SOI: u64 = 1;
const STREAM_NC: u64 = 2;

/// Reference level of the fractional bandwidth, dB.
const BANDWIDTH_REF_DB: f64 = -6.0;
/// Envelope level at which pulses are truncated, dB.
pub const DEFAULT_TRUNC_DB: f64 = -60.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub sample_rate: f64,
    pub duration: f64,
    /// Repetition frequency of the cyclic (fault) impulses, Hz.
    pub fault_freq: f64,
    /// Carrier of the cyclic impulses, Hz.
    pub soi_carrier: f64,
    /// Carrier of the non-cyclic impulses, Hz.
    pub nc_carrier: f64,
    /// Amplitude of cyclic impulses.
    pub aci: f64,
    /// Non-cyclic amplitudes are drawn from `U[0, anci_max]`.
    pub anci_max: f64,
    /// Non-cyclic impulses per second.
    pub nc_count: f64,
    /// Fractional bandwidths are drawn from `U[bw_range.0, bw_range.1]`.
    pub bw_range: (f64, f64),
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            sample_rate: 25_000.0,
            duration: 1.0,
            fault_freq: 30.0,
            soi_carrier: 2_500.0,
            nc_carrier: 6_000.0,
            aci: 3.0,
            anci_max: 20.0,
            nc_count: 15.0,
            bw_range: (0.4, 0.5),
            noise_sigma: 1.0,
            seed: 0,
        }
    }
}

impl SimParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let max_carrier = self.soi_carrier.max(self.nc_carrier);
        if !(self.sample_rate > 2.0 * max_carrier) {
            return Err(Error::invalid(format!(
                "sample rate {} Hz must exceed twice the highest carrier ({} Hz)",
                self.sample_rate, max_carrier
            )));
        }
        if !(self.soi_carrier > 0.0 && self.nc_carrier > 0.0) {
            return Err(Error::invalid("carrier frequencies must be positive"));
        }
        if !(self.fault_freq > 0.0) {
            return Err(Error::invalid("fault frequency must be positive"));
        }
        if !(self.duration > 0.0 && self.duration * self.fault_freq >= 1.0) {
            return Err(Error::invalid(
                "duration must cover at least one fault period",
            ));
        }
        let (lo, hi) = self.bw_range;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(Error::invalid(format!(
                "bandwidth range must satisfy 0 < low <= high < 1, got ({lo}, {hi})"
            )));
        }
        if !(self.aci >= 0.0 && self.anci_max >= 0.0 && self.nc_count >= 0.0) {
            return Err(Error::invalid(
                "impulse amplitudes and counts must be non-negative",
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid("noise sigma must be non-negative"));
        }
        Ok(())
    }

    /// Number of samples generated, `round(duration * sample_rate)`.
    pub fn num_samples(&self) -> usize {
        (self.duration * self.sample_rate).round() as usize
    }
}

/// One placed impulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub center: usize,
    pub amplitude: f64,
    pub bandwidth: f64,
}

#[derive(Debug, Clone)]
pub struct SimulatedSignal {
    /// `x_g + x_soi + x_nc`, summed in that order.
    pub x: Signal,
    pub x_g: Signal,
    pub x_soi: Signal,
    pub x_nc: Signal,
    pub soi_pulses: Vec<Pulse>,
    pub nc_pulses: Vec<Pulse>,
}

/// Gaussian-modulated cosine of unit peak amplitude, sampled at `fs` on a
/// symmetric grid centred on t = 0.
///
/// `bw` is the fractional bandwidth measured at -6 dB; the pulse is cut at
/// the first grid time where the envelope drops below `trunc_db`.
pub fn gauss_pulse(fc: f64, bw: f64, fs: f64, trunc_db: f64) -> Result<Vec<f64>> {
    if !(fc > 0.0 && fc < fs / 2.0) {
        return Err(Error::invalid(format!(
            "pulse carrier {fc} Hz must lie in (0, fs/2 = {} Hz)",
            fs / 2.0
        )));
    }
    if !(bw > 0.0 && bw < 1.0) {
        return Err(Error::invalid(format!(
            "fractional bandwidth must lie in (0, 1), got {bw}"
        )));
    }
    if !(trunc_db < 0.0) {
        return Err(Error::invalid("truncation level must be negative dB"));
    }
    let tv = pulse_time_variance(fc, bw);
    let cutoff = 10f64.powf(trunc_db / 20.0);
    // envelope(t) = cutoff at t = sqrt(-2 tv ln cutoff)
    let tc = (-2.0 * tv * cutoff.ln()).sqrt();
    let mut half = (tc * fs).ceil() as usize;
    while envelope(half as f64 / fs, tv) >= cutoff {
        half += 1;
    }
    while half > 0 && envelope((half - 1) as f64 / fs, tv) < cutoff {
        half -= 1;
    }
    let pulse = (0..=2 * half)
        .map(|i| {
            let t = (i as f64 - half as f64) / fs;
            envelope(t, tv) * (2.0 * PI * fc * t).cos()
        })
        .collect();
    Ok(pulse)
}

/// Time-domain variance `tv` of the Gaussian envelope `exp(-t^2 / (2 tv))`.
pub fn pulse_time_variance(fc: f64, bw: f64) -> f64 {
    let ref_level = 10f64.powf(BANDWIDTH_REF_DB / 20.0);
    let fv = -(bw * fc).powi(2) / (8.0 * ref_level.ln());
    1.0 / (4.0 * PI * PI * fv)
}

fn envelope(t: f64, tv: f64) -> f64 {
    (-t * t / (2.0 * tv)).exp()
}

fn add_pulse(target: &mut [f64], pulse: &[f64], center: usize, amplitude: f64) {
    let half = pulse.len() / 2;
    for (j, &p) in pulse.iter().enumerate() {
        let idx = center as isize + j as isize - half as isize;
        if idx >= 0 && (idx as usize) < target.len() {
            target[idx as usize] += amplitude * p;
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Generates the three-component mixture described by `params`.
pub fn simulate(params: &SimParams) -> Result<SimulatedSignal> {
    params.validate()?;
    let fs = params.sample_rate;
    let n = params.num_samples();
    let (bw_lo, bw_hi) = params.bw_range;

    let mut noise_rng = stream(params.seed, STREAM_NOISE);
    let x_g: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = noise_rng.sample(StandardNormal);
            params.noise_sigma * z
        })
        .collect();

    let mut soi_rng = stream(params.seed, STREAM_SOI);
    let period = (fs / params.fault_freq).round() as usize;
    let mut x_soi = vec![0.0; n];
    let mut soi_pulses = Vec::new();
    let mut center = period;
    while period > 0 && center < n {
        let bw = soi_rng.random_range(bw_lo..=bw_hi);
        let pulse = gauss_pulse(params.soi_carrier, bw, fs, DEFAULT_TRUNC_DB)?;
        add_pulse(&mut x_soi, &pulse, center, params.aci);
        soi_pulses.push(Pulse {
            center,
            amplitude: params.aci,
            bandwidth: bw,
        });
        center += period;
    }

    let mut nc_rng = stream(params.seed, STREAM_NC);
    let count = (params.nc_count * params.duration).round() as usize;
    let mut x_nc = vec![0.0; n];
    let mut nc_pulses = Vec::with_capacity(count);
    for _ in 0..count {
        let t: f64 = nc_rng.random::<f64>() * params.duration;
        let amplitude = nc_rng.random_range(0.0..=params.anci_max);
        let bw = nc_rng.random_range(bw_lo..=bw_hi);
        let center = ((t * fs).round() as usize).min(n - 1);
        let pulse = gauss_pulse(params.nc_carrier, bw, fs, DEFAULT_TRUNC_DB)?;
        add_pulse(&mut x_nc, &pulse, center, amplitude);
        nc_pulses.push(Pulse {
            center,
            amplitude,
            bandwidth: bw,
        });
    }

    let x: Vec<f64> = x_g
        .iter()
        .zip(&x_soi)
        .zip(&x_nc)
        .map(|((g, s), c)| g + s + c)
        .collect();

    Ok(SimulatedSignal {
        x: Signal::new(x, fs)?,
        x_g: Signal::new(x_g, fs)?,
        x_soi: Signal::new(x_soi, fs)?,
        x_nc: Signal::new(x_nc, fs)?,
        soi_pulses,
        nc_pulses,
    })
}
