//! Monte Carlo runs over simulated signals, amplitude sweeps and map timing.
//!
//! Every run `r` simulates with seed `base_seed + r`, so results do not depend
//! on how many workers execute them or in which order.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmap::{build_cm_serial, SelectorCurve};
use crate::corr::CorrMeasure;
use crate::error::{Error, Result};
use crate::pipeline::{
    averaged_selector, enhanced_maps, envsi_score, evaluate_selector, median_of_curves, segment, selector_from_map,
    signal_envsi, Method, PipelineConfig,
};
use crate::sim::{simulate, SimParams};
use crate::spectro::{spectrogram, Spectrogram};
use crate::stats::{cmp_f64, quantile_sorted};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "IFB_THREADS";

/// Worker count: the explicit value if given, else `IFB_THREADS`, else the
/// number of logical CPUs.
pub fn worker_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub runs: usize,
    /// Template; its seed is replaced per run.
    pub sim: SimParams,
    pub pipelines: Vec<PipelineConfig>,
    pub base_seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            runs: 100,
            sim: SimParams::default(),
            pipelines: default_pipelines(),
            base_seed: 0,
        }
    }
}

/// Trimmed, quadrant, Kendall and Pearson, each with and without the median
/// filter.
pub fn default_pipelines() -> Vec<PipelineConfig> {
    let measures = [
        CorrMeasure::trimmed(crate::corr::DEFAULT_TRIM_C),
        CorrMeasure::quadrant(),
        CorrMeasure::kendall(),
        CorrMeasure::pearson(),
    ];
    measures
        .iter()
        .flat_map(|&m| {
            [true, false]
                .map(|mf| PipelineConfig::default().with_measure(m).with_median_filter(mf))
        })
        .collect()
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::invalid("at least one run is required"));
        }
        let first = self
            .pipelines
            .first()
            .ok_or_else(|| Error::invalid("at least one pipeline is required"))?;
        for p in &self.pipelines {
            p.validate()?;
            if p.fault_freq != first.fault_freq || p.harmonics != first.harmonics || p.peak_tol != first.peak_tol {
                return Err(Error::invalid(
                    "all pipelines must share fault frequency, harmonic count and peak tolerance",
                ));
            }
        }
        self.sim.validate()
    }

    pub fn seed_for(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(run as u64)
    }
}

/// Outcome of one pipeline on one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub envsi: f64,
    /// The selector was all zeros and the raw signal was scored instead.
    pub degenerate: bool,
    pub argmax_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub raw: f64,
    /// One entry per pipeline, in configuration order.
    pub outcomes: Vec<PipelineOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub run: usize,
    pub seed: u64,
    pub message: String,
}

/// Distribution of one method's ENVSI over the successful runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub label: String,
    pub samples: Vec<f64>,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub degenerate_runs: usize,
}

impl MethodSummary {
    fn from_samples(label: String, samples: Vec<f64>, degenerate_runs: usize) -> Self {
        let mut sorted = samples.clone();
        sorted.sort_by(cmp_f64);
        let q = |p| if sorted.is_empty() { f64::NAN } else { quantile_sorted(&sorted, p) };
        Self {
            label,
            median: q(0.5),
            q1: q(0.25),
            q3: q(0.75),
            samples,
            degenerate_runs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub runs: usize,
    pub base_seed: u64,
    pub raw: MethodSummary,
    pub methods: Vec<MethodSummary>,
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
}

impl McResult {
    pub fn method(&self, label: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.label == label)
    }

    /// Share of successful runs whose selector for pipeline `index` peaked
    /// inside `[lo, hi]` Hz.
    pub fn argmax_share(&self, index: usize, lo: f64, hi: f64) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        let hits = self
            .records
            .iter()
            .filter(|r| (lo..=hi).contains(&r.outcomes[index].argmax_hz))
            .count();
        hits as f64 / self.records.len() as f64
    }
}

/// Pipelines that share segmentation, STFT and correlation measure reuse the
/// same enhanced maps; only the median-filter step differs.
fn selectors_for_run(signal: &crate::Signal, pipelines: &[PipelineConfig]) -> Result<Vec<SelectorCurve>> {
    let mut maps: Vec<(usize, Vec<crate::CorrelationMap>)> = Vec::new();
    let mut out = Vec::with_capacity(pipelines.len());
    for (i, p) in pipelines.iter().enumerate() {
        let Method::Correlation(measure) = p.method else {
            out.push(averaged_selector(signal, p)?);
            continue;
        };
        let shared = maps.iter().position(|(j, _)| {
            let q = &pipelines[*j];
            q.method == p.method && q.segments == p.segments && q.stft == p.stft
        });
        let idx = match shared {
            Some(idx) => idx,
            None => {
                maps.push((i, enhanced_maps(signal, p, measure)?));
                maps.len() - 1
            }
        };
        let curves = maps[idx]
            .1
            .iter()
            .map(|m| selector_from_map(m, p.median_filter, p.border))
            .collect::<Result<Vec<_>>>()?;
        out.push(median_of_curves(&curves)?);
    }
    Ok(out)
}

fn one_run(cfg: &McConfig, run: usize) -> Result<RunRecord> {
    let seed = cfg.seed_for(run);
    let sim = simulate(&cfg.sim.clone().with_seed(seed))?;
    let scoring = &cfg.pipelines[0];
    let raw = signal_envsi(&sim.x, scoring)?;
    let selectors = selectors_for_run(&sim.x, &cfg.pipelines)?;
    let outcomes = selectors
        .iter()
        .zip(&cfg.pipelines)
        .map(|(sel, p)| {
            let (_, _, report) = evaluate_selector(&sim.x, sel, &raw, p)?;
            Ok(PipelineOutcome {
                envsi: report.envsi_filtered,
                degenerate: report.degenerate,
                argmax_hz: sel.argmax_freq(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RunRecord {
        run,
        seed,
        raw: raw.value,
        outcomes,
    })
}

/// Runs every pipeline on `cfg.runs` independent simulations. Runs execute in
/// parallel on the current rayon pool; a failing run is recorded and skipped.
pub fn mc_run(cfg: &McConfig) -> Result<McResult> {
    cfg.validate()?;
    let results: Vec<Result<RunRecord>> = (0..cfg.runs).into_par_iter().map(|r| one_run(cfg, r)).collect();
    let mut records = Vec::with_capacity(cfg.runs);
    let mut failures = Vec::new();
    for (run, res) in results.into_iter().enumerate() {
        match res {
            Ok(rec) => records.push(rec),
            Err(e) => {
                log::warn!("run {run} failed: {e}");
                failures.push(RunFailure {
                    run,
                    seed: cfg.seed_for(run),
                    message: e.to_string(),
                });
            }
        }
    }
    let raw = MethodSummary::from_samples("raw".into(), records.iter().map(|r| r.raw).collect(), 0);
    let methods = cfg
        .pipelines
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let samples = records.iter().map(|r| r.outcomes[i].envsi).collect();
            let degenerate = records.iter().filter(|r| r.outcomes[i].degenerate).count();
            MethodSummary::from_samples(p.label(), samples, degenerate)
        })
        .collect();
    Ok(McResult {
        runs: cfg.runs,
        base_seed: cfg.base_seed,
        raw,
        methods,
        records,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub aci_values: Vec<f64>,
    pub anci_values: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            aci_values: vec![2.0, 3.0, 4.0, 5.0, 6.0],
            anci_values: vec![10.0, 15.0, 20.0, 25.0, 30.0],
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.aci_values.is_empty() || self.anci_values.is_empty() {
            return Err(Error::invalid("sweep grid axes must be nonempty"));
        }
        let positive = |v: &f64| v.is_finite() && *v > 0.0;
        if !self.aci_values.iter().all(positive) || !self.anci_values.iter().all(positive) {
            return Err(Error::invalid("sweep grid values must be positive"));
        }
        Ok(())
    }
}

/// Per-method matrices indexed `[aci][anci]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub label: String,
    pub median_envsi: Vec<Vec<f64>>,
    /// Score of the median filtered ENVSI against the median raw ENVSI of the
    /// cell; `None` where the raw median is zero. Empty for the raw table.
    pub score_pct: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub raw: SweepTable,
    pub methods: Vec<SweepTable>,
    pub failures: usize,
}

impl SweepResult {
    pub fn table(&self, label: &str) -> Option<&SweepTable> {
        if label == "raw" {
            return Some(&self.raw);
        }
        self.methods.iter().find(|t| t.label == label)
    }
}

/// One Monte Carlo run per (ACI, ANCI) cell, all cells sharing `cfg`'s seeds.
pub fn sweep(cfg: &McConfig, grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    cfg.validate()?;
    let na = grid.aci_values.len();
    let nn = grid.anci_values.len();
    let mut raw = SweepTable {
        label: "raw".into(),
        median_envsi: vec![vec![0.0; nn]; na],
        score_pct: Vec::new(),
    };
    let mut methods: Vec<SweepTable> = cfg
        .pipelines
        .iter()
        .map(|p| SweepTable {
            label: p.label(),
            median_envsi: vec![vec![0.0; nn]; na],
            score_pct: vec![vec![None; nn]; na],
        })
        .collect();
    let mut failures = 0;
    for (i, &aci) in grid.aci_values.iter().enumerate() {
        for (j, &anci) in grid.anci_values.iter().enumerate() {
            let mut cell = cfg.clone();
            cell.sim.aci = aci;
            cell.sim.anci_max = anci;
            log::info!("sweep cell aci={aci} anci={anci}");
            let res = mc_run(&cell)?;
            failures += res.failures.len();
            raw.median_envsi[i][j] = res.raw.median;
            for (table, summary) in methods.iter_mut().zip(&res.methods) {
                table.median_envsi[i][j] = summary.median;
                table.score_pct[i][j] = envsi_score(summary.median, res.raw.median).ok();
            }
        }
    }
    Ok(SweepResult {
        grid: grid.clone(),
        raw,
        methods,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub measure: String,
    pub signal_duration: f64,
    /// Median wall time of one map build, seconds.
    pub wall_time: f64,
    pub f: usize,
    pub t: usize,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub durations: Vec<f64>,
    pub measures: Vec<CorrMeasure>,
    pub repeats: usize,
    pub sim: SimParams,
    pub stft: crate::StftParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            durations: vec![1.0, 2.0, 5.0, 10.0],
            measures: vec![
                CorrMeasure::pearson(),
                CorrMeasure::quadrant(),
                CorrMeasure::trimmed(crate::corr::DEFAULT_TRIM_C),
                CorrMeasure::kendall(),
            ],
            repeats: 3,
            sim: SimParams::default(),
            stft: crate::StftParams::default(),
        }
    }
}

fn time_build(spec: &Spectrogram, measure: CorrMeasure, repeats: usize) -> Result<f64> {
    build_cm_serial(spec, measure)?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        let map = build_cm_serial(spec, measure)?;
        times.push(start.elapsed().as_secs_f64());
        std::hint::black_box(map);
    }
    times.sort_by(cmp_f64);
    Ok(quantile_sorted(&times, 0.5).max(f64::MIN_POSITIVE))
}

/// Single-threaded map build times on the same simulated input for every
/// measure. One untimed warm-up build precedes the timed repeats.
pub fn bench_cm(cfg: &BenchConfig) -> Result<Vec<BenchResult>> {
    if cfg.repeats < 3 {
        return Err(Error::invalid("at least three timed repeats are required"));
    }
    if cfg.durations.is_empty() || cfg.measures.is_empty() {
        return Err(Error::invalid("nothing to benchmark"));
    }
    let mut out = Vec::new();
    for &duration in &cfg.durations {
        let mut params = cfg.sim.clone();
        params.duration = duration;
        let signal = simulate(&params)?.x;
        segment(&signal, 1, cfg.stft.window_len)?;
        let spec = spectrogram(&signal, &cfg.stft)?;
        for &measure in &cfg.measures {
            let wall_time = time_build(&spec, measure, cfg.repeats)?;
            log::info!("bench {measure} {duration}s: {wall_time:.4}s");
            out.push(BenchResult {
                measure: measure.to_string(),
                signal_duration: duration,
                wall_time,
                f: spec.num_bins(),
                t: spec.num_frames(),
                repeats: cfg.repeats,
            });
        }
    }
    Ok(out)
}
