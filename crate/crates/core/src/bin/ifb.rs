use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ifb_core::cmap::{aggregate, build_cm, enhance_cm, median_filter_2d, Border};
use ifb_core::config::{parse_measure, parse_method, FileConfig, PipelineSection};
use ifb_core::harness::{self, BenchConfig, McConfig, SweepGrid};
use ifb_core::io::{self, AnalysisReport, RecordingFile, ReportMeta};
use ifb_core::pipeline::{analyze, Method, PipelineConfig};
use ifb_core::sim::{simulate, SimParams};
use ifb_core::spectro::spectrogram;
use ifb_core::{CorrKind, CorrMeasure, Signal, TrimMode};

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;

/// Informative frequency band selection for impulsive vibration signals.
#[derive(Parser, Debug)]
#[command(name = "ifb", version = io::VERSION, about)]
struct Cli {
    /// Seed for simulations; Monte Carlo run r uses seed + r.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving all output files.
    #[arg(long, global = true, default_value = "ifb-out")]
    out_dir: PathBuf,

    /// Worker threads (default: IFB_THREADS or all CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a simulated signal and its components.
    Simulate(SimulateArgs),
    /// Magnitude spectrogram of a recording as CSV.
    Spectrogram(SpectrogramArgs),
    /// Correlation between two columns of a CSV file.
    Corr(CorrArgs),
    /// Correlation map and band selector of a recording.
    Cmap(CmapArgs),
    /// Select the band, filter, and score with ENVSI.
    Analyze(AnalyzeArgs),
    /// Monte Carlo ENVSI distributions on simulated signals.
    Mc(McArgs),
    /// Monte Carlo medians over a grid of impulse amplitudes.
    Sweep(SweepArgs),
    /// Time correlation-map construction per measure and signal length.
    Bench(BenchArgs),
    /// Write simulated stand-ins for field recordings.
    FetchDemo(FetchDemoArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// WAV (float32 or PCM16) or CSV file.
    input: PathBuf,
    /// Sample rate in Hz; required for CSV.
    #[arg(long)]
    sample_rate: Option<f64>,
    /// Channel (WAV) or column (CSV) index.
    #[arg(long, default_value_t = 0)]
    channel: usize,
}

impl InputArgs {
    fn read(&self) -> anyhow::Result<Signal> {
        let file = RecordingFile::new(&self.input)
            .with_sample_rate(self.sample_rate)
            .with_channel(self.channel);
        Ok(io::read_signal(&file)?)
    }
}

#[derive(Args, Debug, Default)]
struct SimOverrides {
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    aci: Option<f64>,
    #[arg(long)]
    anci: Option<f64>,
}

impl SimOverrides {
    fn apply(&self, p: &mut SimParams) {
        if let Some(v) = self.duration {
            p.duration = v;
        }
        if let Some(v) = self.aci {
            p.aci = v;
        }
        if let Some(v) = self.anci {
            p.anci_max = v;
        }
    }
}

#[derive(Args, Debug, Default)]
struct PipelineArgs {
    /// Segments averaged into the selector.
    #[arg(long)]
    segments: Option<usize>,
    /// Fault frequency scored by ENVSI, Hz.
    #[arg(long)]
    fault_freq: Option<f64>,
    /// Number of harmonics in ENVSI.
    #[arg(long)]
    harmonics: Option<usize>,
    /// Skip the 3x3 median filter on the map.
    #[arg(long)]
    no_median_filter: bool,
    #[arg(long, value_enum)]
    border: Option<BorderArg>,
    /// Trimming fraction of the trimmed measure.
    #[arg(long)]
    trim_c: Option<f64>,
    #[arg(long, value_enum)]
    trim_mode: Option<TrimModeArg>,
    #[arg(long)]
    nfft: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    overlap: Option<usize>,
}

impl PipelineArgs {
    fn apply(&self, s: &mut PipelineSection) {
        if let Some(v) = self.segments {
            s.segments = v;
        }
        if let Some(v) = self.fault_freq {
            s.fault_freq = Some(v);
        }
        if let Some(v) = self.harmonics {
            s.harmonics = v;
        }
        if self.no_median_filter {
            s.median_filter = false;
        }
        if let Some(b) = self.border {
            s.border = b.into();
        }
        if let Some(c) = self.trim_c {
            s.trim_c = c;
        }
        if let Some(m) = self.trim_mode {
            s.trim_mode = m.into();
        }
        if let Some(v) = self.nfft {
            s.nfft = v;
        }
        if let Some(v) = self.window {
            s.window_len = v;
        }
        if let Some(v) = self.overlap {
            s.overlap = v;
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BorderArg {
    Zero,
    Replicate,
}

impl From<BorderArg> for Border {
    fn from(b: BorderArg) -> Self {
        match b {
            BorderArg::Zero => Border::Zero,
            BorderArg::Replicate => Border::Replicate,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TrimModeArg {
    Zero,
    Delete,
}

impl From<TrimModeArg> for TrimMode {
    fn from(m: TrimModeArg) -> Self {
        match m {
            TrimModeArg::Zero => TrimMode::Zero,
            TrimModeArg::Delete => TrimMode::Delete,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum SignalFormat {
    Wav,
    Csv,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    sim: SimOverrides,
    /// Fault (impulse repetition) frequency, Hz.
    #[arg(long)]
    fault_freq: Option<f64>,
    #[arg(long, value_enum, default_value = "wav")]
    format: SignalFormat,
}

#[derive(Args, Debug)]
struct SpectrogramArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct CorrArgs {
    /// CSV file with at least two numeric columns.
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    x: usize,
    #[arg(long, default_value_t = 1)]
    y: usize,
    /// Measures to evaluate (default: all four).
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    #[arg(long)]
    trim_c: Option<f64>,
    #[arg(long, value_enum)]
    trim_mode: Option<TrimModeArg>,
}

#[derive(Args, Debug)]
struct CmapArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    measure: Option<String>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// pearson, kendall, quadrant, trimmed or kurtosis.
    #[arg(long)]
    measure: Option<String>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    #[command(flatten)]
    sim: SimOverrides,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    aci: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    anci: Vec<f64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Signal lengths in seconds.
    #[arg(long, value_delimiter = ',')]
    durations: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    nfft: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Preset {
    CrusherLike,
    TestrigLike,
    All,
}

#[derive(Args, Debug)]
struct FetchDemoArgs {
    #[arg(long, value_enum, default_value = "all")]
    preset: Preset,
}

/// Simulated stand-in for a 6 s crusher bearing recording.
fn crusher_like() -> SimParams {
    SimParams {
        duration: 6.0,
        fault_freq: 30.7,
        ..SimParams::default()
    }
}

/// Simulated stand-in for an acoustic test-rig recording.
fn testrig_like() -> SimParams {
    SimParams {
        sample_rate: 50_000.0,
        duration: 2.0,
        fault_freq: 91.11,
        soi_carrier: 22_500.0,
        nc_carrier: 12_000.0,
        ..SimParams::default()
    }
}

struct Ctx {
    cfg: FileConfig,
    seed: Option<u64>,
    out_dir: PathBuf,
}

impl Ctx {
    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn sim(&self) -> SimParams {
        let mut p = self.cfg.sim.clone();
        if let Some(s) = self.seed {
            p.seed = s;
        }
        p
    }

    fn meta(&self, command: &str, config: &impl Serialize) -> anyhow::Result<ReportMeta> {
        Ok(ReportMeta::new(command, self.seed, config)?)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use ifb_core::Error as E;
    if err.is::<Degenerate>() {
        return EXIT_DEGENERATE;
    }
    match err.chain().find_map(|e| e.downcast_ref::<E>()) {
        Some(E::InvalidParameter(_) | E::NotImplemented(_)) => EXIT_USAGE,
        Some(E::Format { .. } | E::Io { .. } | E::TooShort { .. }) => EXIT_INPUT,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let threads = harness::worker_count(cli.threads);
    let ctx = Ctx {
        cfg,
        seed: cli.seed,
        out_dir: cli.out_dir,
    };
    std::fs::create_dir_all(&ctx.out_dir)
        .with_context(|| format!("cannot create {}", ctx.out_dir.display()))?;
    harness::with_threads(threads, || dispatch(&ctx, cli.command))?
}

fn dispatch(ctx: &Ctx, command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Simulate(a) => cmd_simulate(ctx, a),
        Command::Spectrogram(a) => cmd_spectrogram(ctx, a),
        Command::Corr(a) => cmd_corr(ctx, a),
        Command::Cmap(a) => cmd_cmap(ctx, a),
        Command::Analyze(a) => cmd_analyze(ctx, a),
        Command::Mc(a) => cmd_mc(ctx, a),
        Command::Sweep(a) => cmd_sweep(ctx, a),
        Command::Bench(a) => cmd_bench(ctx, a),
        Command::FetchDemo(a) => cmd_fetch_demo(ctx, a),
    }?;
    Ok(ExitCode::SUCCESS)
}

fn pipeline_section(ctx: &Ctx, args: &PipelineArgs) -> PipelineSection {
    let mut s = ctx.cfg.pipeline.clone();
    args.apply(&mut s);
    s
}

fn cmd_simulate(ctx: &Ctx, a: SimulateArgs) -> anyhow::Result<()> {
    let mut params = ctx.sim();
    a.sim.apply(&mut params);
    if let Some(f) = a.fault_freq {
        params.fault_freq = f;
    }
    let sim = simulate(&params)?;
    let signal_path = ctx.out(match a.format {
        SignalFormat::Wav => "signal.wav",
        SignalFormat::Csv => "signal.csv",
    });
    io::write_signal(&signal_path, &sim.x)?;
    io::write_columns(
        &ctx.out("components.csv"),
        &["x", "x_g", "x_soi", "x_nc"],
        &[sim.x.samples(), sim.x_g.samples(), sim.x_soi.samples(), sim.x_nc.samples()],
    )?;
    #[derive(Serialize)]
    struct Out<'a> {
        meta: ReportMeta,
        samples: usize,
        soi_pulses: &'a [ifb_core::sim::Pulse],
        nc_pulses: &'a [ifb_core::sim::Pulse],
    }
    let mut meta = ctx.meta("simulate", &params)?;
    meta.seed = Some(params.seed);
    io::write_json(
        &ctx.out("simulate.json"),
        &Out {
            meta,
            samples: sim.x.len(),
            soi_pulses: &sim.soi_pulses,
            nc_pulses: &sim.nc_pulses,
        },
    )?;
    println!("wrote {} ({} samples)", signal_path.display(), sim.x.len());
    Ok(())
}

fn cmd_spectrogram(ctx: &Ctx, a: SpectrogramArgs) -> anyhow::Result<()> {
    let signal = a.input.read()?;
    let stft = pipeline_section(ctx, &a.pipeline).stft();
    let spec = spectrogram(&signal, &stft)?;
    let rows: Vec<Vec<f64>> = spec.mag.rows().into_iter().map(|r| r.to_vec()).collect();
    let path = ctx.out("spectrogram.csv");
    io::write_matrix(&path, "freq_hz\\time_s", &spec.freqs, &spec.times, &rows)?;
    println!("{} bins x {} frames -> {}", spec.num_bins(), spec.num_frames(), path.display());
    Ok(())
}

fn cmd_corr(ctx: &Ctx, a: CorrArgs) -> anyhow::Result<()> {
    let read = |col| -> anyhow::Result<Vec<f64>> {
        let file = RecordingFile::new(&a.input).with_sample_rate(Some(1.0)).with_channel(col);
        let mut f = file;
        f.format = Some(io::FileFormat::Csv);
        Ok(io::read_signal(&f)?.into_samples())
    };
    let x = read(a.x)?;
    let y = read(a.y)?;
    let names: Vec<String> = if a.measures.is_empty() {
        CorrKind::ALL.iter().map(|k| k.name().to_string()).collect()
    } else {
        a.measures.clone()
    };
    let trim_c = a.trim_c.unwrap_or(ctx.cfg.pipeline.trim_c);
    let trim_mode = a.trim_mode.map(Into::into).unwrap_or(ctx.cfg.pipeline.trim_mode);
    let mut results = serde_json::Map::new();
    for name in &names {
        let m = parse_measure(name, trim_c, trim_mode)?;
        let e = m.estimate(&x, &y)?;
        println!("{m}\t{}{}", e.value, if e.degenerate { "\t(degenerate)" } else { "" });
        results.insert(m.to_string(), serde_json::json!({ "value": e.value, "degenerate": e.degenerate }));
    }
    let meta = ctx.meta("corr", &serde_json::json!({ "x": a.x, "y": a.y, "trim_c": trim_c, "trim_mode": trim_mode }))?;
    io::write_json(&ctx.out("corr.json"), &serde_json::json!({ "meta": meta, "results": results }))?;
    Ok(())
}

fn cmd_cmap(ctx: &Ctx, a: CmapArgs) -> anyhow::Result<()> {
    let signal = a.input.read()?;
    let section = pipeline_section(ctx, &a.pipeline);
    let name = a.measure.as_deref().unwrap_or(&section.measure);
    let measure = parse_measure(name, section.trim_c, section.trim_mode)?;
    let spec = spectrogram(&signal, &section.stft())?;
    let mut map = enhance_cm(&build_cm(&spec, measure)?)?;
    if section.median_filter {
        map = median_filter_2d(&map, section.border)?;
    }
    let selector = aggregate(&map)?;
    let rows: Vec<Vec<f64>> = map.values.rows().into_iter().map(|r| r.to_vec()).collect();
    io::write_matrix(&ctx.out("cmap.csv"), "freq_hz", &map.freqs, &map.freqs, &rows)?;
    io::write_columns(&ctx.out("selector.csv"), &["freq_hz", "value"], &[&selector.freqs, &selector.values])?;
    println!(
        "{measure}: {} x {} map, selector peak at {:.1} Hz",
        map.size(),
        map.size(),
        selector.argmax_freq()
    );
    if selector.is_degenerate() {
        bail!(Degenerate);
    }
    Ok(())
}

#[derive(Debug)]
struct Degenerate;

impl std::fmt::Display for Degenerate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("the selector is all zeros; the signal was left unfiltered")
    }
}

impl std::error::Error for Degenerate {}

fn cmd_analyze(ctx: &Ctx, a: AnalyzeArgs) -> anyhow::Result<()> {
    let signal = a.input.read()?;
    let section = pipeline_section(ctx, &a.pipeline);
    let name = a.measure.as_deref().unwrap_or(&section.measure);
    let method = parse_method(name, section.trim_c, section.trim_mode)?;
    let cfg = section.to_pipeline(method, ctx.cfg.sim.fault_freq)?;
    let result = analyze(&signal, &cfg)?;
    let csv_in = a.input.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let filtered_path = ctx.out(if csv_in { "filtered.csv" } else { "filtered.wav" });
    io::write_signal(&filtered_path, &result.filtered)?;
    io::write_columns(
        &ctx.out("selector.csv"),
        &["freq_hz", "value"],
        &[&result.selector.freqs, &result.selector.values],
    )?;
    io::write_columns(
        &ctx.out("ses.csv"),
        &["freq_hz", "raw", "filtered"],
        &[&result.ses_raw.freqs, &result.ses_raw.amps, &result.ses_filtered.amps],
    )?;
    let mut meta = ctx.meta("analyze", &cfg)?;
    meta.input = Some(a.input.input.display().to_string());
    let report = AnalysisReport {
        meta,
        method: cfg.label(),
        sample_rate: signal.sample_rate(),
        samples: signal.len(),
        selector_argmax_hz: (!result.selector.is_degenerate()).then(|| result.selector.argmax_freq()),
        envsi: result.report.clone(),
        selector: result.selector.clone(),
    };
    io::write_json(&ctx.out("report.json"), &report)?;
    let r = &result.report;
    println!(
        "{}: ENVSI raw {:.4} -> filtered {:.4} ({})",
        cfg.label(),
        r.envsi_raw,
        r.envsi_filtered,
        r.score_pct.map_or("score undefined".to_string(), |s| format!("{s:+.1}%"))
    );
    if r.degenerate {
        bail!(Degenerate);
    }
    Ok(())
}

fn mc_config(ctx: &Ctx, runs: Option<usize>, measures: &[String], section: &PipelineSection, sim: SimParams) -> anyhow::Result<McConfig> {
    let names = if measures.is_empty() { &ctx.cfg.mc.measures } else { measures };
    let filter_settings: Vec<bool> = if !section.median_filter {
        vec![false]
    } else if ctx.cfg.mc.both_filter_settings {
        vec![true, false]
    } else {
        vec![true]
    };
    let mut pipelines = Vec::new();
    for name in names {
        let method = parse_method(name, section.trim_c, section.trim_mode)?;
        let settings: &[bool] = if matches!(method, Method::SpectralKurtosis) { &[false] } else { &filter_settings };
        for &mf in settings {
            pipelines.push(section.to_pipeline(method, sim.fault_freq)?.with_median_filter(mf));
        }
    }
    let cfg = McConfig {
        runs: runs.unwrap_or(ctx.cfg.mc.runs),
        base_seed: sim.seed,
        sim,
        pipelines,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_mc(ctx: &Ctx, a: McArgs) -> anyhow::Result<()> {
    let mut sim = ctx.sim();
    a.sim.apply(&mut sim);
    let section = pipeline_section(ctx, &a.pipeline);
    if let Some(f) = section.fault_freq {
        sim.fault_freq = f;
    }
    let cfg = mc_config(ctx, a.runs, &a.measures, &section, sim)?;
    let result = harness::mc_run(&cfg)?;

    let mut headers = vec!["run".to_string(), "seed".to_string(), "raw".to_string()];
    headers.extend(cfg.pipelines.iter().map(PipelineConfig::label));
    let mut columns: Vec<Vec<f64>> = vec![
        result.records.iter().map(|r| r.run as f64).collect(),
        result.records.iter().map(|r| r.seed as f64).collect(),
        result.records.iter().map(|r| r.raw).collect(),
    ];
    for i in 0..cfg.pipelines.len() {
        columns.push(result.records.iter().map(|r| r.outcomes[i].envsi).collect());
    }
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let col_refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    io::write_columns(&ctx.out("mc_envsi.csv"), &header_refs, &col_refs)?;

    let meta = ctx.meta("mc", &cfg)?;
    io::write_json(&ctx.out("mc_summary.json"), &serde_json::json!({ "meta": meta, "result": result }))?;
    println!("{:<16} {:>8} {:>8} {:>8}", "method", "q1", "median", "q3");
    for s in std::iter::once(&result.raw).chain(&result.methods) {
        println!("{:<16} {:>8.4} {:>8.4} {:>8.4}", s.label, s.q1, s.median, s.q3);
    }
    if !result.failures.is_empty() {
        eprintln!("{} of {} runs failed", result.failures.len(), cfg.runs);
    }
    Ok(())
}

fn cmd_sweep(ctx: &Ctx, a: SweepArgs) -> anyhow::Result<()> {
    let section = pipeline_section(ctx, &a.pipeline);
    let mut sim = ctx.sim();
    if let Some(f) = section.fault_freq {
        sim.fault_freq = f;
    }
    let cfg = mc_config(ctx, a.runs, &a.measures, &section, sim)?;
    let mut grid: SweepGrid = ctx.cfg.sweep.clone();
    if !a.aci.is_empty() {
        grid.aci_values = a.aci;
    }
    if !a.anci.is_empty() {
        grid.anci_values = a.anci;
    }
    let result = harness::sweep(&cfg, &grid)?;
    let write = |table: &harness::SweepTable| -> anyhow::Result<()> {
        let tag = table.label.replace(['+', '(', ')', ',', '='], "_");
        io::write_matrix(
            &ctx.out(&format!("sweep_{tag}_envsi.csv")),
            "aci\\anci",
            &grid.aci_values,
            &grid.anci_values,
            &table.median_envsi,
        )?;
        if !table.score_pct.is_empty() {
            io::write_optional_matrix(
                &ctx.out(&format!("sweep_{tag}_score.csv")),
                "aci\\anci",
                &grid.aci_values,
                &grid.anci_values,
                &table.score_pct,
            )?;
        }
        Ok(())
    };
    write(&result.raw)?;
    for t in &result.methods {
        write(t)?;
    }
    let meta = ctx.meta("sweep", &serde_json::json!({ "mc": cfg, "grid": grid }))?;
    io::write_json(&ctx.out("sweep.json"), &serde_json::json!({ "meta": meta, "result": result }))?;
    println!(
        "{} cells x {} methods written to {}",
        grid.aci_values.len() * grid.anci_values.len(),
        result.methods.len() + 1,
        ctx.out_dir.display()
    );
    Ok(())
}

fn cmd_bench(ctx: &Ctx, a: BenchArgs) -> anyhow::Result<()> {
    let b = &ctx.cfg.bench;
    let section = &ctx.cfg.pipeline;
    let names = if a.measures.is_empty() { &b.measures } else { &a.measures };
    let measures = names
        .iter()
        .map(|n| parse_measure(n, section.trim_c, section.trim_mode))
        .collect::<ifb_core::Result<Vec<CorrMeasure>>>()?;
    let mut stft = section.stft();
    if let Some(n) = a.nfft {
        stft.nfft = n;
    }
    let cfg = BenchConfig {
        durations: if a.durations.is_empty() { b.durations.clone() } else { a.durations },
        measures,
        repeats: a.repeats.unwrap_or(b.repeats),
        sim: ctx.sim(),
        stft,
    };
    let results = harness::bench_cm(&cfg)?;
    let mut w = csv::Writer::from_path(ctx.out("bench.csv"))?;
    w.write_record(["measure", "duration_s", "wall_time_s", "f", "t", "repeats"])?;
    for r in &results {
        w.write_record([
            r.measure.clone(),
            r.signal_duration.to_string(),
            r.wall_time.to_string(),
            r.f.to_string(),
            r.t.to_string(),
            r.repeats.to_string(),
        ])?;
        println!("{:<10} {:>6.1}s  {:>10.4}s  ({} x {})", r.measure, r.signal_duration, r.wall_time, r.f, r.t);
    }
    w.flush()?;
    let meta = ctx.meta("bench", &cfg)?;
    io::write_json(&ctx.out("bench.json"), &serde_json::json!({ "meta": meta, "results": results }))?;
    Ok(())
}

fn cmd_fetch_demo(ctx: &Ctx, a: FetchDemoArgs) -> anyhow::Result<()> {
    let mut presets = Vec::new();
    if matches!(a.preset, Preset::CrusherLike | Preset::All) {
        presets.push(("crusher-like", crusher_like()));
    }
    if matches!(a.preset, Preset::TestrigLike | Preset::All) {
        presets.push(("testrig-like", testrig_like()));
    }
    for (name, mut params) in presets {
        if let Some(s) = ctx.seed {
            params.seed = s;
        }
        let sim = simulate(&params)?;
        let path = ctx.out(&format!("{name}.wav"));
        io::write_wav_f32(&path, &sim.x)?;
        let mut meta = ctx.meta("fetch-demo", &params)?;
        meta.seed = Some(params.seed);
        io::write_json(&ctx.out(&format!("{name}.json")), &meta)?;
        println!(
            "{name}: {:.1} s at {} Hz, fault {} Hz -> {}",
            params.duration,
            params.sample_rate,
            params.fault_freq,
            path.display()
        );
    }
    Ok(())
}
