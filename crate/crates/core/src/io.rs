//! Reading and writing signals, curves, matrices and JSON reports.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Version string baked in at build time (`git describe` when available).
pub const VERSION: &str = env!("IFB_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileFormat {
    WavFloat32,
    WavPcm16,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingFile {
    pub path: PathBuf,
    /// Detected from the extension and WAV header when `None`.
    pub format: Option<FileFormat>,
    pub channel: usize,
    /// Required for CSV; overrides nothing for WAV, whose header is used.
    pub sample_rate: Option<f64>,
}

impl RecordingFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            format: None,
            channel: 0,
            sample_rate: None,
        }
    }

    pub fn with_sample_rate(mut self, fs: Option<f64>) -> Self {
        self.sample_rate = fs;
        self
    }

    pub fn with_channel(mut self, channel: usize) -> Self {
        self.channel = channel;
        self
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("txt"))
}

pub fn read_signal(file: &RecordingFile) -> Result<Signal> {
    match file.format {
        Some(FileFormat::Csv) => read_csv_signal(file),
        Some(_) => read_wav_signal(file),
        None if is_csv(&file.path) => read_csv_signal(file),
        None => read_wav_signal(file),
    }
}

fn read_wav_signal(file: &RecordingFile) -> Result<Signal> {
    let path = &file.path;
    let reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if file.channel >= channels {
        return Err(Error::format(
            path,
            format!("channel {} requested but the file has {channels}", file.channel),
        ));
    }
    let found = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Float, 32) => FileFormat::WavFloat32,
        (hound::SampleFormat::Int, 16) => FileFormat::WavPcm16,
        (fmt, bits) => {
            return Err(Error::format(
                path,
                format!("unsupported WAV sample type {fmt:?} with {bits} bits"),
            ))
        }
    };
    if let Some(expected) = file.format {
        if expected != found {
            return Err(Error::format(path, format!("expected {expected:?}, found {found:?}")));
        }
    }
    let interleaved: Vec<f64> = match found {
        FileFormat::WavFloat32 => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
        _ => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
    };
    let samples: Vec<f64> = interleaved.into_iter().skip(file.channel).step_by(channels).collect();
    if samples.is_empty() {
        return Err(Error::format(path, "no samples"));
    }
    Signal::new(samples, f64::from(spec.sample_rate))
}

fn wav_error(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::io(path, io),
        other => Error::format(path, other.to_string()),
    }
}

/// One sample per row in column `channel`. A first row that does not parse
/// as numbers is treated as a header.
fn read_csv_signal(file: &RecordingFile) -> Result<Signal> {
    let path = &file.path;
    let fs = file
        .sample_rate
        .ok_or_else(|| Error::format(path, "CSV input needs an explicit sample rate"))?;
    let handle = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(BufReader::new(handle));
    let mut samples = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        let field = record.get(file.channel).ok_or_else(|| {
            Error::format(path, format!("row {} has no column {}", line + 1, file.channel))
        })?;
        match field.parse::<f64>() {
            Ok(v) => samples.push(v),
            Err(_) if line == 0 => continue,
            Err(_) => return Err(Error::format(path, format!("row {}: cannot parse {field:?}", line + 1))),
        }
    }
    if samples.is_empty() {
        return Err(Error::format(path, "no samples"));
    }
    Signal::new(samples, fs).map_err(|e| Error::format(path, e.to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    }
}

/// Writes equally long columns under the given headers.
pub fn write_columns(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    if headers.len() != columns.len() {
        return Err(Error::invalid("one header per column is required"));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
        return Err(Error::LengthMismatch {
            left: rows,
            right: bad.len(),
        });
    }
    let mut w = csv_writer(path)?;
    w.write_record(headers).map_err(|e| csv_err(path, e))?;
    let mut row = Vec::with_capacity(columns.len());
    for i in 0..rows {
        row.clear();
        row.extend(columns.iter().map(|c| c[i].to_string()));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes a signal as a single `sample` column.
pub fn write_signal_csv(path: &Path, signal: &Signal) -> Result<()> {
    write_columns(path, &["sample"], &[signal.samples()])
}

/// Writes a mono 32-bit float WAV. Sample rates are rounded to whole Hz.
pub fn write_wav_f32(path: &Path, signal: &Signal) -> Result<()> {
    let fs = signal.sample_rate().round();
    if fs < 1.0 || fs > u32::MAX as f64 {
        return Err(Error::invalid(format!("sample rate {fs} does not fit a WAV header")));
    }
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: fs as u32,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut w = hound::WavWriter::new(create(path)?, spec).map_err(|e| wav_error(path, e))?;
    for &s in signal.samples() {
        w.write_sample(s as f32).map_err(|e| wav_error(path, e))?;
    }
    w.finalize().map_err(|e| wav_error(path, e))
}

/// Writes a mono 16-bit PCM WAV, clipping to `[-1, 1)`.
pub fn write_wav_pcm16(path: &Path, signal: &Signal) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate().round() as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::new(create(path)?, spec).map_err(|e| wav_error(path, e))?;
    for &s in signal.samples() {
        let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        w.write_sample(v).map_err(|e| wav_error(path, e))?;
    }
    w.finalize().map_err(|e| wav_error(path, e))
}

/// Writes a signal in the format implied by the extension (`.csv` or WAV).
pub fn write_signal(path: &Path, signal: &Signal) -> Result<()> {
    if is_csv(path) {
        write_signal_csv(path, signal)
    } else {
        write_wav_f32(path, signal)
    }
}

/// Writes a matrix with optional row and column labels.
pub fn write_matrix<R: AsRef<[f64]>>(
    path: &Path,
    corner: &str,
    row_labels: &[f64],
    col_labels: &[f64],
    rows: &[R],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec![corner.to_string()];
    header.extend(col_labels.iter().map(|c| c.to_string()));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (label, row) in row_labels.iter().zip(rows) {
        let mut rec = vec![label.to_string()];
        rec.extend(row.as_ref().iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Like [`write_matrix`] but with empty cells for missing values.
pub fn write_optional_matrix(
    path: &Path,
    corner: &str,
    row_labels: &[f64],
    col_labels: &[f64],
    rows: &[Vec<Option<f64>>],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec![corner.to_string()];
    header.extend(col_labels.iter().map(|c| c.to_string()));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (label, row) in row_labels.iter().zip(rows) {
        let mut rec = vec![label.to_string()];
        rec.extend(row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Common header of every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub input: Option<String>,
    pub config: serde_json::Value,
}

impl ReportMeta {
    pub fn new(command: &str, seed: Option<u64>, config: &impl Serialize) -> Result<Self> {
        Ok(Self {
            tool: "ifb".into(),
            version: VERSION.into(),
            command: command.into(),
            seed,
            input: None,
            config: serde_json::to_value(config).map_err(|e| Error::invalid(e.to_string()))?,
        })
    }
}

/// Report written by `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub meta: ReportMeta,
    pub method: String,
    pub sample_rate: f64,
    pub samples: usize,
    pub envsi: crate::pipeline::EnvsiReport,
    pub selector_argmax_hz: Option<f64>,
    pub selector: crate::cmap::SelectorCurve,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::format(path, e.to_string()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::format(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize, fs: f64) -> Signal {
        Signal::new((0..n).map(|i| (i as f64 / n as f64) - 0.5).collect(), fs).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let s = Signal::new(vec![0.1, -2.5e-7, 3.0, 1.0 / 3.0], 1000.0).unwrap();
        write_signal(&p, &s).unwrap();
        let back = read_signal(&RecordingFile::new(&p).with_sample_rate(Some(1000.0))).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn csv_requires_rate() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_signal(&p, &ramp(10, 100.0)).unwrap();
        assert!(matches!(read_signal(&RecordingFile::new(&p)), Err(Error::Format { .. })));
    }

    #[test]
    fn csv_channel_and_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "a,b\n1,2\n3,4\n").unwrap();
        let s = read_signal(&RecordingFile::new(&p).with_sample_rate(Some(10.0)).with_channel(1)).unwrap();
        assert_eq!(s.samples(), &[2.0, 4.0]);
        std::fs::write(&p, "a\n1\nx\n").unwrap();
        assert!(read_signal(&RecordingFile::new(&p).with_sample_rate(Some(10.0))).is_err());
        std::fs::write(&p, "").unwrap();
        assert!(read_signal(&RecordingFile::new(&p).with_sample_rate(Some(10.0))).is_err());
    }

    #[test]
    fn wav_float_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.wav");
        let s = Signal::new(vec![0.25, -0.5, 0.125, 1.5], 25_000.0).unwrap();
        write_wav_f32(&p, &s).unwrap();
        assert_eq!(read_signal(&RecordingFile::new(&p)).unwrap(), s);
    }

    #[test]
    fn pcm16_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.wav");
        let s = Signal::new(vec![-1.0, 0.0, 0.5], 8000.0).unwrap();
        write_wav_pcm16(&p, &s).unwrap();
        let back = read_signal(&RecordingFile::new(&p)).unwrap();
        assert_eq!(back.samples(), &[-1.0, 0.0, 0.5]);
        let mut f = RecordingFile::new(&p);
        f.format = Some(FileFormat::WavFloat32);
        assert!(read_signal(&f).is_err());
    }

    #[test]
    fn garbage_wav_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.wav");
        std::fs::write(&p, b"not a wav file").unwrap();
        assert!(matches!(read_signal(&RecordingFile::new(&p)), Err(Error::Format { .. })));
        let missing = dir.path().join("none.wav");
        assert!(matches!(read_signal(&RecordingFile::new(&missing)), Err(Error::Io { .. })));
    }

    #[test]
    fn json_nulls_are_kept() {
        let meta = ReportMeta::new("test", None, &serde_json::json!({})).unwrap();
        let text = serde_json::to_string(&meta).unwrap();
        assert!(text.contains("\"seed\":null"));
        assert!(text.contains("\"input\":null"));
        let back: ReportMeta = serde_json::from_str(&text).unwrap();
        assert_eq!(back, meta);
    }
}
