use ifb_core::harness::{mc_run, with_threads, McConfig};
use ifb_core::io::{self, RecordingFile};
use ifb_core::pipeline::{analyze, averaged_selector, segment_selectors};
use ifb_core::sim::simulate;
use ifb_core::{CorrKind, CorrMeasure, PipelineConfig, SimParams};

fn clean_params(seed: u64) -> SimParams {
    SimParams {
        aci: 6.0,
        anci_max: 0.0,
        seed,
        ..SimParams::default()
    }
}

#[test]
fn clean_fault_signal_is_located_and_enhanced() {
    let sim = simulate(&clean_params(2)).unwrap();
    for kind in CorrKind::ALL {
        let cfg = PipelineConfig::default().with_measure(CorrMeasure::new(kind));
        let a = analyze(&sim.x, &cfg).unwrap();
        let peak = a.selector.argmax_freq();
        assert!((1500.0..=3500.0).contains(&peak), "{kind}: peak at {peak} Hz");
        assert!(
            a.report.envsi_filtered > a.report.envsi_raw,
            "{kind}: {} <= {}",
            a.report.envsi_filtered,
            a.report.envsi_raw
        );
        assert!(!a.report.degenerate);
    }
}

#[test]
fn averaged_selector_is_median_of_segments() {
    let sim = simulate(&SimParams { duration: 2.0, ..clean_params(4) }).unwrap();
    let cfg = PipelineConfig {
        segments: 4,
        ..PipelineConfig::default().with_measure(CorrMeasure::quadrant())
    };
    let parts = segment_selectors(&sim.x, &cfg).unwrap();
    assert_eq!(parts.len(), 4);
    let avg = averaged_selector(&sim.x, &cfg).unwrap();
    assert_eq!(avg.max(), 1.0);
    let medians: Vec<f64> = (0..avg.values.len())
        .map(|i| {
            let mut col: Vec<f64> = parts.iter().map(|p| p.values[i]).collect();
            col.sort_by(f64::total_cmp);
            0.5 * (col[1] + col[2])
        })
        .collect();
    let peak = medians.iter().copied().fold(0.0, f64::max);
    for (v, m) in avg.values.iter().zip(&medians) {
        assert!((v - m / peak).abs() < 1e-12);
    }
}

#[test]
fn analysis_survives_a_wav_round_trip() {
    let sim = simulate(&SimParams { duration: 0.5, ..clean_params(8) }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.wav");
    io::write_wav_f32(&path, &sim.x).unwrap();
    let back = io::read_signal(&RecordingFile::new(&path)).unwrap();
    let cfg = PipelineConfig::default().with_measure(CorrMeasure::quadrant());
    let a = analyze(&sim.x, &cfg).unwrap();
    let b = analyze(&back, &cfg).unwrap();
    assert_eq!(a.selector.argmax(), b.selector.argmax());
    assert!((a.report.envsi_filtered - b.report.envsi_filtered).abs() < 1e-4);
}

#[test]
fn monte_carlo_is_thread_count_independent() {
    let cfg = McConfig {
        runs: 4,
        sim: SimParams { duration: 0.5, ..SimParams::default() },
        pipelines: vec![
            PipelineConfig::default().with_measure(CorrMeasure::quadrant()),
            PipelineConfig::default().with_measure(CorrMeasure::trimmed(0.03)).with_median_filter(false),
        ],
        base_seed: 21,
    };
    let one = with_threads(1, || mc_run(&cfg)).unwrap().unwrap();
    let three = with_threads(3, || mc_run(&cfg)).unwrap().unwrap();
    assert_eq!(one, three);
    assert_eq!(one.records.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![21, 22, 23, 24]);
}
