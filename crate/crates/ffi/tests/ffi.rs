use std::ffi::CStr;
use std::ptr;

use ifb_ffi::*;

fn last_error() -> String {
    let p = ifb_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(ifb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn correlation_matches_core() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [2.0, 4.0, 5.0, 4.0];
    let mut value = f64::NAN;
    let mut degenerate = true;
    let status = unsafe {
        ifb_correlation(
            IfbMeasure::Pearson,
            x.as_ptr(),
            y.as_ptr(),
            x.len(),
            0.03,
            IfbTrimMode::Zero,
            &mut value,
            &mut degenerate,
        )
    };
    assert_eq!(status, IfbStatus::Ok);
    assert!((value - ifb_core::corr::pcc(&x, &y).unwrap().value).abs() < 1e-15);
    assert!(!degenerate);
}

#[test]
fn errors_are_reported_with_messages() {
    let x = [1.0, 2.0];
    let mut value = 0.0;
    let status = unsafe {
        ifb_correlation(
            IfbMeasure::Trimmed,
            x.as_ptr(),
            x.as_ptr(),
            2,
            0.9,
            IfbTrimMode::Zero,
            &mut value,
            ptr::null_mut(),
        )
    };
    assert_eq!(status, IfbStatus::InvalidArgument);
    assert!(last_error().contains("trimming"));

    let status = unsafe {
        ifb_correlation(IfbMeasure::Kendall, ptr::null(), x.as_ptr(), 2, 0.0, IfbTrimMode::Zero, &mut value, ptr::null_mut())
    };
    assert_eq!(status, IfbStatus::NullPointer);
    assert!(last_error().contains("x is null"));

    let status = unsafe {
        ifb_correlation(IfbMeasure::SpectralKurtosis, x.as_ptr(), x.as_ptr(), 2, 0.0, IfbTrimMode::Zero, &mut value, ptr::null_mut())
    };
    assert_eq!(status, IfbStatus::InvalidArgument);

    let mut sig = ptr::null_mut();
    let status = unsafe { ifb_signal_new(x.as_ptr(), 2, -1.0, &mut sig) };
    assert_eq!(status, IfbStatus::InvalidArgument);
    assert!(sig.is_null());
}

#[test]
fn signal_round_trip_and_buffer_checks() {
    let data: Vec<f64> = (0..10).map(f64::from).collect();
    let mut sig = ptr::null_mut();
    unsafe {
        assert_eq!(ifb_signal_new(data.as_ptr(), data.len(), 100.0, &mut sig), IfbStatus::Ok);
        assert_eq!(ifb_signal_len(sig), 10);
        assert_eq!(ifb_signal_sample_rate(sig), 100.0);
        let mut out = vec![0.0; 10];
        assert_eq!(ifb_signal_copy(sig, out.as_mut_ptr(), out.len()), IfbStatus::Ok);
        assert_eq!(out, data);
        let mut short = vec![0.0; 3];
        assert_eq!(ifb_signal_copy(sig, short.as_mut_ptr(), 3), IfbStatus::BufferTooSmall);
        ifb_signal_free(sig);
        ifb_signal_free(ptr::null_mut());
        assert_eq!(ifb_signal_len(ptr::null()), 0);
    }
}

#[test]
fn simulate_and_analyze_match_core() {
    let mut params = ifb_sim_params_default();
    params.seed = 5;
    params.duration = 0.5;
    let mut cfg = ifb_pipeline_config_default();
    cfg.measure = IfbMeasure::Quadrant;

    let mut sig = ptr::null_mut();
    let mut analysis = ptr::null_mut();
    let mut envsi = IfbEnvsi::default();
    unsafe {
        assert_eq!(ifb_simulate(&params, &mut sig), IfbStatus::Ok);
        assert_eq!(ifb_signal_len(sig), 12_500);
        assert_eq!(ifb_analyze(sig, &cfg, &mut analysis), IfbStatus::Ok);
        assert_eq!(ifb_analysis_envsi(analysis, &mut envsi), IfbStatus::Ok);

        let n = ifb_analysis_selector_len(analysis);
        assert_eq!(n, 257);
        let mut values = vec![0.0; n];
        let mut freqs = vec![0.0; n];
        assert_eq!(
            ifb_analysis_selector_copy(analysis, values.as_mut_ptr(), freqs.as_mut_ptr(), n),
            IfbStatus::Ok
        );
        let mut filtered = vec![0.0; 12_500];
        assert_eq!(
            ifb_analysis_filtered_copy(analysis, filtered.as_mut_ptr(), filtered.len()),
            IfbStatus::Ok
        );

        let sim = ifb_core::sim::simulate(&ifb_core::SimParams {
            seed: 5,
            duration: 0.5,
            ..Default::default()
        })
        .unwrap();
        let core_cfg = ifb_core::PipelineConfig::default().with_measure(ifb_core::CorrMeasure::quadrant());
        let expected = ifb_core::pipeline::analyze(&sim.x, &core_cfg).unwrap();
        assert_eq!(values, expected.selector.values);
        assert_eq!(freqs, expected.selector.freqs);
        assert_eq!(filtered, expected.filtered.samples());
        assert_eq!(envsi.raw, expected.report.envsi_raw);
        assert_eq!(envsi.filtered, expected.report.envsi_filtered);
        assert_eq!(ifb_analysis_selector_argmax_hz(analysis), expected.selector.argmax_freq());

        ifb_analysis_free(analysis);
        ifb_signal_free(sig);
    }
}

#[test]
fn analyze_rejects_bad_config() {
    let data = vec![0.5; 4000];
    let mut sig = ptr::null_mut();
    let mut analysis = ptr::null_mut();
    unsafe {
        assert_eq!(ifb_signal_new(data.as_ptr(), data.len(), 25_000.0, &mut sig), IfbStatus::Ok);
        let mut cfg = ifb_pipeline_config_default();
        cfg.segments = 0;
        assert_eq!(ifb_analyze(sig, &cfg, &mut analysis), IfbStatus::InvalidArgument);
        assert!(analysis.is_null());
        assert_eq!(ifb_analyze(sig, ptr::null(), &mut analysis), IfbStatus::NullPointer);
        ifb_signal_free(sig);
    }
}

/// The generated header is valid C when a compiler is available.
#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ifb.h");
    let dir = std::env::temp_dir().join(format!("ifb-header-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\n\
             int main(void) {{\n\
               IfbSimParams p = ifb_sim_params_default();\n\
               IfbSignal *s = 0;\n\
               IfbStatus st = ifb_simulate(&p, &s);\n\
               ifb_signal_free(s);\n\
               return st == IFB_STATUS_OK ? 0 : 1;\n\
             }}\n"
        ),
    )
    .unwrap();
    let status = match std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(_) => {
            eprintln!("no C compiler found; skipping header check");
            return;
        }
    };
    std::fs::remove_dir_all(&dir).ok();
    assert!(status.success());
}
