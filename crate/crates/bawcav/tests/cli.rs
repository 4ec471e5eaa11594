//! End-to-end tests of the `bawcav` binary: subcommands, exit codes and the
//! CSV/report formats it emits.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn demo_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/linbo3_4k.cfg")
}

fn bawcav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bawcav"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn check_prints_text_report() {
    let config = demo_config();
    let out = bawcav(&["check", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("q_unloaded"), "{text}");
    assert!(text.contains("WARN"), "{text}");
    assert!(text.contains("DISCREPANT"), "{text}");
    assert!(text.contains("4.84000e3"), "{text}");
}

#[test]
fn check_writes_machine_report_that_reparses() {
    let config = demo_config();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.tsv");
    let out = bawcav(&[
        "check",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "machine",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let report = bawcav::report::parse_machine_report(&text).unwrap();
    assert!(report.row("g0_a5_0_0").is_some());

    // byte-identical on a second run
    let path2 = dir.path().join("report2.tsv");
    bawcav(&[
        "check",
        "--config",
        config.to_str().unwrap(),
        "--format",
        "machine",
        "--out",
        path2.to_str().unwrap(),
    ]);
    assert_eq!(text, std::fs::read_to_string(&path2).unwrap());
}

#[test]
fn simulate_then_fit_recovers_q() {
    let config = demo_config();
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = bawcav(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--mode",
        "A5_0_0",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = bawcav(&["fit", "--in", trace.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let q_line = text
        .lines()
        .find(|l| l.starts_with("q_loaded"))
        .expect("q_loaded line");
    let q: f64 = q_line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!(
        (q - 1.74472e6).abs() / 1.74472e6 < 0.01,
        "fitted q = {q}, output:\n{text}"
    );
    assert!(text.contains("converged    = true"), "{text}");
}

#[test]
fn simulate_with_noise_is_seed_reproducible() {
    let config = demo_config();
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    for (path, seed) in [(&a, "7"), (&b, "7"), (&c, "8")] {
        let out = bawcav(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--mode",
            "A5_0_0",
            "--out",
            path.to_str().unwrap(),
            "--noise",
            "0.01",
            "--seed",
            seed,
        ]);
        assert!(out.status.success());
    }
    let read = |p: &PathBuf| std::fs::read_to_string(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn fit_writes_fitted_curve_csv() {
    let config = demo_config();
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    bawcav(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--mode",
        "A5_0_0",
        "--out",
        trace.to_str().unwrap(),
    ]);
    let fitted = dir.path().join("fitted.csv");
    let out = bawcav(&[
        "fit",
        "--in",
        trace.to_str().unwrap(),
        "--out",
        fitted.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (spectrum, warnings) = bawcav::report::read_trace_csv(&fitted).unwrap();
    assert!(warnings.is_empty());
    assert_eq!(spectrum.len(), 2001);
}

#[test]
fn coupling_and_effmass_print_per_mode_lines() {
    let config = demo_config();
    let out = bawcav(&["coupling", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("mode A5_0_0"), "{text}");
    assert!(text.contains("measured-G"), "{text}");
    assert!(text.contains("table-g0"), "{text}");

    let out = bawcav(&["effmass", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("mode A5_0_0"), "{text}");
    assert!(text.contains("m_eff(model)"), "{text}");
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "[cavity]\nf_c = 6.075 GHz\nq_loaded = -1\n[mode A5_0_0]\nf_m = 8.3 MHz\nq_m = 1e6\nm_eff = 3.52e-4 g\n").unwrap();
    let out = bawcav(&["check", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q_loaded"));
}

#[test]
fn missing_files_exit_2() {
    let out = bawcav(&["check", "--config", "/nonexistent/system.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bawcav(&["fit", "--in", "/nonexistent/trace.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_parse_error_cites_line_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "freq_hz,value\n1.0,0.0\n2.0,0.0\n3.0,0.0\n2.5,0.0\n").unwrap();
    let out = bawcav(&["fit", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));
}

#[test]
fn fit_warns_about_phase_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phase.csv");
    let mut text = String::from("freq_hz,value,phase_rad\n");
    for i in 0..9 {
        let f = 1e6 + i as f64;
        let v = 1.0 / (1.0 + (i as f64 - 4.0).powi(2));
        text.push_str(&format!("{f},{v},0.0\n"));
    }
    std::fs::write(&path, text).unwrap();
    let out = bawcav(&["fit", "--in", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("phase_rad"));
}
