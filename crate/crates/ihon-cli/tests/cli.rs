//! End-to-end checks of the `ihon` binary: modes, flag handling, exit
//! codes, and byte-level output determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ihon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ihon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const SMALL_RUN: &str = r#"{
  "mode": "single",
  "run": { "gst_load": 0.5, "sm_load": 0.3, "n_packets": 1000, "seeds": [907, 234] }
}"#;

#[test]
fn single_mode_emits_csv_with_config_echo() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_RUN);
    let out_path = dir.path().join("out.csv");
    let out = ihon(&["--config", &config, "--out", out_path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("# mode: single"), "{text}");
    assert!(text.contains("# config: "), "{text}");
    assert!(text.contains("# seeds: 907 234"), "{text}");
    assert!(text.contains("gst_load,sm_load,system_load"), "{text}");
    assert!(text.contains("# profile fronthaul class=gst"), "{text}");
}

#[test]
fn identical_invocations_emit_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_RUN);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(ihon(&["--config", &config, "--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(ihon(&["--config", &config, "--out", b.to_str().unwrap()])
        .status
        .success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn mode_flag_overrides_config_mode() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_RUN);
    let out = ihon(&["--config", &config, "--mode", "budget"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# mode: budget"), "{text}");
    assert!(text.contains("2,2.400,9.52,true"), "{text}");
    assert!(text.contains("6,7.200,8.56,true"), "{text}");
}

#[test]
fn sweep_mode_emits_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.json",
        r#"{
          "mode": "sweep",
          "run": { "sm_load": 0.2, "n_packets": 500, "seeds": [907] },
          "sweep": { "parameter": "gst_load", "values": [0.1, 0.3, 0.5] }
        }"#,
    );
    let out = ihon(&["--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4, "{text}");
}

#[test]
fn seed_override_replaces_configured_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_RUN);
    let out = ihon(&["--config", &config, "--seed-override", "1,2,3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# seeds: 1 2 3"), "{text}");
}

#[test]
fn event_log_is_written_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_RUN);
    let log_path = dir.path().join("events.log");
    let out = ihon(&[
        "--config",
        &config,
        "--event-log",
        log_path.to_str().unwrap(),
        "--out",
        dir.path().join("o.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let log = fs::read_to_string(&log_path).unwrap();
    assert!(log.contains("# seed 907"), "log lists each seed");
    let mut events = 0;
    for line in log.lines().filter(|l| !l.starts_with('#')) {
        ihon_sim::eventlog::LogRecord::parse(line).unwrap();
        events += 1;
    }
    // 1000 packets per class, two classes, at least arrive+start+done each.
    assert!(events >= 2 * 2 * 3000, "{events} events");
}

#[test]
fn event_log_outside_single_mode_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", SMALL_RUN);
    let out = ihon(&[
        "--config",
        &config,
        "--mode",
        "budget",
        "--event-log",
        "x.log",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_config_exits_1_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{ "mode": "single", "run": { "gst_load": 1.5 } }"#,
    );
    let out = ihon(&["--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("run.gst_load"), "{err}");
}

#[test]
fn missing_config_file_exits_1() {
    let out = ihon(&["--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_mode_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", r#"{ "run": { "gst_load": 0.1 } }"#);
    let out = ihon(&["--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--mode"), "{err}");
}

#[test]
fn custom_profiles_are_checked_instead_of_builtins() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "run.json",
        r#"{
          "mode": "single",
          "run": { "gst_load": 0.5, "sm_load": 0.3, "n_packets": 1000, "seeds": [907] },
          "profiles": [ { "name": "tight", "plr_bound": 1e-9, "delay_bound_us": 2.0 } ]
        }"#,
    );
    let out = ihon(&["--config", &config]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("# profile tight class=gst plr=pass delay=pass jitter=skipped overall=pass"),
        "{text}"
    );
    assert!(!text.contains("fronthaul"), "builtins replaced:\n{text}");
}
