//! End-to-end tests driving the `wpt` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn wpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpt")).args(args).output().expect("spawn wpt")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("wpt-cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn design_up_prints_uniform_weights() {
    let out = wpt(&["design", "--method", "up", "--n", "4", "--p", "1"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["method"], "up");
    let weights = json["weights"].as_array().unwrap();
    assert_eq!(weights.len(), 4);
    for w in weights {
        let re = w[0].as_f64().unwrap();
        // sqrt(2P/N) = sqrt(1/2) ~ 0.70711
        assert!((re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        assert_eq!(w[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn scaling_table_iii_cw_reference() {
    let out = wpt(&["scaling", "--table", "iii", "--scheme", "cw", "--p", "0.01"]);
    assert!(out.status.success());
    let value: f64 = stdout(&out).trim().parse().unwrap();
    assert!((value - 0.14529).abs() < 1e-5, "value = {value}");
}

#[test]
fn scaling_table_ii_and_iv() {
    let out = wpt(&[
        "scaling", "--table", "ii", "--channel", "fs", "--strategy", "upmf", "--n", "16", "--m", "1",
        "--epsilon", "1.0", "--p", "1",
    ]);
    assert!(out.status.success());
    let value: f64 = stdout(&out).trim().parse().unwrap();
    // k2 R P + 3 k4 R^2 P^2 + (pi^2/16) k4 R^2 P^2 N
    let k4r2 = 0.3829 * 2500.0;
    let want = 0.0034 * 50.0 + 3.0 * k4r2 + std::f64::consts::PI.powi(2) * k4r2;
    assert!((value - want).abs() < 1e-6 * want, "value {value} want {want}");

    let out = wpt(&["scaling", "--table", "iv", "--kind", "td-cw", "--m", "2", "--p", "1"]);
    assert!(out.status.success());
    let value: f64 = stdout(&out).trim().parse().unwrap();
    let want = 0.0034 * 50.0 + 1.5 * 1.5 * k4r2;
    assert!((value - want).abs() < 1e-9 * want);
}

#[test]
fn montecarlo_preset_byte_identical_on_equal_seeds() {
    let args = ["montecarlo", "--preset", "fig6b", "--seed", "7", "--trials", "50"];
    let a = wpt(&args);
    let b = wpt(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same seed must give byte-identical CSV");
    let text = stdout(&a);
    assert!(text.starts_with(
        "experiment,strategy,channel,N,M,beta,l,epsilon,velocity_mps,zdc_mean,zdc_ci95,trials,seed\n"
    ));
    // 6 methods x 4 sweep points.
    assert_eq!(text.lines().count(), 25);

    let c = wpt(&["montecarlo", "--preset", "fig6b", "--seed", "8", "--trials", "50"]);
    assert_ne!(a.stdout, c.stdout, "different seed must change results");
}

#[test]
fn montecarlo_config_file_and_json_format() {
    let config = tmp("exp.json");
    fs::write(
        &config,
        r#"{
            "name": "demo",
            "strategy": {"type": "waveform", "method": "smf", "beta": 3.0},
            "channel": {"kind": "selective", "n": 8, "m": 1, "taps": 8},
            "trials": 40,
            "sweep": {"axis": "n", "values": [4, 8]}
        }"#,
    )
    .unwrap();
    let out = wpt(&["montecarlo", "--config", config.to_str().unwrap(), "--seed", "5", "--format", "json"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["experiment"], "demo");
    assert_eq!(rows[1]["n"], 8);
    assert!(rows[1]["zdc_mean"].as_f64().unwrap() > 0.0);
}

#[test]
fn malformed_config_names_offending_key() {
    let config = tmp("bad.json");
    fs::write(
        &config,
        r#"{"name": "x", "strategy": {"type": "waveform", "method": "up"},
            "channel": {"kind": "flat", "n": 4}, "trials": 5, "mystery_knob": 1}"#,
    )
    .unwrap();
    let out = wpt(&["montecarlo", "--config", config.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mystery_knob"), "stderr was: {err}");
}

#[test]
fn usage_errors_exit_one() {
    let out = wpt(&["montecarlo", "--nonsense-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = wpt(&["not-a-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
    // Stochastic subcommands refuse to run without --seed.
    let out = wpt(&["montecarlo", "--preset", "fig6a"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_preset_exits_two() {
    let out = wpt(&["montecarlo", "--preset", "fig99", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig99"));
}

#[test]
fn presets_lists_all_figures() {
    let out = wpt(&["presets"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["fig6a", "fig6b", "fig6c", "fig7", "fig8", "fig9", "fig10", "fig12", "fig13"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn design_zdc_pipeline() {
    let wf = tmp("wf.json");
    let chan = tmp("chan.json");
    let out = wpt(&[
        "design", "--method", "mf", "--n", "8", "--p", "1", "--channel-kind", "selective", "--seed",
        "42", "--emit-channel", chan.to_str().unwrap(), "--out", wf.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = wpt(&["zdc", "--weights", wf.to_str().unwrap(), "--channel", chan.to_str().unwrap()]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["zdc"].as_f64().unwrap() > 0.0);
    assert!(json["fourth_order"].as_f64().unwrap() > json["second_order"].as_f64().unwrap());
}

#[test]
fn zdc_tones_file_reference_value() {
    // Single unit tone with unit rectenna coefficients: 0.5 + 0.375.
    let tones = tmp("tones.json");
    fs::write(&tones, r#"{"f0_hz": 10000.0, "spacing_hz": 1000.0, "tones": [[1.0, 0.0]]}"#).unwrap();
    let out = wpt(&[
        "zdc", "--tones", tones.to_str().unwrap(), "--k2", "1", "--k4", "1", "--r-ant", "1",
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((json["zdc"].as_f64().unwrap() - 0.875).abs() < 1e-12);
}

#[test]
fn design_requires_channel_for_adaptive_methods() {
    let out = wpt(&["design", "--method", "mf", "--n", "4", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("channel"));
}

#[test]
fn mobility_summary_row() {
    let out = wpt(&[
        "mobility", "--method", "smf", "--beta", "3", "--velocity", "0.01", "--frames", "50",
        "--seed", "9",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("mobility,smf,selective,16,1,3,"));

    let out = wpt(&[
        "mobility", "--method", "smf", "--beta", "3", "--velocity", "0.01", "--frames", "50",
        "--seed", "9", "--format", "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["zdc_per_frame"].as_array().unwrap().len(), 50);
    assert!((json["duty_cycle"].as_f64().unwrap() - 0.964488).abs() < 1e-9);
}

#[test]
fn sweep_requires_axis() {
    let config = tmp("noaxis.json");
    fs::write(
        &config,
        r#"{"name": "x", "strategy": {"type": "waveform", "method": "up"},
            "channel": {"kind": "flat", "n": 4}, "trials": 5}"#,
    )
    .unwrap();
    let out = wpt(&["sweep", "--config", config.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));
}
