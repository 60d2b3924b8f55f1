use std::process::Command;

use proptest::prelude::*;
use srl::cli::{emit_report, load_config, parse_config, run, RunConfig, EXIT_CONFIG, EXIT_FAIL, EXIT_OK};

#[test]
fn empty_config_gives_defaults() {
    assert_eq!(parse_config("{}").unwrap(), RunConfig::default());
}

#[test]
fn bad_configs_are_rejected() {
    for text in [
        r#"{"N": 5}"#,
        r#"{"eps_list": [0.3, 0.2, 0.1, 0.0]}"#,
        r#"{"eps_list": [0.3, 0.2]}"#,
        r#"{"tolerances": {"c(4)": -1.0}}"#,
        r#"{"sphere_resolution": 4}"#,
        r#"{"colour": "blue"}"#,
        "not json",
    ] {
        assert!(parse_config(text).is_err(), "{text}");
    }
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.n = 2;
    cfg.seed = 99;
    cfg.tolerances.insert("c(6)".into(), 1e-6);
    let p = dir.path().join("cfg.json");
    std::fs::write(&p, serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(load_config(&p).unwrap(), cfg);
}

#[test]
fn constants_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.out_dir = dir.path().to_path_buf();
    let r = run("constants", &cfg).unwrap();
    assert_eq!(r.results.len(), 4);
    assert!(r.passed() && r.trusted);
    assert_eq!(r.exit_code(), EXIT_OK);
    let files = emit_report(&r, dir.path()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    for key in ["command", "config_hash", "results", "trusted"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for row in v["results"].as_array().unwrap() {
        for key in ["name", "value", "expected", "tolerance", "provenance", "pass"] {
            assert!(row.get(key).is_some(), "{key}");
        }
    }
    // same config, same hash and same bytes; the output directory does not count
    let mut other = cfg.clone();
    other.out_dir = "elsewhere".into();
    let r2 = run("constants", &other).unwrap();
    assert_eq!(r.config_hash, r2.config_hash);
    assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&r2).unwrap());
    other.seed += 1;
    assert_ne!(run("constants", &other).unwrap().config_hash, r.config_hash);
}

#[test]
fn failing_tolerance_fails_the_run() {
    let mut cfg = RunConfig::default();
    cfg.tolerances.insert("c(4)".into(), 1e-30);
    let r = run("constants", &cfg).unwrap();
    let row = r.find("c(4)").unwrap();
    assert!(!row.pass);
    assert_eq!(r.exit_code(), EXIT_FAIL);
}

#[test]
fn unknown_command() {
    assert!(run("plot", &RunConfig::default()).is_err());
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_srl");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let st = Command::new(exe).args(["--command", "constants", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(EXIT_OK));
    assert!(out.join("constants.json").exists());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"N": 5}"#).unwrap();
    let st = Command::new(exe).args(["--command", "constants", "--config"]).arg(&bad).output().unwrap().status;
    assert_eq!(st.code(), Some(EXIT_CONFIG));

    let st = Command::new(exe).args(["--command", "constants", "--n", "4", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(EXIT_CONFIG));

    let tight = dir.path().join("tight.json");
    std::fs::write(&tight, r#"{"tolerances": {"c(6)": 1e-30}}"#).unwrap();
    let st = Command::new(exe).args(["--command", "constants", "--config"]).arg(&tight).arg("--out").arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(EXIT_FAIL));

    let st = Command::new(exe).args(["--command", "constants", "--out"]).arg(&out).env("SRL_THREADS", "zero").output().unwrap().status;
    assert_eq!(st.code(), Some(EXIT_CONFIG));
}

proptest! {
    #[test]
    fn serialization_round_trip(n in 2usize..4, seed in any::<u64>(), spacing in 0.1f64..0.5, quick in any::<bool>(), tol in 1e-12f64..1.0) {
        let mut cfg = RunConfig::default();
        cfg.n = n;
        cfg.seed = seed;
        cfg.profile_spacing = spacing;
        cfg.profile_half = 64;
        cfg.quick = quick;
        cfg.tolerances.insert("bt_identity".into(), tol);
        let text = serde_json::to_string(&cfg).unwrap();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash("verify"), cfg.hash("verify"));
    }
}
