//! End-to-end tests of the `corners` binary: exit codes, determinism, and
//! output schemas.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corners(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_corners"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn roth_count_all_methods_agree() {
    let out = corners(&["roth-count", "--P", "t", "--Q", "t^2", "--p", "3", "--method", "all"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let counts: Vec<u64> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["count"].as_u64().unwrap())
        .collect();
    assert_eq!(counts.len(), 3);
    assert!(counts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn count_corners_constant_input() {
    let out = corners(&["count-corners", "--P", "t", "--Q", "t^2", "--p", "7", "--gen", "const"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["lambda"][0].as_f64().unwrap(), 1.0);
    assert_eq!(report["main_term"][0].as_f64().unwrap(), 1.0);
    assert_eq!(report["error"].as_f64().unwrap(), 0.0);
}

#[test]
fn jacobian_verify_passes() {
    let out = corners(&[
        "jacobian-verify", "--P", "t", "--Q", "t^3", "--trials", "200", "--seed", "1",
    ]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for r in reports.as_array().unwrap() {
        assert_eq!(r["failures"].as_u64().unwrap(), 0);
    }
}

#[test]
fn exit_codes() {
    // Unknown flag → invalid input.
    let out = corners(&["count-corners", "--nope"]);
    assert_eq!(out.status.code(), Some(1));
    // Unparseable P → invalid input.
    let out = corners(&["count-corners", "--P", "t+", "--Q", "t^2", "--p", "7"]);
    assert_eq!(out.status.code(), Some(1));
    // Dependent pair rejected without --allow-dependent.
    let out = corners(&["count-corners", "--P", "t", "--Q", "3*t+5", "--p", "7"]);
    assert_eq!(out.status.code(), Some(1));
    // ... and accepted with it.
    let out = corners(&[
        "count-corners", "--P", "t", "--Q", "3*t+5", "--p", "7", "--allow-dependent",
    ]);
    assert!(out.status.success());
    // Derivative degenerates at p=2 for Q=t² → bad prime.
    let out = corners(&["zprime-count", "--P", "t", "--Q", "t^2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    // Composite modulus → bad prime.
    let out = corners(&["count-corners", "--P", "t", "--Q", "t^2", "--p", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn error_scan_deterministic_csv() {
    let args = [
        "error-scan", "--P", "t", "--Q", "t^2", "--primes", "5,7", "--seeds", "2", "--seed", "9",
    ];
    let a = corners(&args);
    let b = corners(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "same flags and seed must be byte-identical");
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# corners error-scan v1");
    assert_eq!(lines.next().unwrap(), "p,seed,lambda_abs,main_abs,error,error_sqrt_p");
    assert_eq!(lines.count(), 4);
}

#[test]
fn variety_scan_csv_schema() {
    let out = corners(&["variety-scan", "--P", "t", "--Q", "t^2", "--primes", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("# corners variety-scan v1\n"));
    assert!(text.contains("p,variety,count,exponent,ratio,method,residual,seconds"));
    for variety in ["Y", "Zprime", "X_sup", "W_sup"] {
        assert!(text.contains(&format!("5,{variety},")), "missing {variety} row");
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = std::env::temp_dir().join(format!("corners-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg: PathBuf = dir.join("run.json");
    std::fs::write(&cfg, r#"{"P": "t", "Q": "t^2", "prime": 7, "seed": 3}"#).unwrap();
    let out = corners(&["count-corners", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["p"].as_u64().unwrap(), 7);
    // An explicit flag wins over the config value.
    let out = corners(&["count-corners", "--config", cfg.to_str().unwrap(), "--p", "5"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["p"].as_u64().unwrap(), 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn inverse_u2_character_is_exact() {
    let out = corners(&[
        "inverse-u2", "--p", "13", "--gen", "char:2,0", "--seed", "0", "--coordinate", "first",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((report["correlation"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((report["u2_norm"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn degree_lowering_trace_runs() {
    let out = corners(&[
        "degree-lowering-trace", "--P", "t", "--Q", "t^2", "--p", "7", "--seed", "4",
    ]);
    assert!(out.status.success());
    let trace: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(trace["branch"].as_str().unwrap(), "generic");
    assert_eq!(trace["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn kernel_table_binary_dump() {
    let dir = std::env::temp_dir().join(format!("corners-ker-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bin = dir.join("k.bin");
    let out = corners(&[
        "kernel-table", "--P", "t", "--Q", "t^2", "--p", "5", "--binary", bin.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let bytes = std::fs::read(&bin).unwrap();
    assert_eq!(bytes.len(), 16 + 25 * 16);
    assert_eq!(u64::from_le_bytes(bytes[0..8].try_into().unwrap()), 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn selftest_passes() {
    let out = corners(&["selftest"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("selftest: 9 checks passed"));
}
