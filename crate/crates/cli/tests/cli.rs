//! Black-box tests of the installed binary: subcommand behavior, output
//! formats, config handling, and the exit code contract (0 pass, 1 check
//! failed, 2 usage or config error).

use std::path::PathBuf;
use std::process::{Command, Output};

fn bellmeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellmeas"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Value column of a CSV body row.
fn csv_value(line: &str) -> f64 {
    line.split(',').nth(2).expect("value column").parse().expect("numeric value")
}

#[test]
fn reproduce_passes_and_exits_zero() {
    let out = bellmeas(&["reproduce"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn reproduce_csv_is_byte_deterministic() {
    let first = bellmeas(&["reproduce", "--format", "csv"]);
    let second = bellmeas(&["reproduce", "--format", "csv"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout_of(&first);
    assert!(text.starts_with("scenario,regime,value,classical_bound,quantum_bound,violated,residual\n"));
    assert_eq!(text.lines().count(), 11, "header plus ten rows");
}

#[test]
fn csv_values_reparse_to_twelve_significant_digits() {
    let out = bellmeas(&["reproduce", "--format", "csv"]);
    let text = stdout_of(&out);
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        for idx in [2, 3, 4, 6] {
            let field = fields[idx];
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().expect("numeric field");
            assert_eq!(format!("{v:.11e}"), field, "field round-trips");
        }
    }
}

#[test]
fn povm_check_rejects_an_incompatible_pair() {
    let out = bellmeas(&["povm-check", "--alpha", "0.8", "--beta", "0.8", "--a", "x", "--b", "y"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("INFEASIBLE"), "{text}");
    let expected = 2.0 - 1.6 * std::f64::consts::SQRT_2;
    assert!(text.contains(&format!("{expected:.11e}")), "{text}");
}

#[test]
fn povm_check_accepts_a_compatible_pair() {
    let out = bellmeas(&["povm-check", "--alpha", "0.7", "--beta", "0.7", "--a", "x", "--b", "y"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("FEASIBLE"));
}

#[test]
fn optimized_chsh_recovers_the_two_party_ceiling() {
    let out = bellmeas(&["chsh", "--state", "singlet", "--optimize", "--seed", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let value = csv_value(text.lines().nth(1).expect("one body row"));
    assert!((value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-6, "got {value}");
}

#[test]
fn scan_applies_defaults_for_a_minimal_config() {
    let out = bellmeas(&["scan", "--config", fixture("minimal.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("mermin"));
    assert!(text.contains("4.000000000"), "{text}");
}

#[test]
fn scan_sweep_emits_one_csv_row_per_grid_point() {
    let out = bellmeas(&["scan", "--config", fixture("sweep.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8, "header plus seven rows:\n{text}");
    for (k, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with("mermin_joint,joint-on-two,"), "{line}");
        let alpha = 0.1 + 0.1 * k as f64;
        assert!((csv_value(line) - 4.0 * alpha * alpha).abs() < 1e-10);
    }
}

#[test]
fn corrupt_config_exits_two() {
    let out = bellmeas(&["scan", "--config", fixture("corrupt.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("error:"));
}

#[test]
fn unknown_config_key_exits_two_and_names_the_key() {
    let out = bellmeas(&["scan", "--config", fixture("unknown_key.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("colour"), "{}", stderr_of(&out));
}

#[test]
fn missing_config_file_exits_two() {
    let out = bellmeas(&["scan", "--config", "/nonexistent/nowhere.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bellmeas(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bellmeas(&["chsh", "--bogus"]).status.code(), Some(2));
    assert_eq!(bellmeas(&["chsh", "--a1", "x"]).status.code(), Some(2));
    assert_eq!(bellmeas(&["gisin", "--settings", "5"]).status.code(), Some(2));
    assert_eq!(
        bellmeas(&["gisin", "--regime", "joint-on-one", "--alpha", "0.9"]).status.code(),
        Some(2),
        "sharpness above the coplanar cap is a config error"
    );
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = std::env::temp_dir().join(format!("bellmeas-out-{}.csv", std::process::id()));
    let out = bellmeas(&[
        "gisin",
        "--settings",
        "4",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(stdout_of(&out).is_empty());
    let written = std::fs::read_to_string(&path).expect("report file");
    assert!(written.starts_with("scenario,regime,"));
    assert!(written.contains("gisin4,sharp,6.92820323028e0"), "{written}");
    std::fs::remove_file(&path).ok();
}

#[test]
fn help_exits_zero() {
    assert_eq!(bellmeas(&["--help"]).status.code(), Some(0));
    assert_eq!(bellmeas(&["gisin", "--help"]).status.code(), Some(0));
}
