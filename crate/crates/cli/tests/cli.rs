use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("syncrds").chain(args.iter().copied());
    let code = syncrds_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn survival_bound_column() {
    let out = ok(&["survival", "--k", "4", "--n", "10,100,1000", "--samples", "2000"]);
    let rows = csv_rows(&out);
    let bounds: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(bounds, vec![4.0 / 14.0, 4.0 / 104.0, 4.0 / 1004.0]);
    assert!(out.contains("\"z0\":null"));
}

#[test]
fn lyapunov_at_fixed_point_has_no_spread() {
    let out = ok(&["lyapunov", "--family", "G", "--z0", "0", "--steps", "500", "--seeds", "20", "--format", "json"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["summary"]["value"].as_f64().unwrap(), -std::f64::consts::LN_2);
    assert_eq!(v["summary"]["spread"].as_f64().unwrap(), 0.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn oracle_truncated_moment_at_two() {
    let v: Value = serde_json::from_str(&ok(&["oracle", "truncated-log-moment", "--K0", "2"])).unwrap();
    assert_eq!(v["rows"][0]["value"].as_f64().unwrap(), std::f64::consts::LN_2);
    let v: Value = serde_json::from_str(&ok(&["oracle", "truncated-log-moment"])).unwrap();
    assert_eq!(v["rows"][0]["value"], "inf");
    let v: Value = serde_json::from_str(&ok(&["oracle", "survival-bound", "--k", "4", "--n", "1000"])).unwrap();
    assert_eq!(v["rows"][0]["exact"], "1/251");
}

#[test]
fn worker_count_does_not_change_output() {
    let base = ["pullback", "--samples", "500", "--n", "10,100"];
    let outputs: Vec<String> = ["1", "2", "8"]
        .iter()
        .map(|w| {
            let mut args = base.to_vec();
            args.extend(["--workers", w]);
            ok(&args)
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    assert!(!outputs[0].contains("workers"));
}

#[test]
fn replay_reproduces_csv_and_json_reports() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let path = dir.path().join(format!("report.{format}"));
        let p = path.to_str().unwrap();
        let first = ok(&["survival", "--samples", "300", "--n", "5,50", "--seed", "7", "--format", format]);
        std::fs::write(&path, &first).unwrap();
        let again = ok(&["replay", p, "--format", format]);
        assert_eq!(first, again);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let out = ok(&["orbit", "--z0", "0.3", "--steps", "4", "--out", path.to_str().unwrap()]);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv_rows(&text).len(), 5);
}

#[test]
fn csv_fields_are_numbers_or_sentinels() {
    let outputs = [
        ok(&["orbit", "--z0", "0.9", "--steps", "60", "--seed", "3"]),
        ok(&["integrability", "--samples", "2000"]),
        ok(&["probe-unstable", "--x0", "0.01", "--mu", "0.5", "--samples", "200"]),
        ok(&["probe-stable", "--y", "0.001", "--mu", "-0.2", "--samples", "200"]),
    ];
    for out in &outputs {
        for row in csv_rows(out) {
            for field in row {
                let fine = field.is_empty()
                    || ["inf", "-inf", "escaped"].contains(&field.as_str())
                    || field.parse::<f64>().is_ok_and(f64::is_finite)
                    || field.chars().all(|c| c.is_ascii_lowercase() || c == '_');
                assert!(fine, "field `{field}` in\n{out}");
            }
        }
    }
    assert!(outputs[0].contains("escaped"));
}

#[test]
fn invalid_configuration_exits_two_with_one_line() {
    for args in [
        &["probe-stable", "--y", "0.1", "--mu", "0.3"][..],
        &["probe-unstable", "--x0", "0.1", "--mu", "-1"],
        &["probe-stable", "--y", "0.1", "--mu", "-1", "--beta", "1.5"],
        &["survival", "--k", "1"],
        &["survival", "--k", "4", "--z0", "0.01"],
        &["oracle", "survival-bound", "--k", "4"],
        &["lyapunov", "--workers", "0"],
        &["nonsense"],
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error[config]: "));
    }
}

#[test]
fn escaped_lyapunov_run_is_a_runtime_failure() {
    let (code, _, err) = run(&["lyapunov", "--z0", "0.9", "--steps", "200", "--seeds", "3"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[runtime]: "));
}

#[test]
fn selftest_passes() {
    let out = ok(&["selftest", "--seed", "11"]);
    for row in csv_rows(&out) {
        assert_eq!(row[1], "1", "{row:?}");
    }
}

#[test]
fn binary_reads_seed_from_environment() {
    let bin = env!("CARGO_BIN_EXE_syncrds");
    let with_env = Command::new(bin)
        .args(["survival", "--samples", "100", "--n", "10"])
        .env("SYNCRDS_SEED", "42")
        .output()
        .unwrap();
    assert!(with_env.status.success());
    let explicit = Command::new(bin)
        .args(["survival", "--samples", "100", "--n", "10", "--seed", "42"])
        .env_remove("SYNCRDS_SEED")
        .output()
        .unwrap();
    assert_eq!(with_env.stdout, explicit.stdout);
    assert!(String::from_utf8_lossy(&explicit.stdout).contains("# seed=42"));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
