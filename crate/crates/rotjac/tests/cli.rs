use std::process::{Command, Output};

use rotjac::output::to_json;
use rotjac::schema::CorrespondenceFile;
use rotjac_core::jacobian::generators;
use rotjac_core::so3::exp_series;
use rotjac_core::solver::synthesize;
use rotjac_core::{Matrix3, RotationVector, Vector3};
use serde_json::Value;

fn rotjac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotjac")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// The JSON document on the first line of stdout.
fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(stdout(out).lines().next().unwrap()).unwrap()
}

fn matrix(value: &Value) -> Matrix3 {
    serde_json::from_value(value.clone()).unwrap()
}

fn vector(value: &Value) -> Vector3 {
    serde_json::from_value(value.clone()).unwrap()
}

#[test]
fn exp_of_zero_is_identity() {
    let out = rotjac(&["exp", "0", "0", "0"]);
    assert_eq!(matrix(&json(&out)["rotation"]), Matrix3::IDENTITY);
    // JSON line followed by three aligned text rows
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn exp_quarter_turn() {
    let r = matrix(&json(&rotjac(&["exp", "1.5707963267948966", "0", "0", "--format", "json"]))["rotation"]);
    let expected = Matrix3::from_row_major([1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
    assert!(r.distance(&expected) <= 1e-15);
}

#[test]
fn exp_matches_the_series() {
    let r = matrix(&json(&rotjac(&["exp", "0.3", "-0.7", "0.1"]))["rotation"]);
    assert!(r.distance(&exp_series(&Vector3::new(0.3, -0.7, 0.1), 30)) <= 1e-12);
}

#[test]
fn log_inverts_exp() {
    let r = json(&rotjac(&["exp", "0.3", "-0.7", "0.1", "--format", "json"]))["rotation"].clone();
    let entries: Vec<String> = matrix(&r).row_major().iter().map(|x| format!("{x:e}")).collect();
    // negative exponents need the `--` separator
    let mut args = vec!["log", "--format", "json", "--"];
    args.extend(entries.iter().map(String::as_str));
    let out = json(&rotjac(&args));
    assert!((vector(&out["v"]) - Vector3::new(0.3, -0.7, 0.1)).norm() <= 1e-12);
    assert!((out["angle"].as_f64().unwrap() - Vector3::new(0.3, -0.7, 0.1).norm()).abs() <= 1e-12);

    let decimal: Vec<String> = matrix(&r).row_major().iter().map(|x| format!("{x}")).collect();
    let mut args = vec!["log"];
    args.extend(decimal.iter().map(String::as_str));
    assert_eq!(json(&rotjac(&args))["v"], out["v"]);
}

#[test]
fn log_of_identity_is_zero() {
    let out = json(&rotjac(&["log", "1", "0", "0", "0", "1", "0", "0", "0", "1"]));
    assert_eq!(vector(&out["v"]), Vector3::ZERO);
}

#[test]
fn log_rejects_non_rotations() {
    let out = rotjac(&["log", "1", "0", "0", "0", "2", "0", "0", "0", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("orthogonality"));

    let out = rotjac(&["log", "1", "0", "0", "0", "1", "0", "0", "0", "-1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("determinant"));
}

#[test]
fn parse_failures_exit_2() {
    for args in [
        &["exp", "1", "two", "3"][..],
        &["exp", "1", "2"],
        &["jac", "1", "2", "3", "--formula", "nope"],
        &["frobnicate"],
    ] {
        let out = rotjac(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(rotjac(&["jac", "4", "0", "0"]).status.code(), Some(2));
    assert_eq!(rotjac(&["bench", "--bands", "0:1"]).status.code(), Some(2));
}

#[test]
fn jac_at_zero_gives_generators() {
    let out = json(&rotjac(&["jac", "0", "0", "0", "--formula", "compact"]));
    let blocks: Vec<Matrix3> = serde_json::from_value(out["blocks"].clone()).unwrap();
    assert_eq!(blocks, generators().to_vec());
}

#[test]
fn jac_formulas_agree() {
    for v in [["0.3", "-0.7", "0.1"], ["-2.0", "1.0", "1.5"], ["0.0", "0.0", "3.1"]] {
        let run = |formula: &str| {
            let mut args = vec!["jac", v[0], v[1], v[2], "--formula", formula];
            let blocks = json(&rotjac(&args))["blocks"].clone();
            args.extend(["--point", "1", "-2", "0.5"]);
            let point = matrix(&json(&rotjac(&args))["jacobian"]);
            (serde_json::from_value::<Vec<Matrix3>>(blocks).unwrap(), point)
        };
        let (compact, compact_point) = run("compact");
        let (classical, classical_point) = run("classical");
        let (fd, fd_point) = run("fd");
        for i in 0..3 {
            assert!((compact[i] - classical[i]).max_abs() <= 1e-12);
            assert!((compact[i] - fd[i]).max_abs() <= 1e-8);
        }
        assert!((compact_point - classical_point).max_abs() <= 1e-12);
        assert!((compact_point - fd_point).max_abs() <= 1e-8);
    }
}

#[test]
fn check_single_trial() {
    let out = rotjac(&["check", "--trials", "1", "--seed", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("property,trials,skipped,max_residual,tolerance,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), rotjac::check::property_names().len());
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("1") && r.ends_with(",pass")));
}

#[test]
fn check_is_reproducible() {
    let a = rotjac(&["check", "--trials", "200", "--seed", "7"]);
    let b = rotjac(&["check", "--trials", "200", "--seed", "7"]);
    let c = rotjac(&["check", "--trials", "200", "--seed", "7", "--jobs", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_ne!(a.stdout, rotjac(&["check", "--trials", "200", "--seed", "8"]).stdout);
}

#[test]
fn bench_shape() {
    let out = rotjac(&["bench", "--bands", "0.1:1.0,1.0:3.0", "--trials", "50", "--jobs", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "formula,band_lo,band_hi,trials,mean_ns_per_eval,max_abs_err");
    assert_eq!(lines.len(), 1 + 2 * 3);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert!(["compact", "classical", "finite-diff"].contains(&fields[0]));
        assert_eq!(fields[3], "50");
        assert!(fields[5].parse::<f64>().unwrap() <= 1e-8);
    }
}

#[test]
fn fit_synthetic_recovers_the_rotation() {
    let out = json(&rotjac(&["fit", "--synth", "50", "2.5", "0", "1", "--method", "gn"]));
    assert_eq!(out["converged"], Value::Bool(true));
    assert_eq!(out["method"], "gauss-newton");
    assert!(out["angle_error"].as_f64().unwrap() <= 1e-8);
    let history: Vec<f64> = serde_json::from_value(out["residual_history"].clone()).unwrap();
    assert!(history.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn fit_trivial_problem_needs_no_iterations() {
    let out = json(&rotjac(&["fit", "--synth", "3", "0", "0", "1"]));
    assert_eq!(out["iterations"], 0);
    assert_eq!(out["converged"], Value::Bool(true));
    assert_eq!(out["residual_history"][0].as_f64(), Some(0.0));
}

#[test]
fn fit_reads_correspondence_files() {
    let dir = std::env::temp_dir().join(format!("rotjac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let v_true = RotationVector::try_new(Vector3::new(-0.5, 1.2, 0.8)).unwrap();
    let set = synthesize(20, &v_true, 0.0, 4).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, to_json(&CorrespondenceFile::from(&set))).unwrap();
    let out = json(&rotjac(&["fit", "--input", good.to_str().unwrap(), "--v0", "-0.4", "1.0", "0.7"]));
    assert!((vector(&out["v_hat"]) - v_true.vector()).norm() <= 1e-8);
    assert!(out.get("angle_error").is_none());

    let malformed = dir.join("malformed.json");
    std::fs::write(&malformed, r#"{"sources": [[1, 2, 3]"#).unwrap();
    assert_eq!(rotjac(&["fit", "--input", malformed.to_str().unwrap()]).status.code(), Some(2));

    let collinear = dir.join("collinear.json");
    std::fs::write(&collinear, r#"{"sources": [[1,1,1],[2,2,2],[3,3,3]], "targets": [[1,1,1],[2,2,2],[3,3,3]]}"#)
        .unwrap();
    assert_eq!(rotjac(&["fit", "--input", collinear.to_str().unwrap()]).status.code(), Some(4));

    assert_eq!(rotjac(&["fit", "--input", dir.join("missing.json").to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_outputs_have_headers() {
    for (args, header) in [
        (&["exp", "0.1", "0.2", "0.3", "--format", "csv"][..], "row,c0,c1,c2"),
        (&["log", "1", "0", "0", "0", "1", "0", "0", "0", "1", "--format", "csv"], "x,y,z,axis_x,axis_y,axis_z,angle"),
        (&["jac", "0.1", "0.2", "0.3", "--format", "csv"], "block,row,c0,c1,c2"),
        (&["fit", "--synth", "10", "1", "0", "2", "--format", "csv"], "iteration,cost,gradient_norm"),
    ] {
        let out = rotjac(args);
        assert!(out.status.success(), "{args:?}");
        let text = stdout(&out);
        assert_eq!(text.lines().next(), Some(header));
        assert!(text.ends_with('\n'));
    }
}

#[test]
fn outputs_are_deterministic() {
    for args in [&["fit", "--synth", "30", "1.5", "0.01", "9"][..], &["jac", "1", "1", "1", "--formula", "fd"]] {
        assert_eq!(rotjac(args).stdout, rotjac(args).stdout);
    }
}
