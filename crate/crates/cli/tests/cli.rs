use std::process::{Command, Output};

use hypineq_core::catalog::Registry;
use serde_json::Value;

fn hypineq(args: &[&str]) -> Output {
    hypineq_env(args, None)
}

fn hypineq_env(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hypineq"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("HYPINEQ_THREADS", t),
        None => cmd.env_remove("HYPINEQ_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SWEEP: &[&str] = &[
    "sharpness",
    "--ineq",
    "hardy-poincare",
    "--n",
    "3",
    "--p",
    "2",
    "--alpha",
    "0",
    "--family",
    "concentration",
    "--eps",
    "0.2,0.1,0.05,0.025",
    "--format",
    "json",
];

#[test]
fn inadmissible_rellich_exits_3_and_quotes_constraint() {
    let o = hypineq(&["check-params", "--ineq", "rellich-grad", "--n", "5", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("(8 - n)/3 < alpha < 2"), "{}", stderr(&o));
}

#[test]
fn admissible_check_reports_constant() {
    let o = hypineq(&[
        "check-params",
        "--ineq",
        "hardy-poincare",
        "--n",
        "3",
        "--p",
        "2",
        "--alpha",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["sharp_constant"], 2.25);
    assert_eq!(v["admissible"], true);
}

#[test]
fn sharpness_json_limit() {
    let o = hypineq(SWEEP);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lim = v["extrapolated_limit"].as_f64().unwrap();
    assert!((lim - 2.25).abs() < 0.01 * 2.25, "{lim}");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn json_round_trips_byte_identically() {
    for args in [
        SWEEP.to_vec(),
        vec!["list", "--format", "json"],
        vec!["hpw", "--n", "3", "--a", "0.5,2,8", "--format", "json"],
        vec![
            "verify",
            "--ineq",
            "rellich-grad",
            "--n",
            "5",
            "--alpha",
            "1.5",
            "--bumps",
            "3",
            "--format",
            "json",
        ],
    ] {
        let text = stdout(&hypineq(&args));
        let v: Value = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = [
        "verify",
        "--ineq",
        "hardy-poincare",
        "--n",
        "3",
        "--p",
        "2",
        "--alpha",
        "0",
        "--format",
        "csv",
    ];
    let one = hypineq_env(&args, Some("1"));
    let four = hypineq_env(&args, Some("4"));
    let default = hypineq_env(&args, None);
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, default.stdout);
    let sweep_a = hypineq_env(SWEEP, Some("1"));
    let sweep_b = hypineq_env(SWEEP, Some("3"));
    assert_eq!(sweep_a.stdout, sweep_b.stdout);
}

#[test]
fn verify_csv_example() {
    let o = hypineq(&[
        "verify",
        "--ineq",
        "hardy-improved-ball",
        "--n",
        "3",
        "--alpha",
        "0",
        "--R",
        "2",
        "--profile",
        "bump:seed=7",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("profile,residual,main_residual,remainder,scale,error,holds")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "bump:seed=7");
    assert!(row[1].parse::<f64>().unwrap() >= 0.0);
    assert_eq!(row[6], "true");
    assert!(lines.next().is_none());
}

#[test]
fn list_names_every_entry_once_with_tag() {
    let text = stdout(&hypineq(&["list"]));
    for e in Registry::builtin().entries() {
        let hits: Vec<&str> = text
            .lines()
            .filter(|l| l.split_whitespace().next() == Some(e.spec.id.as_str()))
            .collect();
        assert_eq!(hits.len(), 1, "{}", e.spec.id);
        assert!(hits[0].contains(&e.tag), "{}", hits[0]);
    }
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(hypineq(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hypineq(&["list", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        hypineq(&["verify", "--ineq", "no-such", "--n", "3"]).status.code(),
        Some(1)
    );
    let bad_grid = hypineq(&["hpw", "--n", "3", "--a", "1:2:x:log"]);
    assert_eq!(bad_grid.status.code(), Some(1));
    assert!(bad_grid.stdout.is_empty());
    let help = hypineq(&["verify", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("CSV columns: profile,residual"));
}

#[test]
fn divergent_tail_exits_4() {
    let o = hypineq(&[
        "sharpness",
        "--ineq",
        "hardy-poincare",
        "--n",
        "3",
        "--p",
        "2",
        "--alpha",
        "0",
        "--family",
        "paper",
        "--D",
        "inf",
    ]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn violation_exits_2() {
    // a custom inequality with an inflated constant fails on every profile
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("too-strong.json");
    std::fs::write(
        &path,
        r#"{
            "id": "too-strong",
            "shape": "linear",
            "model": "any",
            "terms": [
                {"side": "lhs", "coefficient": "1", "weight_power": "0", "integrand": "grad_sq"},
                {"side": "rhs", "coefficient": "1000", "weight_power": "0", "integrand": "abs_phi^(2)"}
            ],
            "constraints": [],
            "sharp_constant": null,
            "sharpness_family": null
        }"#,
    )
    .unwrap();
    let spec = path.to_str().unwrap();
    let listed = stdout(&hypineq(&["list", "--spec", spec]));
    assert!(listed.lines().any(|l| l.starts_with("too-strong")));
    let o = hypineq(&[
        "verify",
        "--spec",
        spec,
        "--ineq",
        "too-strong",
        "--n",
        "3",
        "--bumps",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stdout(&o).contains(",false"));
}

#[test]
fn grid_profile_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.txt");
    let mut text = String::new();
    for i in 0..=200 {
        let d = 0.2 + 1.6 * f64::from(i) / 200.0;
        let v = (std::f64::consts::PI * (d - 0.2) / 1.6).sin().powi(4);
        text += &format!("{d} {v}\n");
    }
    std::fs::write(&path, text).unwrap();
    let profile = format!("grid:file={}", path.display());
    let o = hypineq(&[
        "verify",
        "--ineq",
        "hardy-poincare",
        "--n",
        "3",
        "--p",
        "2",
        "--alpha",
        "0",
        "--profile",
        &profile,
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_hold"], true);
}

#[test]
fn minimize_rejects_product_shape() {
    let o = hypineq(&["minimize", "--ineq", "hpw", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}
