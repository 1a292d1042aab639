//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed; the
//! process exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use hypineq_core::catalog::Registry;
use hypineq_core::geometry::{dist_from_origin, radial_laplacian, radius_from_dist, RadialFunction, SpaceModel};
use hypineq_core::profiles::{RadialProfile, DEFAULT_WINDOW};
use hypineq_core::quadrature::{integrate, Integrand, TailClass};
use hypineq_core::{ModelKind, Params, Problem};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cli(args: &[&str]) -> (i32, Value, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hypineq").chain(args.iter().copied());
    let code = hypineq_cli::run(argv, &mut out, &mut err);
    let json = serde_json::from_slice(&out).unwrap_or(Value::Null);
    (code, json, String::from_utf8_lossy(&err).into_owned())
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn qs(report: &Value) -> Vec<f64> {
    report["rows"]
        .as_array()
        .map(|r| r.iter().map(|row| f(&row["q"])).collect())
        .unwrap_or_default()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    ((value - target) / target).abs() <= rel
}

fn sweep(args: &[&str], target: f64, rel: f64, floor: Option<f64>) -> Outcome {
    let mut argv = vec!["sharpness", "--family", "concentration", "--format", "json"];
    argv.extend_from_slice(args);
    let (code, r, err) = cli(&argv);
    if code != 0 {
        return Err(format!("exit {code}: {}", err.trim()));
    }
    let lim = f(&r["extrapolated_limit"]);
    let q = qs(&r);
    let min_q = q.iter().copied().fold(f64::INFINITY, f64::min);
    let floor_ok = floor.is_none_or(|fl| min_q >= fl);
    check(
        within(lim, target, rel) && floor_ok,
        format!("limit {lim:.6} vs {target} (rel {rel}), min Q {min_q:.6}"),
    )
}

fn c1_euclidean_hardy() -> Outcome {
    sweep(
        &[
            "--ineq",
            "hardy-lp",
            "--model",
            "euclidean",
            "--n",
            "3",
            "--p",
            "2",
            "--alpha",
            "0",
            "--eps",
            "0.2,0.1,0.05,0.025",
        ],
        0.25,
        0.01,
        None,
    )
}

fn c2_hardy_poincare() -> Outcome {
    sweep(
        &[
            "--ineq",
            "hardy-poincare",
            "--n",
            "3",
            "--p",
            "2",
            "--alpha",
            "0",
            "--eps",
            "0.2,0.1,0.05,0.025",
        ],
        2.25,
        0.01,
        Some(2.25 - 1e-6),
    )
}

fn c3_rellich_grad() -> Outcome {
    sweep(
        &["--ineq", "rellich-grad", "--n", "5", "--alpha", "1.5"],
        3.0625,
        0.02,
        Some(3.0625 - 1e-6),
    )
}

fn c4_discrete_chain() -> Outcome {
    let mut lambdas = Vec::new();
    for points in ["500", "1000", "2000"] {
        let (code, r, err) = cli(&[
            "minimize",
            "--ineq",
            "hardy-poincare",
            "--n",
            "3",
            "--p",
            "2",
            "--alpha",
            "0",
            "--delta",
            "1e-8",
            "--D",
            "10",
            "--points",
            points,
            "--format",
            "json",
        ]);
        if code != 0 {
            return Err(format!("points {points}: exit {code}: {}", err.trim()));
        }
        lambdas.push(f(&r["lambda_min"]));
    }
    let monotone = lambdas.windows(2).all(|w| w[1] <= w[0]);
    let floor = lambdas.iter().all(|&l| l >= 2.25 - 0.05);
    let last = *lambdas.last().unwrap();
    check(
        monotone && floor && within(last, 2.25, 0.02),
        format!("lambda_min {lambdas:?}"),
    )
}

fn witness_args(p: &Params) -> Vec<String> {
    let mut a = vec!["--n".to_string(), p.n.to_string()];
    let mut push = |flag: &str, v: Option<f64>| {
        if let Some(v) = v {
            a.push(flag.into());
            a.push(format!("{v:?}"));
        }
    };
    push("--alpha", p.alpha);
    push("--p", p.p);
    push("--C", p.geom_c);
    push("--q", p.q);
    push("--s", p.s);
    push("--R", p.radius);
    push("--c", p.fks_c.map(|_| 1.0));
    a
}

fn c5_residual_battery() -> Outcome {
    let mut checked = 0;
    for e in Registry::builtin().entries() {
        let Some(w) = &e.witness else {
            return Err(format!("{} has no witness parameters", e.spec.id));
        };
        let mut argv = vec!["verify".to_string(), "--ineq".into(), e.spec.id.clone()];
        argv.extend(witness_args(w));
        argv.extend(["--bumps", "20", "--tol", "1e-8", "--format", "json"].map(String::from));
        let args: Vec<&str> = argv.iter().map(String::as_str).collect();
        let (code, r, err) = cli(&args);
        if code != 0 {
            return Err(format!("{}: exit {code}: {}", e.spec.id, err.trim()));
        }
        for row in r["rows"].as_array().into_iter().flatten() {
            let slack = f(&row["main_residual"]).min(f(&row["residual"]));
            let unquantified = row["terms"]
                .as_array()
                .into_iter()
                .flatten()
                .any(|t| t["unquantified"] == true);
            let lhs_ok = if unquantified {
                f(&row["main_residual"]) >= -1e-8 * f(&row["scale"]) && f(&row["remainder"]) >= 0.0
            } else {
                slack >= -1e-8 * f(&row["scale"])
            };
            if !lhs_ok {
                return Err(format!(
                    "{} {}: residual {}",
                    e.spec.id, row["profile"], row["residual"]
                ));
            }
            checked += 1;
        }
    }
    check(
        checked == 20 * Registry::builtin().entries().len(),
        format!("{checked} residuals nonnegative"),
    )
}

fn c6_remainder_dominance() -> Outcome {
    let (code, r, err) = cli(&[
        "verify",
        "--ineq",
        "hardy-improved-ball",
        "--n",
        "3",
        "--alpha",
        "0",
        "--R",
        "2",
        "--bumps",
        "10",
        "--format",
        "json",
    ]);
    if code != 0 {
        return Err(format!("exit {code}: {}", err.trim()));
    }
    let rows = r["rows"].as_array().cloned().unwrap_or_default();
    let mut worst = f64::INFINITY;
    for row in &rows {
        let profile = row["profile"].as_str().unwrap_or_default();
        let seed: u64 = profile.trim_start_matches("bump:seed=").parse().unwrap_or(0);
        let phi = RadialProfile::seeded_bump(seed, hypineq_cli::bump_window(&params_ball())).unwrap();
        if phi.support().1 >= 1.8 {
            return Err(format!("{profile} reaches d = {}", phi.support().1));
        }
        let slack = f(&row["main_residual"]) - f(&row["remainder"]);
        let scale = f(&row["scale"]);
        if f(&row["remainder"]) < 0.0 || slack < -1e-8 * scale {
            return Err(format!("{profile}: slack {slack}, remainder {}", row["remainder"]));
        }
        worst = worst.min(slack / scale);
    }
    check(
        rows.len() == 10,
        format!("{} profiles, min slack/scale {worst:.3e}", rows.len()),
    )
}

fn params_ball() -> Params {
    Params {
        alpha: Some(0.0),
        radius: Some(2.0),
        ..Params::new(3)
    }
}

fn c7_uncertainty() -> Outcome {
    let mut detail = Vec::new();
    for n in [3u32, 4, 5] {
        let ns = n.to_string();
        let (code, r, err) = cli(&["hpw", "--n", &ns, "--a", "0.25:256:25:log", "--format", "json"]);
        if code != 0 {
            return Err(format!("n = {n}: exit {code}: {}", err.trim()));
        }
        let k = f64::from(n * n) / 4.0;
        let q = qs(&r);
        let min_q = q.iter().copied().fold(f64::INFINITY, f64::min).min(f(&r["min_q"]));
        let last = *q.last().unwrap_or(&f64::NAN);
        let gap = f(&r["paper_alpha"]["gap"]);
        if !(min_q >= k - 1e-6 && last <= 1.02 * k && gap.is_finite() && gap >= -1e-6) {
            return Err(format!("n = {n}: min Q {min_q}, Q(256) {last}, gap {gap}"));
        }
        detail.push(format!("n={n}: minQ/K {:.5}, gap {gap:.2e}", min_q / k));
    }
    Ok(detail.join("; "))
}

fn c8_second_order() -> Outcome {
    let (code, r, err) = cli(&[
        "hpw",
        "--ineq",
        "hpw-second-order",
        "--n",
        "9",
        "--alpha",
        "0",
        "--format",
        "json",
    ]);
    if code != 0 {
        return Err(format!("exit {code}: {}", err.trim()));
    }
    let k = 9f64.powi(4) / 16.0;
    let q = qs(&r);
    let min_q = q.iter().copied().fold(f64::INFINITY, f64::min).min(f(&r["min_q"]));
    check(
        !q.is_empty() && min_q >= k - 1e-6,
        format!("{} widths, min Q {min_q:.4} vs {k}", q.len()),
    )
}

fn c9_properties() -> Outcome {
    // closed-form integrals
    let battery: Vec<(Integrand<'static>, f64, f64, f64)> = vec![
        (Integrand::new(|d: f64| d.powf(2.5)), 0.0, 1.0, 1.0 / 3.5),
        (Integrand::factored(-0.5, |_| 1.0), 0.0, 1.0, 2.0),
        (
            Integrand::factored(-0.5, |d: f64| (-d).exp()).tail(TailClass::GaussianDecay),
            0.0,
            f64::INFINITY,
            PI.sqrt(),
        ),
        (
            Integrand::new(|d: f64| (-2.0 * d * d).exp()).tail(TailClass::GaussianDecay),
            0.0,
            f64::INFINITY,
            0.5 * (PI / 2.0).sqrt(),
        ),
        (
            Integrand::new(|d: f64| (-3.0 * d).exp() * d.sinh().powi(2)).tail(TailClass::GaussianDecay),
            0.0,
            f64::INFINITY,
            2.0 / 15.0,
        ),
        (
            Integrand::new(|d: f64| d.powf(-1.5)).tail(TailClass::PowerDecay(-1.5)),
            1.0,
            f64::INFINITY,
            2.0,
        ),
        (
            Integrand::factored(2.0, |d: f64| (-d * d).exp()).tail(TailClass::GaussianDecay),
            0.0,
            f64::INFINITY,
            PI.sqrt() / 4.0,
        ),
        (Integrand::new(f64::sin), 0.0, PI, 2.0),
        (Integrand::new(|d: f64| 1.0 / (1.0 + d * d)), 0.0, 1.0, PI / 4.0),
        (Integrand::new(|d: f64| d.cosh()), 0.0, 2.0, 2f64.sinh()),
    ];
    for (i, (g, a, b, want)) in battery.iter().enumerate() {
        let got = integrate(g, *a, *b, 1e-10).map_err(|e| format!("integral {i}: {e}"))?;
        if !within(got.value, *want, 1e-9) {
            return Err(format!("integral {i}: {} vs {want}", got.value));
        }
    }

    // integration by parts on bump pairs
    let model = SpaceModel::hyperbolic(3).unwrap();
    for seed in 0..10u64 {
        let phi = RadialProfile::seeded_bump(seed, DEFAULT_WINDOW).unwrap();
        let psi = RadialProfile::seeded_bump(seed + 100, DEFAULT_WINDOW).unwrap();
        let mut cuts: Vec<f64> = phi.breakpoints().iter().chain(psi.breakpoints()).copied().collect();
        cuts.sort_by(f64::total_cmp);
        let lap = Integrand::new(|d: f64| {
            if phi.value(d) == 0.0 && phi.d1(d) == 0.0 {
                return 0.0;
            }
            radial_laplacian(&phi, d, &model).unwrap() * psi.value(d) * model.jacobian(d)
        })
        .breakpoints(cuts.clone());
        let grad = Integrand::new(|d: f64| phi.d1(d) * psi.d1(d) * model.jacobian(d)).breakpoints(cuts);
        let a = integrate(&lap, 0.0, 4.0, 1e-11).map_err(|e| e.to_string())?;
        let b = integrate(&grad, 0.0, 4.0, 1e-11).map_err(|e| e.to_string())?;
        let scale = a.value.abs().max(b.value.abs());
        if (a.value + b.value).abs() > a.error_estimate + b.error_estimate + 1e-10 * scale {
            return Err(format!("parts identity, seed {seed}: {} vs {}", a.value, b.value));
        }
    }

    // homogeneity
    let problem = Problem::builtin(
        "hardy-poincare",
        Params {
            alpha: Some(0.0),
            p: Some(2.0),
            ..Params::new(3)
        },
        ModelKind::Hyperbolic,
    )
    .map_err(|e| e.to_string())?;
    for seed in 0..5u64 {
        let phi = RadialProfile::seeded_bump(seed, DEFAULT_WINDOW).unwrap();
        let q1 = problem.rayleigh_quotient(&phi).map_err(|e| e.to_string())?;
        let q2 = problem
            .rayleigh_quotient(&phi.clone().scaled(-3.7))
            .map_err(|e| e.to_string())?;
        if (q1.q - q2.q).abs() > q1.error + q2.error + 1e-12 * q1.q {
            return Err(format!("homogeneity, seed {seed}: {} vs {}", q1.q, q2.q));
        }
    }

    // geometry round trip
    let mut r = 0.0;
    while r < 0.999_999 {
        let back = radius_from_dist(dist_from_origin(r).unwrap()).unwrap();
        if (back - r).abs() > 1e-12 * r.max(f64::MIN_POSITIVE) {
            return Err(format!("round trip at r = {r}"));
        }
        r += 0.000_731;
    }

    // registry startup checks
    let reg = Registry::with_builtins();
    reg.startup_checks().map_err(|e| e.to_string())?;
    Ok(format!(
        "10 integrals, 10 parts identities, homogeneity, round trips, {} registry entries",
        reg.entries().len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 euclidean hardy limit", c1_euclidean_hardy),
        ("2 hyperbolic hardy-poincare limit", c2_hardy_poincare),
        ("3 rellich-grad limit", c3_rellich_grad),
        ("4 discrete lower-bound chain", c4_discrete_chain),
        ("5 residual battery", c5_residual_battery),
        ("6 improved hardy remainder", c6_remainder_dominance),
        ("7 uncertainty principle", c7_uncertainty),
        ("8 second-order uncertainty", c8_second_order),
        ("9 property suites", c9_properties),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
