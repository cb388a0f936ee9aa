use std::process::{Command, Output};

use lifeorder_cli::curves::parse_column;
use serde_json::Value;

fn lifeorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lifeorder")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = lifeorder(&all);
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn oracle_outcome(report: &Value, direction: &str, relation: &str) -> String {
    report["oracle_verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["direction"] == direction && v["relation"] == relation)
        .map(|v| v["outcome"].as_str().unwrap().to_string())
        .unwrap()
}

#[test]
fn poisson_rates_are_lr_ordered() {
    let out = lifeorder(&["compare", "poisson(1)", "poisson(2)"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&["compare", "poisson(1)", "poisson(2)"]);
    assert_eq!(r["agreement"], true);
    for rel in ["LR", "HR", "MRL", "ST"] {
        assert_eq!(oracle_outcome(&r, "Forward", rel), "Holds");
    }
    let c = &r["criteria_verdicts"][0];
    assert_eq!((c["relation"].as_str(), c["outcome"].as_str()), (Some("LR"), Some("Holds")));
}

#[test]
fn weibull_mean_case() {
    let r = json(&["compare", "dweibull(0.75,0.3)", "dweibull(0.5,0.2)"]);
    assert_eq!(oracle_outcome(&r, "Forward", "MRL"), "Holds");
    assert_eq!(oracle_outcome(&r, "Forward", "HR"), "Fails");
    assert_eq!(oracle_outcome(&r, "Forward", "ST"), "Fails");
}

#[test]
fn identical_laws_hold_both_ways() {
    let r = json(&["compare", "poisson(1)", "poisson(1)"]);
    for dir in ["Forward", "Reverse"] {
        for rel in ["LR", "HR", "MRL", "ST"] {
            assert_eq!(oracle_outcome(&r, dir, rel), "Holds", "{dir} {rel}");
        }
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(lifeorder(&["compare", "poisson(-1)", "poisson(2)"]).status.code(), Some(1));
    assert_eq!(lifeorder(&["compare", "poisson(1"]).status.code(), Some(1));
    assert_eq!(lifeorder(&["audit", "cauchy", "10"]).status.code(), Some(1));
    assert_eq!(lifeorder(&["audit", "poisson", "0"]).status.code(), Some(1));
    assert_eq!(lifeorder(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lifeorder(&["--help"]).status.code(), Some(0));
}

#[test]
fn compare_and_audit_are_deterministic() {
    let a = lifeorder(&["--json", "compare", "gpoisson(2,0.5)", "gpoisson(1,0.75)"]);
    let b = lifeorder(&["--json", "compare", "gpoisson(2,0.5)", "gpoisson(1,0.75)"]);
    assert_eq!(a.stdout, b.stdout);
    let a = lifeorder(&["--json", "--seed", "3", "audit", "hurwitzlerch", "60"]);
    let b = lifeorder(&["--json", "--seed", "3", "audit", "hurwitzlerch", "60"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = lifeorder(&["--json", "--seed", "4", "audit", "hurwitzlerch", "60"]);
    assert_ne!(a.stdout, c.stdout);
}

fn curves_in(dir: &std::path::Path, x: &str, y: &str) -> [String; 3] {
    let out = lifeorder(&["--out", dir.to_str().unwrap(), "curves", x, y]);
    assert_eq!(out.status.code(), Some(0));
    ["lr.csv", "sratio.csv", "mrldiff.csv"].map(|f| std::fs::read_to_string(dir.join(f)).unwrap())
}

#[test]
fn curves_are_byte_stable() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = curves_in(a.path(), "hurwitzlerch(0.2,1,0.7)", "hurwitzlerch(0.5,2.3,0.3)");
    let second = curves_in(b.path(), "hurwitzlerch(0.2,1,0.7)", "hurwitzlerch(0.5,2.3,0.3)");
    assert_eq!(first, second);
    assert!(first.iter().all(|c| c.starts_with("x,value,abs_error\n")));
    // native support of the family starts at 1
    assert!(first[0].lines().nth(1).unwrap().starts_with("1,"));
}

/// Direction of successive steps, ties within `tol` relative dropped.
fn steps(values: &[f64], tol: f64) -> Vec<i8> {
    values
        .windows(2)
        .filter(|w| w[0].is_finite() && w[1].is_finite() && w[0] > 0.0 && w[1] > 0.0)
        .filter_map(|w| {
            let d = w[1] - w[0];
            if d.abs() <= tol * w[0].abs().max(w[1].abs()) {
                None
            } else {
                Some(d.signum() as i8)
            }
        })
        .collect()
}

fn pattern(steps: &[i8]) -> &'static str {
    let ups = steps.iter().filter(|&&s| s > 0).count();
    let turns = steps.windows(2).filter(|w| w[0] != w[1]).count();
    match (ups, turns) {
        (0, _) if steps.is_empty() => "Constant",
        (0, _) => "Decreasing",
        (u, 0) if u == steps.len() => "Increasing",
        _ if turns == 1 && steps[0] > 0 => "Unimodal",
        _ => "Other",
    }
}

#[test]
fn survival_ratio_file_matches_reported_shape() {
    let pairs = [
        ("dweibull(0.3,0.3)", "dweibull(0.5,0.2)"),
        ("dweibull(0.75,0.3)", "dweibull(0.5,0.2)"),
        ("gpoisson(2,0.3)", "gpoisson(3,0.75)"),
        ("gpoisson(2,0.5)", "gpoisson(1,0.75)"),
        ("hurwitzlerch(0.2,1.5,0.7)", "hurwitzlerch(0.5,2.75,0.3)"),
        ("binomial(10,0.3)", "negbinomial(4,0.4)"),
    ];
    for (x, y) in pairs {
        let dir = tempfile::tempdir().unwrap();
        let [_, sratio, mrldiff] = curves_in(dir.path(), x, y);
        let r = json(&["compare", x, y]);
        let tag = r["shapes"]["survival_ratio"]["tag"].as_str().unwrap().to_string();
        let values: Vec<f64> = parse_column(&sratio).into_iter().map(|(_, v)| v).collect();
        assert_eq!(pattern(&steps(&values, 1e-12)), tag, "{x} vs {y}");
        if oracle_outcome(&r, "Forward", "MRL") == "Holds" {
            assert!(parse_column(&mrldiff).iter().all(|&(_, d)| d >= -1e-9), "{x} vs {y}");
        }
    }
}

#[test]
fn equal_laws_give_flat_curves() {
    let dir = tempfile::tempdir().unwrap();
    let [lr, _, mrldiff] = curves_in(dir.path(), "negbinomial(3,0.4)", "negbinomial(3,0.4)");
    assert!(parse_column(&lr).iter().all(|&(_, v)| v == 1.0));
    assert!(parse_column(&mrldiff).iter().all(|&(_, v)| v == 0.0));
    assert_eq!(parse_column(&mrldiff)[0].0, -1);
}

#[test]
fn shape_examples() {
    let r = json(&["shape", "gpoisson(2,0.3)", "gpoisson(3,0.75)"]);
    assert_eq!(r["shape"]["tag"], "Unimodal");
    let r = json(&["shape", "poisson(1)", "poisson(2)"]);
    assert_eq!(r["shape"]["tag"], "Decreasing");
    let r = json(&["shape", "binomial(10,0.5)"]);
    assert_eq!((r["shape"]["tag"].as_str(), r["shape"]["mode"].as_u64()), (Some("Unimodal"), Some(5)));
    assert_eq!(r["logconcave"], true);
    assert_eq!(r["ratio_test"]["tag"], "Unimodal");
}

#[test]
fn text_output_names_both_laws() {
    let out = lifeorder(&["compare", "gpoisson(2,0.25)", "gpoisson(3,0.5)"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("gpoisson(2,0.25)") && text.contains("gpoisson(3,0.5)"));
    assert!(text.contains("agreement: true"));
}
