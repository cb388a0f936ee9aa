//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::time::Instant;

use lifeorder::criteria::{CriterionOutcome, Direction};
use lifeorder::families::{self, FamilySpec};
use lifeorder::orders::{check_all, Outcome, Relation};
use lifeorder::shape::{classify_logconcave, classify_sequence, ShapeTag, TIE_TOL};
use lifeorder::{Verdict, VerdictSet};
use lifeorder_cli::audit::{self, AuditSummary, FAMILIES};
use lifeorder_cli::report::{self, ComparisonReport, DEEP_TAIL_TOL};
use lifeorder_cli::Settings;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

struct Outcomes {
    failed: usize,
}

impl Outcomes {
    fn line(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn spec(text: &str) -> FamilySpec {
    text.parse().expect("valid spec")
}

fn timed_compare(x: &str, y: &str) -> (ComparisonReport, f64) {
    let start = Instant::now();
    let r = report::compare(&spec(x), &spec(y), &Settings::default()).expect("compare runs");
    (r, start.elapsed().as_secs_f64())
}

fn forward_claim(r: &ComparisonReport) -> Option<(Relation, &str)> {
    r.criteria_verdicts
        .iter()
        .find(|v| v.direction == Direction::Forward && v.outcome == CriterionOutcome::Holds)
        .map(|v| (v.relation, v.branch.as_str()))
}

fn oracle(r: &ComparisonReport, relation: Relation) -> (Outcome, Option<i64>) {
    let v = r
        .oracle_verdicts
        .iter()
        .find(|o| o.direction == Direction::Forward && o.verdict.relation == relation)
        .expect("forward verdict present");
    (v.verdict.outcome, v.verdict.witness)
}

// closed-form discrete Weibull survival on the native support
fn weibull_log_survival(alpha: f64, beta: f64, x: f64) -> f64 {
    -(x / alpha).powf(beta)
}

fn weibull_pins(out: &mut Outcomes) {
    let (r, secs1) = timed_compare("dweibull(0.3,0.3)", "dweibull(0.5,0.2)");
    let claim = forward_claim(&r);
    let (hr, _) = oracle(&r, Relation::HR);
    // log S_X/S_Y straight from the survival formula
    let g = |x: f64| weibull_log_survival(0.3, 0.3, x) - weibull_log_survival(0.5, 0.2, x);
    let monotone = (0..r.horizon).all(|x| g(x as f64 + 1.0) <= g(x as f64) + 1e-12);
    let pass1 = claim == Some((Relation::HR, "weibull-scale"))
        && hr == Outcome::Holds
        && r.shapes.survival_ratio.tag == ShapeTag::Decreasing
        && monotone
        && r.claims.disagreements == 0
        && secs1 < 1.0;
    out.line(
        "weibull hazard-rate pin",
        pass1,
        format!(
            "claim {claim:?}, oracle hr {hr:?}, S_X/S_Y {:?} (closed form nonincreasing: {monotone}) over x <= {}, {secs1:.3} s",
            r.shapes.survival_ratio.tag, r.horizon
        ),
    );

    let (r, secs2) = timed_compare("dweibull(0.75,0.3)", "dweibull(0.5,0.2)");
    let claim = forward_claim(&r);
    let (mrl, _) = oracle(&r, Relation::MRL);
    let (hr, hr_w) = oracle(&r, Relation::HR);
    let (st, st_w) = oracle(&r, Relation::ST);
    let g = |x: i64| weibull_log_survival(0.75, 0.3, x as f64) - weibull_log_survival(0.5, 0.2, x as f64);
    let st_ok = st_w.is_some_and(|w| g(w) > 0.0);
    // hr fails when log S_X/S_Y rises on a step at the witness
    let hr_ok = hr_w.is_some_and(|w| g(w + 1) > g(w) || (w > 0 && g(w) > g(w - 1)));
    let pass2 = claim == Some((Relation::MRL, "weibull-mean"))
        && mrl == Outcome::Holds
        && hr == Outcome::Fails
        && st == Outcome::Fails
        && hr_ok
        && st_ok
        && r.claims.disagreements == 0
        && secs2 < 1.0;
    out.line(
        "weibull mean-residual-life pin",
        pass2,
        format!(
            "claim {claim:?}, oracle mrl {mrl:?}, hr {hr:?} at {hr_w:?} (verified {hr_ok}), st {st:?} at {st_w:?} (verified {st_ok}), {secs2:.3} s"
        ),
    );
}

fn gp_log_pmf(theta: f64, lambda: f64, x: u64) -> f64 {
    let x = x as f64;
    theta.ln() + (x - 1.0) * (theta + x * lambda).ln() - ln_gamma(x + 1.0) - theta - lambda * x
}

fn gp_survival(theta: f64, lambda: f64, x: i64) -> f64 {
    1.0 - (0..x.max(0) as u64).map(|k| gp_log_pmf(theta, lambda, k).exp()).sum::<f64>()
}

fn pinned_four(out: &mut Outcomes, name: &str, cases: &[(&str, &str, Relation)]) -> Vec<ComparisonReport> {
    let mut pass = true;
    let mut got = Vec::new();
    let mut reports = Vec::new();
    for &(x, y, want) in cases {
        let (r, _) = timed_compare(x, y);
        let claim = forward_claim(&r).map(|(rel, _)| rel);
        let (o, _) = oracle(&r, want);
        pass &= claim == Some(want) && o == Outcome::Holds && r.agreement && r.claims.disagreements == 0;
        let branch = forward_claim(&r).map(|(_, b)| b.to_string()).unwrap_or_default();
        got.push(format!("{} ({branch})", claim.map_or("none", |c| c.symbol())));
        reports.push(r);
    }
    out.line(name, pass, format!("verdicts {}", got.join(", ")));
    reports
}

fn gp_pins(out: &mut Outcomes) {
    let cases = [
        ("gpoisson(2,0.25)", "gpoisson(3,0.5)", Relation::LR),
        ("gpoisson(1,0.5)", "gpoisson(3,0.75)", Relation::LR),
        ("gpoisson(2,0.3)", "gpoisson(3,0.75)", Relation::HR),
        ("gpoisson(2,0.5)", "gpoisson(1,0.75)", Relation::MRL),
    ];
    let reports = pinned_four(out, "generalized poisson pins", &cases);
    let (st, w) = oracle(&reports[3], Relation::ST);
    let verified = w.is_some_and(|w| gp_survival(2.0, 0.5, w) > gp_survival(1.0, 0.75, w));
    out.line(
        "generalized poisson mrl case breaks st",
        st == Outcome::Fails && verified,
        format!("oracle st {st:?} at x = {w:?}, S_X > S_Y by direct summation: {verified}"),
    );
}

fn hl_pins(out: &mut Outcomes) {
    let cases = [
        ("hurwitzlerch(0.2,1,0.7)", "hurwitzlerch(0.5,1.5,0.3)", Relation::LR),
        ("hurwitzlerch(0.2,1,0.7)", "hurwitzlerch(0.5,2,0.3)", Relation::LR),
        ("hurwitzlerch(0.2,1,0.7)", "hurwitzlerch(0.5,2.3,0.3)", Relation::HR),
        ("hurwitzlerch(0.2,1.5,0.7)", "hurwitzlerch(0.5,2.75,0.3)", Relation::MRL),
    ];
    pinned_four(out, "hurwitz-lerch pins", &cases);
}

fn audits(out: &mut Outcomes) -> Vec<AuditSummary> {
    let settings = Settings::default();
    let start = Instant::now();
    let summaries: Vec<AuditSummary> = FAMILIES.iter().map(|f| audit::audit(f, 1000, 7, &settings).expect("audit runs")).collect();
    let secs = start.elapsed().as_secs_f64();
    let mut parts = Vec::new();
    let mut pass = secs < 300.0;
    for s in &summaries {
        pass &= s.disagreements.is_empty() && s.errors.is_empty();
        parts.push(format!(
            "{} {}/{}/{}/{}",
            s.family,
            s.claims.disagreements,
            s.claims.deferred,
            s.claims.unresolved,
            s.errors.len()
        ));
    }
    out.line(
        "criteria against oracle, 1000 pairs per family, seed 7",
        pass,
        format!("disagreements/deferred/unresolved/errors: {}; {secs:.1} s", parts.join(", ")),
    );
    summaries
}

fn shape_tallies(out: &mut Outcomes, summaries: &[AuditSummary]) {
    let (mut checked, mut matched, mut banded) = (0, 0, 0);
    for s in summaries {
        checked += s.survival_shape.checked;
        matched += s.survival_shape.matched;
        banded += s.survival_shape.banded;
    }
    out.line(
        "survival ratio shape from l(0)",
        checked > 0 && matched == checked,
        format!("{matched}/{checked} certified cases matched, {banded} in guard band"),
    );

    let (mut checked, mut matched, mut banded) = (0, 0, 0);
    for s in summaries {
        checked += s.mrl_means.checked;
        matched += s.mrl_means.matched;
        banded += s.mrl_means.banded;
    }
    out.line(
        "unimodal survival ratio: mrl iff mean_X <= mean_Y",
        checked > 0 && matched == checked,
        format!("{matched}/{checked} certified cases matched, {banded} with means within 1e-9"),
    );
}

/// A conclusion failure that contradicts a premise: inside the range the
/// premise examined, and larger than anything the unstored tails could cause.
fn certified_break(premise: &Verdict, conclusion: &Verdict) -> bool {
    premise.holds()
        && conclusion.fails()
        && conclusion.witness.is_some_and(|w| w <= premise.horizon)
        && conclusion.violation > conclusion.tail_effect
}

/// Certified breaks of lr => hr => {mrl, st} => mean in one direction.
fn chain_breaks(set: &VerdictSet, mean_x: f64, mean_y: f64) -> Vec<&'static str> {
    let mut out = Vec::new();
    if certified_break(&set.lr, &set.hr) {
        out.push("lr without hr");
    }
    if certified_break(&set.hr, &set.mrl) {
        out.push("hr without mrl");
    }
    if certified_break(&set.hr, &set.st) {
        out.push("hr without st");
    }
    let mean_ok = mean_x <= mean_y + 1e-9 * mean_x.abs().max(mean_y.abs()).max(1.0);
    if (set.mrl.holds() || set.st.holds()) && !mean_ok {
        out.push("mrl or st without mean");
    }
    out
}

fn implication_chain(out: &mut Outcomes) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut pairs = Vec::new();
    for i in 0..6000 {
        let (fx, fy) = if i < 3000 {
            let f = FAMILIES[i % 6];
            (f, f)
        } else {
            (FAMILIES[rng.gen_range(0..6)], FAMILIES[rng.gen_range(0..6)])
        };
        let x = audit::random_spec(fx, &mut rng).expect("valid draw");
        let y = audit::random_spec(fy, &mut rng).expect("valid draw");
        pairs.push((x, y));
    }
    let settings = Settings::default();
    // a truncated Holds covers the stored range only, so breaks are re-checked
    // on a deeper horizon and count only when they persist there
    let breaks_at = |x: &FamilySpec, y: &FamilySpec, tail_tol: f64| -> lifeorder::Result<(usize, Vec<String>)> {
        let (px, py) = families::truncate_pair(x, y, tail_tol, Some(settings.max_n))?;
        let (mx, my) = (families::mean(x, 1e-12)?, families::mean(y, 1e-12)?);
        let fwd = check_all(&px, &py, settings.tol)?;
        let rev = check_all(&py, &px, settings.tol)?;
        let mut breaks = Vec::new();
        let mut certified = 0;
        for (set, a, b, d) in [(&fwd, mx, my, "X<=Y"), (&rev, my, mx, "Y<=X")] {
            certified += set.iter().filter(|v| v.outcome != Outcome::Inconclusive).count();
            breaks.extend(chain_breaks(set, a, b).into_iter().map(|m| format!("{x} vs {y} {d}: {m}")));
        }
        Ok((certified, breaks))
    };
    let results: Vec<(usize, usize, Vec<String>)> = pairs
        .par_iter()
        .map(|(x, y)| {
            let run = || -> lifeorder::Result<(usize, usize, Vec<String>)> {
                let (certified, breaks) = breaks_at(x, y, settings.tail_tol)?;
                if breaks.is_empty() {
                    return Ok((certified, 0, breaks));
                }
                let (_, deep) = breaks_at(x, y, DEEP_TAIL_TOL)?;
                Ok((certified, breaks.len().saturating_sub(deep.len()), deep))
            };
            run().unwrap_or_else(|e| (0, 0, vec![format!("{x} vs {y}: error {e}")]))
        })
        .collect();
    let certified: usize = results.iter().map(|r| r.0).sum();
    let settled: usize = results.iter().map(|r| r.1).sum();
    let breaks: Vec<&String> = results.iter().flat_map(|r| &r.2).collect();
    let detail = match breaks.first() {
        None => format!("{} pairs, {certified} certified verdicts, no break ({settled} horizon artifacts settled by a deeper run)", pairs.len()),
        Some(b) => format!("{} breaks, first {b}", breaks.len()),
    };
    out.line("implication chain lr => hr => mrl, st => mean", breaks.is_empty(), detail);
}

fn random_logconcave<R: Rng>(rng: &mut R) -> Vec<f64> {
    let n = rng.gen_range(3..=200);
    let kind = rng.gen_range(0..4);
    let mut steps: Vec<f64> = (0..n - 1)
        .map(|_| match kind {
            0 => rng.gen_range(0.0..2.0),
            1 => rng.gen_range(-2.0..0.0),
            _ => rng.gen_range(-2.0..2.0),
        })
        .collect();
    if kind == 3 {
        // geometric runs: few distinct steps
        let k = rng.gen_range(1..=3);
        let levels: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for s in steps.iter_mut() {
            *s = levels[rng.gen_range(0..k)];
        }
    }
    steps.sort_by(|a, b| b.total_cmp(a));
    let mut logs = vec![0.0];
    for s in &steps {
        logs.push(logs.last().unwrap() + s);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    logs.iter().map(|l| (l - top).exp()).collect()
}

fn logconcave_ratio_test(out: &mut Outcomes) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut compared, mut banded, mut mismatches) = (0, 0, Vec::new());
    for i in 0..10_000 {
        let seq = random_logconcave(&mut rng);
        let Some(ratio) = classify_logconcave(&seq).expect("log-concave input") else {
            banded += 1;
            continue;
        };
        let direct = classify_sequence(&seq, TIE_TOL).expect("positive input");
        compared += 1;
        let same = ratio.tag == direct.tag && (ratio.tag != ShapeTag::Unimodal || ratio.mode == direct.mode);
        if !same {
            mismatches.push(format!("#{i}: ratio {:?}/{:?} direct {:?}/{:?}", ratio.tag, ratio.mode, direct.tag, direct.mode));
        }
    }
    out.line(
        "ratio test against direct scan on log-concave sequences",
        mismatches.is_empty() && compared > 0,
        match mismatches.first() {
            None => format!("{compared}/{compared} matched, {banded} in guard band"),
            Some(m) => format!("{} mismatches of {compared}, first {m}", mismatches.len()),
        },
    );
}

fn hygiene(out: &mut Outcomes) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_norm: f64 = 0.0;
    let mut worst_panjer: f64 = 0.0;
    let mut worst_weibull: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    let mut failures = Vec::new();
    for family in FAMILIES {
        for _ in 0..1000 {
            let spec = audit::random_spec(family, &mut rng).expect("valid draw");
            let p = families::truncate_within(&spec, 1e-12, 0, Some(1_000_000)).expect("truncates");
            let probs = p.probs();
            let total: f64 = probs.iter().sum::<f64>() + p.tail_mass();
            let norm = (total - 1.0).abs() / (4.0 * f64::EPSILON * probs.len() as f64);
            worst_norm = worst_norm.max(norm);
            if norm > 1.0 {
                failures.push(format!("normalization {spec}: |sum - 1| = {:e}", (total - 1.0).abs()));
            }
            if let Some((a, b)) = spec.panjer_coefficients() {
                for x in 1..probs.len() {
                    if probs[x - 1] < 1e-290 || probs[x] == 0.0 {
                        break;
                    }
                    let want = (a * x as f64 + b) / x as f64;
                    let rel = (probs[x] / probs[x - 1] / want - 1.0).abs();
                    worst_panjer = worst_panjer.max(rel);
                    if rel > 1e-12 {
                        failures.push(format!("recursion {spec} at {x}: relative error {rel:e}"));
                        break;
                    }
                }
                // closed forms through the log-gamma function
                let closed = |x: usize| -> f64 {
                    let xf = x as f64;
                    match spec {
                        FamilySpec::Poisson { lambda } => -lambda + xf * lambda.ln() - ln_gamma(xf + 1.0),
                        FamilySpec::Binomial { n, p } => {
                            let n = n as f64;
                            ln_gamma(n + 1.0) - ln_gamma(xf + 1.0) - ln_gamma(n - xf + 1.0) + xf * p.ln() + (n - xf) * (-p).ln_1p()
                        }
                        FamilySpec::NegBinomial { r, p } => {
                            let r = r as f64;
                            ln_gamma(r + xf) - ln_gamma(xf + 1.0) - ln_gamma(r) + r * p.ln() + xf * (-p).ln_1p()
                        }
                        _ => unreachable!(),
                    }
                };
                for x in 0..probs.len().min(200) {
                    if probs[x] < 1e-200 {
                        continue;
                    }
                    let rel = (probs[x] / closed(x).exp() - 1.0).abs();
                    worst_closed = worst_closed.max(rel);
                    if rel > 1e-9 {
                        failures.push(format!("closed form {spec} at {x}: relative error {rel:e}"));
                        break;
                    }
                }
            }
            if let FamilySpec::DiscreteWeibull { alpha, beta } = spec {
                let s = |x: usize| weibull_log_survival(alpha, beta, x as f64).exp();
                for (x, &f) in probs.iter().enumerate().take(100_000) {
                    let err = (f - (s(x) - s(x + 1))).abs();
                    worst_weibull = worst_weibull.max(err);
                    if err > 1e-14 {
                        failures.push(format!("weibull identity {spec} at {x}: {err:e}"));
                        break;
                    }
                }
            }
        }
    }
    out.line(
        "numerical hygiene, 1000 specs per family",
        failures.is_empty(),
        match failures.first() {
            None => format!(
                "normalization within {worst_norm:.2} of the 4 eps N budget, recursion {worst_panjer:e}, closed forms {worst_closed:e}, weibull identity {worst_weibull:e}"
            ),
            Some(f) => format!("{} failures, first {f}", failures.len()),
        },
    );
}

fn main() {
    // the libtest flags cargo passes are irrelevant here
    let mut out = Outcomes { failed: 0 };
    weibull_pins(&mut out);
    gp_pins(&mut out);
    hl_pins(&mut out);
    let summaries = audits(&mut out);
    implication_chain(&mut out);
    shape_tallies(&mut out, &summaries);
    logconcave_ratio_test(&mut out);
    hygiene(&mut out);
    if out.failed > 0 {
        println!("{} criteria failed", out.failed);
        std::process::exit(1);
    }
}
