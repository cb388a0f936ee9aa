//! Closed-form criteria against the numerical oracle for one pair.

use std::fmt::Write as _;

use lifeorder::criteria::{self, CriterionOutcome, CriterionVerdict, Direction};
use lifeorder::orders::{check_all, Outcome, Relation};
use lifeorder::shape::{likelihood_ratio, survival_ratio_shape, ShapeClass, TIE_TOL};
use lifeorder::{families, FamilySpec, Pmf, Ratio, Result, Verdict, VerdictSet};
use serde::Serialize;

use crate::{fmt_f64, Settings};

/// Tail tolerance of the deeper oracle run used to settle deferred claims.
pub const DEEP_TAIL_TOL: f64 = 1e-200;

/// Everything computed for one pair, in internal indexing.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub x: FamilySpec,
    pub y: FamilySpec,
    pub px: Pmf,
    pub py: Pmf,
    pub criteria: Vec<CriterionVerdict>,
    pub forward: VerdictSet,
    pub reverse: VerdictSet,
    pub ratio: Ratio,
    pub reverse_ratio: Ratio,
    pub survival_shape: ShapeClass,
    pub reverse_survival_shape: ShapeClass,
}

impl Evaluation {
    pub fn run(x: &FamilySpec, y: &FamilySpec, settings: &Settings) -> Result<Self> {
        let criteria = criteria::compare(x, y, settings.tol)?;
        let (px, py) = families::truncate_pair(x, y, settings.tail_tol, Some(settings.max_n))?;
        let forward = check_all(&px, &py, settings.tol)?;
        let reverse = check_all(&py, &px, settings.tol)?;
        let ratio = likelihood_ratio(&px, &py)?;
        let reverse_ratio = likelihood_ratio(&py, &px)?;
        let survival_shape = survival_ratio_shape(&px, &py, TIE_TOL)?;
        let reverse_survival_shape = survival_ratio_shape(&py, &px, TIE_TOL)?;
        Ok(Self { x: *x, y: *y, px, py, criteria, forward, reverse, ratio, reverse_ratio, survival_shape, reverse_survival_shape })
    }

    /// Native value of internal index zero.
    pub fn origin(&self) -> i64 {
        self.px.origin_shift() as i64
    }

    pub fn horizon(&self) -> i64 {
        self.px.last_index() as i64 + self.origin()
    }

    pub fn oracle(&self, direction: Direction) -> &VerdictSet {
        match direction {
            Direction::Forward => &self.forward,
            Direction::Reverse => &self.reverse,
        }
    }
}

/// How one claim of a criterion verdict compares with the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Judgement {
    Confirmed,
    /// The oracle verdict is inconclusive.
    Unresolved,
    /// The conflict can be explained by the unstored tails.
    Deferred,
    Disagreement,
}

pub fn judge(claim_holds: bool, oracle: &Verdict) -> Judgement {
    match (claim_holds, oracle.outcome) {
        (_, Outcome::Inconclusive) => Judgement::Unresolved,
        (true, Outcome::Holds) | (false, Outcome::Fails) => Judgement::Confirmed,
        (true, Outcome::Fails) if oracle.violation <= oracle.tail_effect => Judgement::Deferred,
        // the inequality is tight somewhere within the numerical error, so a
        // violation below that size cannot be seen
        (false, Outcome::Holds) if oracle.peak_excess >= -oracle.certified_error => Judgement::Unresolved,
        // a failure witness may lie beyond the horizon of an infinite support
        (false, Outcome::Holds) if !oracle.exact => Judgement::Deferred,
        _ => Judgement::Disagreement,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub direction: Direction,
    pub relation: Relation,
    pub branch: String,
    pub claim_holds: bool,
    pub oracle: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<i64>,
    pub violation: f64,
    pub tail_effect: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClaimTally {
    pub confirmed: usize,
    pub unresolved: usize,
    pub deferred: usize,
    pub disagreements: usize,
}

impl ClaimTally {
    pub fn add(&mut self, other: &ClaimTally) {
        self.confirmed += other.confirmed;
        self.unresolved += other.unresolved;
        self.deferred += other.deferred;
        self.disagreements += other.disagreements;
    }
}

/// Claim-by-claim comparison, with deferred claims rechecked on a deeper
/// truncation when one is available.
#[derive(Debug, Clone, Default)]
pub struct Matching {
    pub tally: ClaimTally,
    pub disagreements: Vec<Mismatch>,
    pub deferred: Vec<Mismatch>,
    /// Horizon of the deeper oracle run, when one was made.
    pub deep_horizon: Option<i64>,
}

struct Claim<'a> {
    verdict: &'a CriterionVerdict,
    relation: Relation,
    holds: bool,
}

fn mismatch(c: &Claim, o: &Verdict, origin: i64) -> Mismatch {
    Mismatch {
        direction: c.verdict.direction,
        relation: c.relation,
        branch: c.verdict.branch.clone(),
        claim_holds: c.holds,
        oracle: o.outcome,
        witness: o.witness.map(|w| w + origin),
        violation: o.violation,
        tail_effect: o.tail_effect,
    }
}

pub fn match_claims(eval: &Evaluation, settings: &Settings) -> Result<Matching> {
    let claims: Vec<Claim> = eval
        .criteria
        .iter()
        .flat_map(|v| v.claims().into_iter().map(move |(relation, holds)| Claim { verdict: v, relation, holds }))
        .collect();
    let mut out = Matching::default();
    let mut pending = Vec::new();
    for c in claims {
        let o = eval.oracle(c.verdict.direction).get(c.relation);
        match judge(c.holds, o) {
            Judgement::Confirmed => out.tally.confirmed += 1,
            Judgement::Unresolved => out.tally.unresolved += 1,
            Judgement::Disagreement => {
                out.tally.disagreements += 1;
                out.disagreements.push(mismatch(&c, o, eval.origin()));
            }
            Judgement::Deferred => pending.push(c),
        }
    }
    if pending.is_empty() {
        return Ok(out);
    }
    let deep = Settings { tail_tol: DEEP_TAIL_TOL.min(settings.tail_tol), ..*settings };
    let (px, py) = families::truncate_pair(&eval.x, &eval.y, deep.tail_tol, Some(deep.max_n))?;
    let origin = px.origin_shift() as i64;
    out.deep_horizon = Some(px.last_index() as i64 + origin);
    let forward = check_all(&px, &py, deep.tol)?;
    let reverse = check_all(&py, &px, deep.tol)?;
    for c in pending {
        let o = match c.verdict.direction {
            Direction::Forward => forward.get(c.relation),
            Direction::Reverse => reverse.get(c.relation),
        };
        match judge(c.holds, o) {
            Judgement::Confirmed => out.tally.confirmed += 1,
            Judgement::Unresolved => out.tally.unresolved += 1,
            Judgement::Deferred => {
                out.tally.deferred += 1;
                out.deferred.push(mismatch(&c, o, origin));
            }
            Judgement::Disagreement => {
                out.tally.disagreements += 1;
                out.disagreements.push(mismatch(&c, o, origin));
            }
        }
    }
    Ok(out)
}

/// Shape positions moved from internal to native indexing.
pub fn native_shape(mut class: ShapeClass, origin: i64) -> ShapeClass {
    let o = origin as usize;
    class.mode = class.mode.map(|m| m + o);
    class.plateau = class.plateau.map(|(a, b)| (a + o, b + o));
    class.witnesses.iter_mut().for_each(|w| *w += o);
    class
}

/// Oracle verdict in native indexing, tagged with its direction.
#[derive(Debug, Clone, Serialize)]
pub struct OracleVerdict {
    pub direction: Direction,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Shapes {
    pub likelihood_ratio: ShapeClass,
    pub survival_ratio: ShapeClass,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Means {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub spec_x: FamilySpec,
    pub spec_y: FamilySpec,
    pub criteria_verdicts: Vec<CriterionVerdict>,
    pub oracle_verdicts: Vec<OracleVerdict>,
    pub shapes: Shapes,
    pub agreement: bool,
    pub claims: ClaimTally,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub disagreements: Vec<Mismatch>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub deferred: Vec<Mismatch>,
    pub means: Means,
    pub origin: i64,
    pub horizon: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deep_horizon: Option<i64>,
    pub tol: f64,
    pub tail_tol: f64,
    pub max_n: usize,
}

pub fn compare(x: &FamilySpec, y: &FamilySpec, settings: &Settings) -> Result<ComparisonReport> {
    let eval = Evaluation::run(x, y, settings)?;
    let matching = match_claims(&eval, settings)?;
    let origin = eval.origin();
    let native = |direction: Direction, v: &Verdict| {
        let mut verdict = v.clone();
        verdict.witness = verdict.witness.map(|w| w + origin);
        verdict.horizon += origin;
        OracleVerdict { direction, verdict }
    };
    let mut oracle_verdicts = Vec::new();
    for direction in [Direction::Forward, Direction::Reverse] {
        oracle_verdicts.extend(eval.oracle(direction).iter().map(|v| native(direction, v)));
    }
    Ok(ComparisonReport {
        spec_x: *x,
        spec_y: *y,
        criteria_verdicts: eval.criteria.clone(),
        oracle_verdicts,
        shapes: Shapes {
            likelihood_ratio: native_shape(eval.ratio.shape(TIE_TOL), origin),
            survival_ratio: native_shape(eval.survival_shape.clone(), origin),
        },
        agreement: matching.disagreements.is_empty(),
        claims: matching.tally,
        disagreements: matching.disagreements,
        deferred: matching.deferred,
        means: Means { x: eval.forward.mean_x + origin as f64, y: eval.forward.mean_y + origin as f64 },
        origin,
        horizon: eval.horizon(),
        deep_horizon: matching.deep_horizon,
        tol: settings.tol,
        tail_tol: settings.tail_tol,
        max_n: settings.max_n,
    })
}

fn arrow(direction: Direction) -> &'static str {
    match direction {
        Direction::Forward => "X <= Y",
        Direction::Reverse => "Y <= X",
    }
}

pub fn describe_shape(c: &ShapeClass) -> String {
    let mut s = format!("{:?}", c.tag);
    if let Some(m) = c.mode {
        let _ = write!(s, "(mode={m})");
    }
    if let Some((a, b)) = c.plateau {
        let _ = write!(s, " plateau {a}..{b}");
    }
    if !c.witnesses.is_empty() {
        let _ = write!(s, " valleys at {:?}", c.witnesses);
    }
    s
}

impl ComparisonReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "X = {}", self.spec_x);
        let _ = writeln!(out, "Y = {}", self.spec_y);
        let _ = writeln!(out, "\ncriteria");
        for v in &self.criteria_verdicts {
            let outcome = match v.outcome {
                CriterionOutcome::NotApplicable => "n/a".to_string(),
                o => format!("{} {o:?}", v.relation),
            };
            let _ = writeln!(out, "  {}  {outcome:<10} [{}]", arrow(v.direction), v.branch);
            let sides = [("lr", v.side_facts.lr_fails), ("hr", v.side_facts.hr_fails), ("st", v.side_facts.st_fails)];
            let failing: Vec<&str> = sides.iter().filter(|(_, f)| *f).map(|(r, _)| *r).collect();
            if !failing.is_empty() {
                let _ = writeln!(out, "          and not {}", failing.join(", "));
            }
            for n in &v.notes {
                let _ = writeln!(out, "          note: {n}");
            }
        }
        let _ = writeln!(out, "\noracle (native support {}..={})", self.origin, self.horizon);
        for o in &self.oracle_verdicts {
            let v = &o.verdict;
            let witness = v.witness.map_or(String::new(), |w| format!(" at x = {w}"));
            let exact = if v.exact { " (exact)" } else { "" };
            let _ = writeln!(out, "  {}  {:<4}{:?}{witness}{exact}", arrow(o.direction), v.relation.symbol(), v.outcome);
        }
        let _ = writeln!(out, "\nmeans  E[X] = {}  E[Y] = {}", fmt_f64(self.means.x), fmt_f64(self.means.y));
        let _ = writeln!(out, "shape of l(x)      {}", describe_shape(&self.shapes.likelihood_ratio));
        let _ = writeln!(out, "shape of S_X/S_Y   {}", describe_shape(&self.shapes.survival_ratio));
        let t = self.claims;
        let _ = writeln!(
            out,
            "\nclaims  confirmed {}  unresolved {}  deferred {}  disagreements {}",
            t.confirmed, t.unresolved, t.deferred, t.disagreements
        );
        for m in &self.disagreements {
            let _ = writeln!(out, "  DISAGREE {} {} [{}] claim {} oracle {:?} witness {:?}", arrow(m.direction), m.relation, m.branch, claim_word(m.claim_holds), m.oracle, m.witness);
        }
        for m in &self.deferred {
            let _ = writeln!(out, "  deferred {} {} [{}] claim {} oracle {:?}", arrow(m.direction), m.relation, m.branch, claim_word(m.claim_holds), m.oracle);
        }
        let _ = writeln!(out, "agreement: {}", self.agreement);
        out
    }
}

fn claim_word(holds: bool) -> &'static str {
    if holds { "holds" } else { "fails" }
}
