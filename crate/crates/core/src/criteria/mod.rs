//! Closed-form decision procedures: the shape rules linking the likelihood
//! ratio to the hazard rate and mean residual life orders, and the parameter
//! conditions for each family.

mod gpoisson;
mod hurwitz;
mod panjer;
mod weibull;

use serde::Serialize;

pub use gpoisson::gpoisson_compare;
pub use hurwitz::{hurwitz_lerch_compare, HlQuantities};
pub use panjer::panjer_compare;
pub use weibull::{weibull_compare, weibull_ratio_mode};

use crate::error::Result;
use crate::families::{self, FamilySpec};
use crate::orders::Relation;
use crate::pmf::TruncatedPmf;
use crate::shape::{classify_steps, is_logconcave, likelihood_ratio, ShapeTag, GUARD_BAND, TIE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// A statement about `X ≤ Y`.
    Forward,
    /// A statement about `Y ≤ X`.
    Reverse,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriterionOutcome {
    Holds,
    Fails,
    NotApplicable,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SideFacts {
    #[serde(skip_serializing_if = "is_false")]
    pub lr_fails: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub hr_fails: bool,
    #[serde(skip_serializing_if = "is_false")]
    pub st_fails: bool,
}

impl SideFacts {
    const NONE: SideFacts = SideFacts { lr_fails: false, hr_fails: false, st_fails: false };
    const NOT_LR: SideFacts = SideFacts { lr_fails: true, hr_fails: false, st_fails: false };
    /// Mean residual life without hazard rate: the survival ratio rises first,
    /// so the usual stochastic order fails as well.
    const NOT_HR: SideFacts = SideFacts { lr_fails: true, hr_fails: true, st_fails: true };
}

/// The verdict of one condition stack.
///
/// `Holds` for a relation asserts it together with every side fact. `Fails`
/// asserts that the relation and every stronger one fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionVerdict {
    pub relation: Relation,
    pub direction: Direction,
    pub outcome: CriterionOutcome,
    pub branch: String,
    pub side_facts: SideFacts,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CriterionVerdict {
    fn new(relation: Relation, outcome: CriterionOutcome, branch: &str, side_facts: SideFacts) -> Self {
        Self { relation, direction: Direction::Forward, outcome, branch: branch.to_string(), side_facts, notes: Vec::new() }
    }

    fn holds(relation: Relation, branch: &str, side_facts: SideFacts) -> Self {
        Self::new(relation, CriterionOutcome::Holds, branch, side_facts)
    }

    fn fails(relation: Relation, branch: &str) -> Self {
        Self::new(relation, CriterionOutcome::Fails, branch, SideFacts::NONE)
    }

    fn not_applicable(branch: &str, note: impl Into<String>) -> Self {
        let mut v = Self::new(Relation::LR, CriterionOutcome::NotApplicable, branch, SideFacts::NONE);
        v.notes.push(note.into());
        v
    }

    fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// The per-relation statements this verdict makes, `true` meaning "holds".
    pub fn claims(&self) -> Vec<(Relation, bool)> {
        let mut out = Vec::new();
        match self.outcome {
            CriterionOutcome::NotApplicable => {}
            CriterionOutcome::Holds => {
                let implied: &[Relation] = match self.relation {
                    Relation::LR => &[Relation::LR, Relation::HR, Relation::MRL, Relation::ST],
                    Relation::HR => &[Relation::HR, Relation::MRL, Relation::ST],
                    Relation::MRL => &[Relation::MRL],
                    Relation::ST => &[Relation::ST],
                };
                out.extend(implied.iter().map(|&r| (r, true)));
                let f = self.side_facts;
                for (flag, r) in [(f.lr_fails, Relation::LR), (f.hr_fails, Relation::HR), (f.st_fails, Relation::ST)] {
                    if flag {
                        out.push((r, false));
                    }
                }
            }
            CriterionOutcome::Fails => {
                let implied: &[Relation] = match self.relation {
                    Relation::LR => &[Relation::LR],
                    Relation::HR => &[Relation::HR, Relation::LR],
                    Relation::MRL => &[Relation::MRL, Relation::HR, Relation::LR],
                    Relation::ST => &[Relation::ST, Relation::HR, Relation::LR],
                };
                out.extend(implied.iter().map(|&r| (r, false)));
            }
        }
        out
    }
}

/// Three-way comparison with a relative band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cmp {
    Less,
    Equal,
    /// Within the band but not equal.
    Near,
    Greater,
}

impl Cmp {
    pub(crate) fn of(lhs: f64, rhs: f64, band: f64) -> Self {
        if lhs == rhs {
            return Cmp::Equal;
        }
        let scale = lhs.abs().max(rhs.abs());
        if (lhs - rhs).abs() <= band * scale {
            Cmp::Near
        } else if lhs < rhs {
            Cmp::Less
        } else {
            Cmp::Greater
        }
    }

    /// `Some(lhs ≤ rhs)` unless the comparison is an unresolved near tie.
    pub(crate) fn le(self) -> Option<bool> {
        match self {
            Cmp::Less | Cmp::Equal => Some(true),
            Cmp::Greater => Some(false),
            Cmp::Near => None,
        }
    }

    pub(crate) fn ge(self) -> Option<bool> {
        match self {
            Cmp::Greater | Cmp::Equal => Some(true),
            Cmp::Less => Some(false),
            Cmp::Near => None,
        }
    }
}

/// Tie tolerance for conditions whose boundary is decided exactly.
pub(crate) const TIE_BAND: f64 = TIE_TOL;

/// Relative band on means that are only known numerically.
pub(crate) const MEAN_BAND: f64 = 1e-10;

/// Predicted shape of `S_X/S_Y` when `l` is strictly unimodal over the support
/// of `Y`: decreasing when `l(0) ≥ 1`, unimodal otherwise. `None` when the
/// hypotheses fail.
pub fn predicted_survival_ratio_shape(l: &[f64], contained: bool) -> Option<ShapeTag> {
    if !contained || l.len() < 3 || l.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return None;
    }
    if !classify_steps(l, TIE_TOL).is_unimodal() {
        return None;
    }
    Some(if l[0] >= 1.0 { ShapeTag::Decreasing } else { ShapeTag::Unimodal })
}

fn unimodal_ratio_verdict(l0: f64, mean_x: f64, mean_y: f64, branch: &str) -> CriterionVerdict {
    if l0 >= 1.0 {
        return CriterionVerdict::holds(Relation::HR, &format!("{branch}-hr"), SideFacts::NOT_LR);
    }
    let mrl = format!("{branch}-mrl");
    match Cmp::of(mean_x, mean_y, MEAN_BAND).le() {
        Some(true) => CriterionVerdict::holds(Relation::MRL, &mrl, SideFacts::NOT_HR),
        Some(false) => CriterionVerdict::fails(Relation::MRL, &mrl),
        None => CriterionVerdict::not_applicable(&mrl, "means tie within numerical error"),
    }
}

/// Decision from a strictly unimodal likelihood ratio on the stored range.
///
/// `l(0) ≥ 1` gives the hazard rate order (and no likelihood ratio order);
/// otherwise the mean residual life order holds exactly when the means are
/// ordered, and then neither the hazard rate nor the usual stochastic order
/// holds.
pub fn unimodal_ratio_decide(px: &TruncatedPmf<f64>, py: &TruncatedPmf<f64>, mean_x: f64, mean_y: f64) -> Result<CriterionVerdict> {
    let l = likelihood_ratio(px, py)?;
    if !l.contained {
        return Ok(CriterionVerdict::not_applicable("unimodal-ratio", "support of X is not contained in that of Y"));
    }
    if !l.excluded.is_empty() {
        return Ok(CriterionVerdict::not_applicable("unimodal-ratio", "gaps in the common support"));
    }
    if !l.shape(TIE_TOL).is_unimodal() {
        return Ok(CriterionVerdict::not_applicable("unimodal-ratio", "likelihood ratio is not strictly unimodal"));
    }
    Ok(unimodal_ratio_verdict(l.values[0], mean_x, mean_y, "unimodal-ratio"))
}

/// Upper support extreme, `None` for an infinite support.
pub type SupportEnd = Option<usize>;

/// Ingredients of the log-concave decision, when they are known in closed form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogConcaveRatio {
    pub l0: f64,
    /// `l(1)/l(0)`.
    pub first: f64,
    /// Limit of `l(j+1)/l(j)` at the upper end of the support of `X`.
    pub terminal: f64,
}

pub(crate) fn logconcave_verdict(r: LogConcaveRatio, mean_x: f64, mean_y: f64, ux: SupportEnd, uy: SupportEnd, branch: &str) -> CriterionVerdict {
    match Cmp::of(r.first, 1.0, TIE_BAND).le() {
        Some(true) => return CriterionVerdict::holds(Relation::LR, &format!("{branch}-lr"), SideFacts::NONE),
        None => return CriterionVerdict::not_applicable(&format!("{branch}-lr"), "l(1)/l(0) within tolerance of one"),
        Some(false) => {}
    }
    let shorter = match (ux, uy) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    };
    let peaked = ux == uy && r.terminal < 1.0;
    if shorter || peaked {
        unimodal_ratio_verdict(r.l0, mean_x, mean_y, branch)
    } else {
        // the ratio keeps increasing to the end of the support
        CriterionVerdict::fails(Relation::LR, &format!("{branch}-lr"))
    }
}

/// Decision from a log-concave likelihood ratio `l` over `0..=u_X`.
///
/// `l(1)/l(0) ≤ 1` gives the likelihood ratio order. Otherwise, when the
/// support of `X` ends first, or both end together with a final ratio below
/// one, `l` is strictly unimodal and the unimodal decision applies.
pub fn logconcave_ratio_decide(l: &[f64], terminal: f64, mean_x: f64, mean_y: f64, supports: (SupportEnd, SupportEnd)) -> Result<CriterionVerdict> {
    if l.len() < 2 {
        return Ok(CriterionVerdict::not_applicable("logconcave-ratio", "ratio needs at least two points"));
    }
    if l.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Ok(CriterionVerdict::not_applicable("logconcave-ratio", "ratio is not positive and finite"));
    }
    if !is_logconcave(l, TIE_TOL)?.holds {
        return Ok(CriterionVerdict::not_applicable("logconcave-ratio", "likelihood ratio is not log-concave"));
    }
    let r = LogConcaveRatio { l0: l[0], first: l[1] / l[0], terminal };
    Ok(logconcave_verdict(r, mean_x, mean_y, supports.0, supports.1, "logconcave-ratio"))
}

/// Applies a normalized procedure: when `(x, y)` violates the normalization
/// the arguments are exchanged and the verdict concerns `Y ≤ X`.
pub(crate) fn normalized<F>(x: &FamilySpec, y: &FamilySpec, keep: bool, decide: F) -> Result<CriterionVerdict>
where
    F: Fn(&FamilySpec, &FamilySpec) -> Result<CriterionVerdict>,
{
    if keep {
        decide(x, y)
    } else {
        Ok(decide(y, x)?.with_direction(Direction::Reverse))
    }
}

/// Every closed-form verdict available for the pair, both directions where
/// the conditions reach them.
pub fn compare(x: &FamilySpec, y: &FamilySpec, tol: f64) -> Result<Vec<CriterionVerdict>> {
    use FamilySpec::*;
    x.validate()?;
    y.validate()?;
    let both = |f: &dyn Fn(&FamilySpec, &FamilySpec) -> Result<CriterionVerdict>| -> Result<Vec<CriterionVerdict>> {
        let first = f(x, y)?;
        let second = f(y, x)?;
        let second = CriterionVerdict { direction: second.direction.flip(), ..second };
        if second.direction != first.direction {
            return Ok(vec![first, second]);
        }
        Ok(vec![if first.outcome == CriterionOutcome::NotApplicable { second } else { first }])
    };
    match (x, y) {
        (a, b) if a.panjer_coefficients().is_some() && b.panjer_coefficients().is_some() => both(&panjer_compare),
        (DiscreteWeibull { .. }, DiscreteWeibull { .. }) => both(&|a, b| weibull_compare(a, b, tol)),
        (GeneralizedPoisson { .. }, GeneralizedPoisson { .. }) => both(&gpoisson_compare),
        (HurwitzLerch { .. }, HurwitzLerch { .. }) => hurwitz_lerch_compare(x, y, tol),
        _ => Ok(vec![CriterionVerdict::not_applicable("none", format!(
            "no closed-form conditions for {} against {}",
            x.name(),
            y.name()
        ))]),
    }
}

/// Mean of a spec for the mean-comparison lines, translated to a common origin.
pub(crate) fn mean_of(spec: &FamilySpec, tol: f64) -> Result<f64> {
    families::mean(spec, tol)
}

/// Shared guard-band comparison for strict inequalities.
pub(crate) fn banded(lhs: f64, rhs: f64) -> Cmp {
    Cmp::of(lhs, rhs, GUARD_BAND)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_shape_threshold() {
        assert_eq!(predicted_survival_ratio_shape(&[1.3, 2.0, 0.5], true), Some(ShapeTag::Decreasing));
        assert_eq!(predicted_survival_ratio_shape(&[0.2, 2.0, 0.5], true), Some(ShapeTag::Unimodal));
        assert_eq!(predicted_survival_ratio_shape(&[0.0, 2.0, 0.5], true), Some(ShapeTag::Unimodal));
        assert_eq!(predicted_survival_ratio_shape(&[0.2, 2.0, 0.5], false), None);
        assert_eq!(predicted_survival_ratio_shape(&[3.0, 2.0, 0.5], true), None);
    }

    #[test]
    fn unimodal_decisions() {
        let v = unimodal_ratio_verdict(1.5, 0.0, 0.0, "t");
        assert_eq!((v.relation, v.outcome), (Relation::HR, CriterionOutcome::Holds));
        assert!(v.side_facts.lr_fails);
        let v = unimodal_ratio_verdict(0.4, 1.0, 2.0, "t");
        assert_eq!((v.relation, v.outcome), (Relation::MRL, CriterionOutcome::Holds));
        assert!(v.side_facts.st_fails && v.side_facts.hr_fails);
        let v = unimodal_ratio_verdict(0.4, 2.0, 1.0, "t");
        assert_eq!((v.relation, v.outcome), (Relation::MRL, CriterionOutcome::Fails));
    }

    #[test]
    fn unimodal_decision_on_explicit_pmfs() {
        // l = (0.5, 2, 0.25): unimodal with l(0) < 1, means 1 and 1.2
        let x = TruncatedPmf::exact(vec![0.1, 0.8, 0.1]).unwrap();
        let y = TruncatedPmf::exact(vec![0.2, 0.4, 0.4]).unwrap();
        let v = unimodal_ratio_decide(&x, &y, 1.0, 1.2).unwrap();
        assert_eq!(v.relation, Relation::MRL);
        assert_eq!(v.outcome, CriterionOutcome::Holds);
    }

    #[test]
    fn logconcave_ratio_cases() {
        let v = logconcave_ratio_decide(&[1.0, 0.5, 0.25], 0.5, 0.0, 0.0, (None, None)).unwrap();
        assert_eq!((v.relation, v.outcome), (Relation::LR, CriterionOutcome::Holds));
        let v = logconcave_ratio_decide(&[1.2, 1.5, 1.0], 0.5, 0.0, 0.0, (Some(2), None)).unwrap();
        assert_eq!((v.relation, v.outcome), (Relation::HR, CriterionOutcome::Holds));
        let v = logconcave_ratio_decide(&[0.8, 1.5, 1.0], 0.5, 1.0, 2.0, (Some(2), None)).unwrap();
        assert_eq!((v.relation, v.outcome), (Relation::MRL, CriterionOutcome::Holds));
        let v = logconcave_ratio_decide(&[1.0, 3.0, 1.0], 0.1, 0.0, 0.0, (None, None)).unwrap();
        assert_eq!((v.relation, v.outcome), (Relation::HR, CriterionOutcome::Holds));
        let v = logconcave_ratio_decide(&[1.0, 0.5, 1.0], 2.0, 0.0, 0.0, (None, None)).unwrap();
        assert_eq!(v.outcome, CriterionOutcome::NotApplicable);
    }

    #[test]
    fn claims_expand_the_chain() {
        let v = CriterionVerdict::fails(Relation::MRL, "t");
        assert_eq!(v.claims(), vec![(Relation::MRL, false), (Relation::HR, false), (Relation::LR, false)]);
        let v = CriterionVerdict::holds(Relation::MRL, "t", SideFacts::NOT_HR);
        assert!(v.claims().contains(&(Relation::ST, false)));
    }
}
