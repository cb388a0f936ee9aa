//! Generalized Poisson pairs.

use super::{banded, normalized, Cmp, CriterionVerdict, SideFacts};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::orders::Relation;

/// With `λ₁ ≤ λ₂` (arguments swapped otherwise), `l` is decreasing or
/// strictly unimodal, with `l(0) = exp(θ₂ - θ₁)` and
/// `l(1)/l(0) = (θ₁/θ₂) exp(λ₂ - λ₁)`.
///
/// The printed lr conditions are tried first. They miss pairs whose ratio
/// already decreases at the first step although the continuous ratio peaks
/// inside `(0, 1)`; for these `log(θ₂/θ₁) ≥ λ₂ - λ₁` settles the matter,
/// since `l` can only turn downwards once. The hr and mrl branches are
/// reached only when `l(1) > l(0)`.
pub fn gpoisson_compare(x: &FamilySpec, y: &FamilySpec) -> Result<CriterionVerdict> {
    let (FamilySpec::GeneralizedPoisson { lambda: l1, .. }, FamilySpec::GeneralizedPoisson { lambda: l2, .. }) = (*x, *y) else {
        return Err(Error::Precondition("generalized Poisson pair expected".into()));
    };
    normalized(x, y, l1 <= l2, decide)
}

fn decide(x: &FamilySpec, y: &FamilySpec) -> Result<CriterionVerdict> {
    let (FamilySpec::GeneralizedPoisson { theta: t1, lambda: l1 }, FamilySpec::GeneralizedPoisson { theta: t2, lambda: l2 }) = (*x, *y) else {
        return Err(Error::Precondition("generalized Poisson pair expected".into()));
    };
    let (a, b) = (l2 * t1, l1 * t2);
    let log_gap = (t2 / t1).ln();
    let cross = (a - b) / (t1 * t2) + l2 - l1;
    let mut notes = Vec::new();
    match banded(a, b) {
        Cmp::Less => return Ok(CriterionVerdict::holds(Relation::LR, "gp-rate-product", SideFacts::NONE)),
        Cmp::Greater => match banded(log_gap, cross) {
            Cmp::Greater | Cmp::Equal => return Ok(CriterionVerdict::holds(Relation::LR, "gp-log-gap", SideFacts::NONE)),
            Cmp::Near => notes.push("log-gap condition within the guard band".to_string()),
            Cmp::Less => {}
        },
        Cmp::Equal | Cmp::Near => notes.push("λ₂θ₁ and λ₁θ₂ tie within the guard band".to_string()),
    }
    let with_notes = |mut v: CriterionVerdict| {
        v.notes.extend(notes.iter().cloned());
        v
    };
    match banded(log_gap, l2 - l1) {
        Cmp::Greater | Cmp::Equal => return Ok(with_notes(CriterionVerdict::holds(Relation::LR, "gp-first-step", SideFacts::NONE))),
        Cmp::Near => return Ok(with_notes(CriterionVerdict::not_applicable("gp-first-step", "l(1) and l(0) tie within the guard band"))),
        Cmp::Less => {}
    }
    Ok(with_notes(match banded(t1, t2) {
        Cmp::Less | Cmp::Equal => CriterionVerdict::holds(Relation::HR, "gp-hr", SideFacts { lr_fails: true, ..SideFacts::NONE }),
        Cmp::Near => CriterionVerdict::not_applicable("gp-hr", "θ₁ and θ₂ tie within the guard band"),
        Cmp::Greater => match banded(t1 * (1.0 - l2), t2 * (1.0 - l1)) {
            Cmp::Less | Cmp::Equal => CriterionVerdict::holds(Relation::MRL, "gp-mrl", SideFacts::NOT_HR),
            Cmp::Near => CriterionVerdict::not_applicable("gp-mrl", "means tie within the guard band"),
            Cmp::Greater => CriterionVerdict::fails(Relation::MRL, "gp-mrl"),
        },
    }))
}
