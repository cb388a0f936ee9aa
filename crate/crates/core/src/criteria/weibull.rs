//! Discrete Weibull pairs, decided through the survival ratio
//! `L(x) = exp(x^{β₂}/α₂^{β₂} - x^{β₁}/α₁^{β₁})`.

use super::{mean_of, normalized, Cmp, CriterionVerdict, SideFacts, MEAN_BAND, TIE_BAND};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::orders::Relation;

/// Real maximizer of `L` when `β₁ ≠ β₂`.
pub fn weibull_ratio_mode(alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> Option<f64> {
    if beta1 == beta2 {
        return None;
    }
    let base = beta1 * alpha2.powf(beta2) / (beta2 * alpha1.powf(beta1));
    Some(base.powf(1.0 / (beta2 - beta1)))
}

/// With `β₁ ≥ β₂` (arguments swapped otherwise), `L` rises from `L(0) = 1`
/// at most once, so the hazard rate order holds iff `α₁^{β₁} ≤ α₂^{β₂}`, and
/// otherwise the mean residual life order holds iff the means are ordered.
pub fn weibull_compare(x: &FamilySpec, y: &FamilySpec, tol: f64) -> Result<CriterionVerdict> {
    let (FamilySpec::DiscreteWeibull { beta: b1, .. }, FamilySpec::DiscreteWeibull { beta: b2, .. }) = (*x, *y) else {
        return Err(Error::Precondition("discrete Weibull pair expected".into()));
    };
    normalized(x, y, b1 >= b2, |x, y| decide(x, y, tol))
}

fn decide(x: &FamilySpec, y: &FamilySpec, tol: f64) -> Result<CriterionVerdict> {
    let (FamilySpec::DiscreteWeibull { alpha: a1, beta: b1 }, FamilySpec::DiscreteWeibull { alpha: a2, beta: b2 }) = (*x, *y) else {
        return Err(Error::Precondition("discrete Weibull pair expected".into()));
    };
    let mode = weibull_ratio_mode(a1, b1, a2, b2);
    let scale = Cmp::of(b1 * a1.ln(), b2 * a2.ln(), TIE_BAND).le().unwrap_or(true);
    let verdict = if scale {
        CriterionVerdict::holds(Relation::HR, "weibull-scale", SideFacts::NONE)
    } else {
        let mean_x = mean_of(x, tol)?;
        let mean_y = mean_of(y, tol)?;
        // the laws differ here, so equal computed means only reflect rounding
        // or underflow
        match Cmp::of(mean_x, mean_y, MEAN_BAND.max(tol)) {
            Cmp::Less => CriterionVerdict::holds(Relation::MRL, "weibull-mean", SideFacts { lr_fails: true, hr_fails: true, st_fails: true }),
            Cmp::Greater => CriterionVerdict::fails(Relation::MRL, "weibull-mean"),
            Cmp::Equal | Cmp::Near => CriterionVerdict::not_applicable("weibull-mean", "means tie within numerical error"),
        }
    };
    Ok(match mode {
        Some(m) => verdict.note(format!("survival ratio peaks at x0 = {m}")),
        None => verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{CriterionOutcome, Direction};

    fn run(x: &str, y: &str) -> CriterionVerdict {
        weibull_compare(&x.parse().unwrap(), &y.parse().unwrap(), 1e-12).unwrap()
    }

    #[test]
    fn scale_condition() {
        let v = run("dweibull(0.3,0.3)", "dweibull(0.5,0.2)");
        assert_eq!((v.relation, v.outcome, v.branch.as_str()), (Relation::HR, CriterionOutcome::Holds, "weibull-scale"));
        assert_eq!(v.direction, Direction::Forward);
    }

    #[test]
    fn mean_condition() {
        let v = run("dweibull(0.75,0.3)", "dweibull(0.5,0.2)");
        assert_eq!((v.relation, v.outcome, v.branch.as_str()), (Relation::MRL, CriterionOutcome::Holds, "weibull-mean"));
        assert!(v.side_facts.hr_fails && v.side_facts.st_fails);
    }

    #[test]
    fn identical_laws_tie_on_scale() {
        let v = run("dweibull(0.7,1.5)", "dweibull(0.7,1.5)");
        assert_eq!((v.relation, v.outcome), (Relation::HR, CriterionOutcome::Holds));
        assert!(v.notes.is_empty());
    }

    #[test]
    fn swap_when_shape_smaller() {
        let v = run("dweibull(0.5,0.2)", "dweibull(0.3,0.3)");
        assert_eq!(v.direction, Direction::Reverse);
    }

    #[test]
    fn underflowing_means_are_not_compared() {
        // P(X ≥ 1) is below the smallest double for both laws
        let v = run("dweibull(0.10149488856614469,2.92430137592324)", "dweibull(0.09373522938248066,2.92430137592324)");
        assert_eq!((v.outcome, v.branch.as_str()), (CriterionOutcome::NotApplicable, "weibull-mean"));
    }

    #[test]
    fn mode_of_ratio() {
        // stationary point of x^{β₂}/α₂^{β₂} - x^{β₁}/α₁^{β₁}
        let (a1, b1, a2, b2) = (0.75, 0.3, 0.5, 0.2);
        let m = weibull_ratio_mode(a1, b1, a2, b2).unwrap();
        let d = b2 * m.powf(b2 - 1.0) / a2.powf(b2) - b1 * m.powf(b1 - 1.0) / a1.powf(b1);
        assert!(d.abs() < 1e-12);
    }
}
