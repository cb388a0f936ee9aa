//! Poisson, binomial and negative binomial pairs.

use super::{logconcave_verdict, mean_of, normalized, Cmp, CriterionVerdict, LogConcaveRatio, SideFacts, TIE_BAND};
use crate::error::{Error, Result};
use crate::families::{self, FamilySpec};
use crate::orders::Relation;

fn le(lhs: f64, rhs: f64) -> bool {
    Cmp::of(lhs, rhs, TIE_BAND).le().unwrap_or(true)
}

fn ge(lhs: f64, rhs: f64) -> bool {
    Cmp::of(lhs, rhs, TIE_BAND).ge().unwrap_or(true)
}

/// Condition stack for a pair of Panjer laws. Within a family the printed
/// normalizations apply (binomial `n₁ ≤ n₂`, negative binomial `r₁ ≥ r₂`);
/// other pairs go through the log-concave decision with the `(a, b)`
/// coefficients, which needs `u_X ≤ u_Y`. A violated normalization swaps the
/// arguments and the verdict then concerns `Y ≤ X`.
pub fn panjer_compare(x: &FamilySpec, y: &FamilySpec) -> Result<CriterionVerdict> {
    use FamilySpec::*;
    match (x, y) {
        (Poisson { lambda: l1 }, Poisson { lambda: l2 }) => Ok(if le(*l1, *l2) {
            CriterionVerdict::holds(Relation::LR, "poisson-rate", SideFacts::NONE)
        } else {
            CriterionVerdict::fails(Relation::LR, "poisson-rate")
        }),
        (Binomial { n: n1, .. }, Binomial { n: n2, .. }) => normalized(x, y, n1 <= n2, binomial),
        (NegBinomial { r: r1, .. }, NegBinomial { r: r2, .. }) => normalized(x, y, r1 >= r2, negbinomial),
        _ => {
            let (ux, uy) = (x.support_end(), y.support_end());
            let keep = match (ux, uy) {
                (Some(a), Some(b)) => a <= b,
                (_, None) => true,
                (None, Some(_)) => false,
            };
            normalized(x, y, keep, cross_family)
        }
    }
}

fn binomial(x: &FamilySpec, y: &FamilySpec) -> Result<CriterionVerdict> {
    let (FamilySpec::Binomial { n: n1, p: p1 }, FamilySpec::Binomial { n: n2, p: p2 }) = (*x, *y) else {
        return Err(Error::Precondition("binomial pair expected".into()));
    };
    let (n1, n2) = (n1 as f64, n2 as f64);
    if le(n1 * p1 * (1.0 - p2), n2 * p2 * (1.0 - p1)) {
        return Ok(CriterionVerdict::holds(Relation::LR, "binomial-lr", SideFacts::NONE));
    }
    // (1 - p)^n compared in log space
    if ge(n1 * (-p1).ln_1p(), n2 * (-p2).ln_1p()) {
        return Ok(CriterionVerdict::holds(Relation::HR, "binomial-hr", SideFacts::NOT_LR));
    }
    if le(n1 * p1, n2 * p2) {
        return Ok(CriterionVerdict::holds(Relation::MRL, "binomial-mrl", SideFacts::NOT_HR));
    }
    Ok(CriterionVerdict::fails(Relation::MRL, "binomial-mrl"))
}

fn negbinomial(x: &FamilySpec, y: &FamilySpec) -> Result<CriterionVerdict> {
    let (FamilySpec::NegBinomial { r: r1, p: p1 }, FamilySpec::NegBinomial { r: r2, p: p2 }) = (*x, *y) else {
        return Err(Error::Precondition("negative binomial pair expected".into()));
    };
    let (r1, r2) = (r1 as f64, r2 as f64);
    if le(r1 * (1.0 - p1), r2 * (1.0 - p2)) {
        return Ok(CriterionVerdict::holds(Relation::LR, "negbinomial-lr", SideFacts::NONE));
    }
    if p1 > p2 {
        if ge(r1 * p1.ln(), r2 * p2.ln()) {
            return Ok(CriterionVerdict::holds(Relation::HR, "negbinomial-hr", SideFacts::NOT_LR));
        }
        if le(r1 * (1.0 - p1) * p2, r2 * (1.0 - p2) * p1) {
            return Ok(CriterionVerdict::holds(Relation::MRL, "negbinomial-mrl", SideFacts::NOT_HR));
        }
    }
    Ok(CriterionVerdict::fails(Relation::MRL, "negbinomial-mrl"))
}

/// `l(x)/l(x-1) = (a₁x + b₁)/(a₂x + b₂)`: log-concave exactly when
/// `a₁b₂ ≤ a₂b₁`, with first ratio `(a₁ + b₁)/(a₂ + b₂)`.
fn cross_family(x: &FamilySpec, y: &FamilySpec) -> Result<CriterionVerdict> {
    let ((a1, b1), (a2, b2)) = match (x.panjer_coefficients(), y.panjer_coefficients()) {
        (Some(c1), Some(c2)) => (c1, c2),
        _ => return Err(Error::Precondition("Panjer pair expected".into())),
    };
    if !le(a1 * b2, a2 * b1) {
        return Ok(CriterionVerdict::not_applicable("panjer-logconcave", "likelihood ratio is not log-concave (a₁b₂ > a₂b₁)"));
    }
    let (ux, uy) = (x.support_end(), y.support_end());
    let terminal = match ux {
        Some(u) => {
            let u = u as f64;
            (a1 * u + b1) / (a2 * u + b2)
        }
        None if a2 > 0.0 => a1 / a2,
        // a₁ ≤ 0 here, so the ratio falls to zero or below one for good
        None => 0.0,
    };
    let l0 = (families::pmf(x, 0)?.ln() - families::pmf(y, 0)?.ln()).exp();
    let ratio = LogConcaveRatio { l0, first: (a1 + b1) / (a2 + b2), terminal };
    let mean_x = mean_of(x, 1e-14)?;
    let mean_y = mean_of(y, 1e-14)?;
    Ok(logconcave_verdict(ratio, mean_x, mean_y, ux, uy, "panjer-logconcave"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{CriterionOutcome, Direction};

    fn spec(s: &str) -> FamilySpec {
        s.parse().unwrap()
    }

    fn decide(x: &str, y: &str) -> CriterionVerdict {
        panjer_compare(&spec(x), &spec(y)).unwrap()
    }

    #[test]
    fn poisson_rates() {
        let v = decide("poisson(1)", "poisson(2)");
        assert_eq!((v.relation, v.outcome, v.branch.as_str()), (Relation::LR, CriterionOutcome::Holds, "poisson-rate"));
        assert_eq!(decide("poisson(2)", "poisson(1)").outcome, CriterionOutcome::Fails);
    }

    #[test]
    fn negbinomial_mrl_boundary() {
        // r₁(1-p₁)p₂ = 0.6 = r₂(1-p₂)p₁ sits on the closed side
        let v = decide("negbinomial(3,0.5)", "negbinomial(2,0.4)");
        assert_eq!((v.relation, v.outcome), (Relation::MRL, CriterionOutcome::Holds));
        assert_eq!(v.branch, "negbinomial-mrl");
        assert!(v.side_facts.st_fails);
    }

    #[test]
    fn binomial_all_fail() {
        let v = decide("binomial(2,0.9)", "binomial(2,0.1)");
        assert_eq!((v.relation, v.outcome), (Relation::MRL, CriterionOutcome::Fails));
    }

    #[test]
    fn binomial_swap_flips_direction() {
        let v = decide("binomial(5,0.3)", "binomial(3,0.3)");
        assert_eq!(v.direction, Direction::Reverse);
        assert_eq!((v.relation, v.outcome), (Relation::LR, CriterionOutcome::Holds));
    }

    #[test]
    fn cross_family_routes() {
        // binomial(4, 0.2) has a = -0.25, b = 1.25; Poisson(2) has a = 0, b = 2
        let v = decide("binomial(4,0.2)", "poisson(2)");
        assert_eq!((v.relation, v.outcome), (Relation::LR, CriterionOutcome::Holds));
        let v = decide("poisson(2)", "binomial(4,0.2)");
        assert_eq!(v.direction, Direction::Reverse);
    }
}
