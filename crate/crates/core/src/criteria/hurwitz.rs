//! Hurwitz-Lerch pairs, on the native support `{1, 2, …}`.
//!
//! `l(x) = T₂/T₁ (z₁/z₂)^x (a₂ + x)^{s₂+1}/(a₁ + x)^{s₁+1}` and, with
//! `a₁ ≥ a₂`, the forward block decides `X ≤ Y` while a separate block decides
//! `Y ≤ X`.

use super::{banded, mean_of, Cmp, CriterionVerdict, Direction, SideFacts, MEAN_BAND};
use crate::error::{Error, Result};
use crate::families::{hl_normalizer, FamilySpec};
use crate::orders::Relation;
use crate::shape::GUARD_BAND;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Hl {
    z: f64,
    s: f64,
    a: f64,
}

impl Hl {
    fn of(spec: &FamilySpec) -> Result<Self> {
        match *spec {
            FamilySpec::HurwitzLerch { z, s, a } => Ok(Hl { z, s, a }),
            _ => Err(Error::Precondition("Hurwitz-Lerch pair expected".into())),
        }
    }

    /// `log z^x/(a + x)^{s+1}`, the unnormalized log mass.
    fn log_weight(&self, x: f64) -> f64 {
        x * self.z.ln() - (self.s + 1.0) * (self.a + x).ln()
    }
}

/// Normalizers, the first two likelihood ratio values and the means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlQuantities {
    pub t_x: f64,
    pub t_y: f64,
    /// `l(1)` and `l(2)` on the native support.
    pub l1: f64,
    pub l2: f64,
    /// Native means; `None` when infinite.
    pub mean_x: Option<f64>,
    pub mean_y: Option<f64>,
}

impl HlQuantities {
    pub fn compute(x: &FamilySpec, y: &FamilySpec, tol: f64) -> Result<Self> {
        let (p, q) = (Hl::of(x)?, Hl::of(y)?);
        // relative accuracy around 1e-13, far inside the guard band
        let t = |h: Hl| {
            let spread = if h.z < 1.0 { 1.0 / (1.0 - h.z) } else { (h.a + 1.0) / h.s + 1.0 };
            hl_normalizer(h.z, h.s, h.a, h.log_weight(1.0).exp() * spread * 1e-13)
        };
        let (t_x, t_y) = (t(p)?, t(q)?);
        let log_l = |k: f64| t_y.ln() - t_x.ln() + p.log_weight(k) - q.log_weight(k);
        let mean = |spec: &FamilySpec| match mean_of(spec, tol) {
            Ok(m) => Ok(Some(m)),
            Err(Error::ParameterDomain(_)) => Ok(None),
            Err(e) => Err(e),
        };
        Ok(Self { t_x, t_y, l1: log_l(1.0).exp(), l2: log_l(2.0).exp(), mean_x: mean(x)?, mean_y: mean(y)? })
    }
}

/// `log l(x+1) - log l(x)` as `lhs - rhs`, both sides positive-ish sums.
fn increment(p: Hl, q: Hl, x: f64) -> (f64, f64) {
    let lhs = (p.z / q.z).ln() + (q.s + 1.0) * (1.0 / (q.a + x)).ln_1p();
    let rhs = (p.s + 1.0) * (1.0 / (p.a + x)).ln_1p();
    (lhs, rhs)
}

/// Smallest increment over `x ≥ 1` for `z₁ > z₂`. As a function of real `x`
/// the increment falls and then rises (it averages a function with a single
/// turning point over a unit window), so a doubling bracket followed by a
/// ternary search on integers finds it.
fn min_increment(p: Hl, q: Hl) -> (u64, f64, f64) {
    let f = |x: u64| {
        let (l, r) = increment(p, q, x as f64);
        l - r
    };
    let mut hi: u64 = 1;
    while hi < 1 << 60 && f(2 * hi) < f(hi) {
        hi *= 2;
    }
    let (mut lo, mut hi) = (1u64, 2 * hi);
    while hi - lo > 2 {
        let m1 = lo + (hi - lo) / 3;
        let m2 = hi - (hi - lo) / 3;
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let best = (lo..=hi).min_by(|&a, &b| f(a).total_cmp(&f(b))).unwrap_or(lo);
    let (l, r) = increment(p, q, best as f64);
    (best, l, r)
}

/// Forward and reverse verdicts for a Hurwitz-Lerch pair. With `a₁ < a₂` the
/// arguments are exchanged first, so the forward block then speaks about
/// `Y ≤ X`.
pub fn hurwitz_lerch_compare(x: &FamilySpec, y: &FamilySpec, tol: f64) -> Result<Vec<CriterionVerdict>> {
    let (p, q) = (Hl::of(x)?, Hl::of(y)?);
    x.validate()?;
    y.validate()?;
    match Cmp::of(p.a, q.a, GUARD_BAND) {
        Cmp::Near => {
            let v = CriterionVerdict::not_applicable("hl", "a₁ and a₂ tie within the guard band");
            Ok(vec![v.clone(), v.with_direction(Direction::Reverse)])
        }
        Cmp::Less => {
            let k = HlQuantities::compute(y, x, tol)?;
            Ok(vec![reverse(q, p, &k).with_direction(Direction::Forward), forward(q, p, &k).with_direction(Direction::Reverse)])
        }
        Cmp::Equal | Cmp::Greater => {
            let k = HlQuantities::compute(x, y, tol)?;
            Ok(vec![forward(p, q, &k), reverse(p, q, &k).with_direction(Direction::Reverse)])
        }
    }
}

/// Resolves a banded comparison or returns a not-applicable verdict.
macro_rules! resolve {
    ($cmp:expr, $branch:expr, $what:expr) => {
        match $cmp {
            Some(v) => v,
            None => return CriterionVerdict::not_applicable($branch, concat!($what, " within the guard band")),
        }
    };
}

fn mean_le(m1: Option<f64>, m2: Option<f64>) -> Option<bool> {
    Cmp::of(m1?, m2?, MEAN_BAND).le()
}

/// `X ≤ Y` with `a₁ ≥ a₂`.
fn forward(p: Hl, q: Hl, k: &HlQuantities) -> CriterionVerdict {
    let z_le = resolve!(banded(p.z, q.z).le(), "hl", "z₁ and z₂");
    let declining = resolve!(banded(k.l1, k.l2).ge(), "hl", "l(1) and l(2)");
    let first_high = resolve!(banded(k.l1, 1.0).ge(), "hl", "l(1) and one");
    let means = mean_le(k.mean_x, k.mean_y);
    let stack = |lr: &str, hr: &str, mrl: &str| {
        if declining {
            return CriterionVerdict::holds(Relation::LR, lr, SideFacts::NONE);
        }
        if first_high {
            return CriterionVerdict::holds(Relation::HR, hr, SideFacts { lr_fails: true, ..SideFacts::NONE });
        }
        match means {
            Some(true) => CriterionVerdict::holds(Relation::MRL, mrl, SideFacts::NOT_HR),
            Some(false) => CriterionVerdict::fails(Relation::MRL, mrl),
            None => CriterionVerdict::not_applicable(mrl, "means are infinite or tie within numerical error"),
        }
    };
    if !z_le {
        return CriterionVerdict::fails(Relation::MRL, "hl-forward");
    }
    if p.a == q.a {
        return stack("hl-equal-a-lr", "hl-equal-a-hr", "hl-equal-a-mrl");
    }
    let c = (p.s + 1.0) / (p.a + 1.0) + (q.z / p.z).ln();
    let d = (q.s + 1.0) / (q.a + 1.0);
    if resolve!(banded(c, d).ge(), "hl-slope-lr", "slope condition") {
        return CriterionVerdict::holds(Relation::LR, "hl-slope-lr", SideFacts::NONE);
    }
    if p.z < q.z {
        return stack("hl-late-peak-lr", "hl-hr", "hl-mrl");
    }
    if resolve!(banded(p.s, q.s).le(), "hl-equal-z-lr", "s₁ and s₂") {
        return CriterionVerdict::fails(Relation::MRL, "hl-forward");
    }
    stack("hl-equal-z-lr", "hl-equal-z-hr", "hl-equal-z-mrl")
}

/// `Y ≤ X` with `a₁ ≥ a₂`. For `z₁ > z₂` the ratio `l` tends to infinity;
/// it is nondecreasing when the smallest increment is nonnegative and
/// U-shaped when the first increment is negative. A nonnegative first
/// increment followed by a dip is neither, and only the failure of the
/// likelihood ratio order is reported then.
fn reverse(p: Hl, q: Hl, k: &HlQuantities) -> CriterionVerdict {
    let (branch_lr, branch_hr, branch_mrl) = ("hl-rev-lr", "hl-rev-hr", "hl-rev-mrl");
    match banded(p.z, q.z) {
        Cmp::Near => return CriterionVerdict::not_applicable("hl-rev", "z₁ and z₂ within the guard band"),
        Cmp::Less => return CriterionVerdict::fails(Relation::MRL, "hl-rev"),
        Cmp::Equal => {
            let s_le = resolve!(banded(p.s, q.s).le(), "hl-rev-equal-z-lr", "s₁ and s₂");
            return if s_le {
                CriterionVerdict::holds(Relation::LR, "hl-rev-equal-z-lr", SideFacts::NONE)
            } else {
                CriterionVerdict::fails(Relation::MRL, "hl-rev")
            };
        }
        Cmp::Greater => {}
    }
    let rising = resolve!(banded(k.l2, k.l1).ge(), branch_lr, "l(1) and l(2)");
    if rising {
        let (at, lhs, rhs) = min_increment(p, q);
        return match banded(lhs, rhs) {
            Cmp::Greater | Cmp::Equal => CriterionVerdict::holds(Relation::LR, branch_lr, SideFacts::NONE),
            Cmp::Near => CriterionVerdict::not_applicable(branch_lr, "smallest increment of log l within the guard band"),
            Cmp::Less => CriterionVerdict::fails(Relation::LR, "hl-rev-dip").note(format!("l decreases from x = {at} to x = {}", at + 1)),
        };
    }
    let first_low = resolve!(banded(k.l1, 1.0).le(), branch_hr, "l(1) and one");
    if first_low {
        return CriterionVerdict::holds(Relation::HR, branch_hr, SideFacts { lr_fails: true, ..SideFacts::NONE });
    }
    match mean_le(k.mean_y, k.mean_x) {
        Some(true) => CriterionVerdict::holds(Relation::MRL, branch_mrl, SideFacts::NOT_HR),
        Some(false) => CriterionVerdict::fails(Relation::MRL, branch_mrl),
        None => CriterionVerdict::not_applicable(branch_mrl, "means are infinite or tie within numerical error"),
    }
}
