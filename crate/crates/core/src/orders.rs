//! Pointwise verification of the four stochastic orders over truncated supports.
//!
//! Every inequality `L ≤ R` is judged on the relative scale
//! `r = (L - R)/(L + R)`: a point is a certified violation when `r` exceeds
//! `tol` plus the relative rounding error of the evaluated quantities, and
//! uncertain when it exceeds `tol` alone. Products are formed through
//! mantissa/exponent pairs so that tiny masses never underflow.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{mrl_curve, survival_values, ReliabilityCurve};
use crate::pmf::{align, TruncatedPmf};
use crate::scalar::{Magnitude, Scalar};
use crate::shape::resolved_len;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Relation {
    ST,
    HR,
    MRL,
    LR,
}

impl Relation {
    pub const ALL: [Relation; 4] = [Relation::LR, Relation::HR, Relation::MRL, Relation::ST];

    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::ST => "st",
            Relation::HR => "hr",
            Relation::MRL => "mrl",
            Relation::LR => "lr",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

/// Result of checking `X ≤ Y` in one order.
///
/// `Holds` means the defining inequality holds at every examined point up to
/// `horizon`; it is exact only when both supports are finite and fully stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict<T> {
    pub relation: Relation,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<i64>,
    pub horizon: i64,
    /// Relative slack `tol + rounding` at the witness (for `Fails`) or the
    /// largest slack over the examined range (otherwise).
    pub certified_error: T,
    #[serde(skip)]
    pub exact: bool,
    #[serde(skip)]
    pub reason: Option<String>,
    /// Relative size of the violation beyond the slack, at the witness.
    #[serde(skip)]
    pub violation: T,
    /// Relative bound on how much the unstored tails can move the witness
    /// inequality.
    #[serde(skip)]
    pub tail_effect: T,
    /// Largest relative excess over the examined points, leaving out points
    /// where both sides vanish and, for `st`, the origin where both survival
    /// functions equal one. Negative infinity when no point counts.
    #[serde(skip)]
    pub peak_excess: T,
}

impl<T: Scalar> OrderVerdict<T> {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn fails(&self) -> bool {
        self.outcome == Outcome::Fails
    }
}

/// One evaluated inequality `L ≤ R`, in relative terms.
#[derive(Debug, Clone, Copy)]
pub struct PointCheck<T> {
    /// `(L - R)/(L + R)`.
    pub excess: T,
    /// Relative rounding error of `L` and `R`.
    pub rounding: T,
    /// Relative bound on the effect of the unstored tails.
    pub tail_effect: T,
}

impl<T: Scalar> PointCheck<T> {
    pub fn slack(&self, tol: T) -> T {
        tol + self.rounding
    }

    pub fn is_violation(&self, tol: T) -> bool {
        self.excess > self.slack(tol)
    }
}

struct Scan<T> {
    relation: Relation,
    tol: T,
    fail: Option<(i64, PointCheck<T>)>,
    uncertain: Option<i64>,
    max_slack: T,
    peak: T,
    last: i64,
}

impl<T: Scalar> Scan<T> {
    fn new(relation: Relation, tol: T) -> Self {
        Self { relation, tol, fail: None, uncertain: None, max_slack: T::zero(), peak: T::neg_infinity(), last: -2 }
    }

    fn visit(&mut self, x: i64, c: PointCheck<T>) {
        self.visit_with(x, c, true);
    }

    /// `counts` is false for structural ties, which stay out of the peak.
    fn visit_with(&mut self, x: i64, c: PointCheck<T>, counts: bool) {
        self.last = x;
        if counts && c.excess > self.peak {
            self.peak = c.excess;
        }
        let slack = c.slack(self.tol);
        if slack > self.max_slack || slack.is_nan() {
            self.max_slack = slack;
        }
        if self.fail.is_some() {
            return;
        }
        if c.excess > slack {
            self.fail = Some((x, c));
        } else if c.excess > self.tol && self.uncertain.is_none() {
            self.uncertain = Some(x);
        }
    }

    fn finish(self, horizon: i64, exact: bool) -> OrderVerdict<T> {
        let base = OrderVerdict {
            relation: self.relation,
            outcome: Outcome::Holds,
            witness: None,
            horizon,
            certified_error: self.max_slack,
            exact,
            reason: None,
            violation: T::zero(),
            tail_effect: T::zero(),
            peak_excess: self.peak,
        };
        if let Some((x, c)) = self.fail {
            let slack = c.slack(self.tol);
            return OrderVerdict {
                outcome: Outcome::Fails,
                witness: Some(x),
                certified_error: slack,
                violation: c.excess - slack,
                tail_effect: c.tail_effect,
                ..base
            };
        }
        if let Some(x) = self.uncertain {
            return OrderVerdict {
                outcome: Outcome::Inconclusive,
                reason: Some(format!("violation at {x} lies within the numerical error band")),
                ..base
            };
        }
        if self.last < -1 {
            return OrderVerdict { outcome: Outcome::Inconclusive, reason: Some("no resolved points to examine".into()), ..base };
        }
        base
    }
}

fn rel_excess<T: Scalar>(l: T, r: T) -> T {
    if l == r {
        return T::zero();
    }
    (l - r) / (l + r)
}

/// `(a b - c d)/(a b + c d)`, splitting exponents only when a product could
/// lose precision to underflow.
fn product_excess<T: Scalar>(a: T, b: T, c: T, d: T) -> T {
    let floor = T::min_positive_value() / T::epsilon();
    let safe = |u: T, v: T| u == T::zero() || v == T::zero() || u * v > floor;
    if safe(a, b) && safe(c, d) {
        return rel_excess(a * b, c * d);
    }
    T::of(Magnitude::of(a).mul(Magnitude::of(b)).relative_excess(Magnitude::of(c).mul(Magnitude::of(d))))
}

fn aligned<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>) -> Result<(TruncatedPmf<T>, TruncatedPmf<T>)> {
    align(px, py)
}

fn exact_pair<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>) -> bool {
    px.upper_is_exact() && py.upper_is_exact()
}

/// Survival values with the index range on which they are resolved.
fn resolved_survival<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>) -> (Vec<T>, Vec<T>, usize) {
    let sx = survival_values(px);
    let sy = survival_values(py);
    let floor = T::numeric_floor();
    let unresolved = |v: T| v > T::zero() && v <= floor;
    let len = (0..sx.len()).find(|&i| unresolved(sx[i]) || unresolved(sy[i])).unwrap_or(sx.len());
    (sx, sy, len)
}

fn survival_check<T: Scalar>(sx: T, sy: T, tx: T, ty: T) -> PointCheck<T> {
    let total = sx + sy;
    let tail_effect = if total > T::zero() { (tx + ty) / total } else { T::zero() };
    PointCheck { excess: rel_excess(sx, sy), rounding: T::of(8.0) * T::epsilon(), tail_effect }
}

/// An aligned pair with the survival values every check needs.
struct Prepared<T> {
    px: TruncatedPmf<T>,
    py: TruncatedPmf<T>,
    sx: Vec<T>,
    sy: Vec<T>,
    /// Survival values are resolved on `0..slen`.
    slen: usize,
}

impl<T: Scalar> Prepared<T> {
    fn new(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>) -> Result<Self> {
        let (px, py) = aligned(px, py)?;
        let (sx, sy, slen) = resolved_survival(&px, &py);
        Ok(Self { px, py, sx, sy, slen })
    }
}

/// `S_X(x) ≤ S_Y(x)` for every resolved `x` up to `N + 1`.
pub fn check_st<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tol: T) -> Result<OrderVerdict<T>> {
    Ok(st_on(&Prepared::new(px, py)?, tol))
}

fn st_on<T: Scalar>(p: &Prepared<T>, tol: T) -> OrderVerdict<T> {
    let Prepared { px, py, sx, sy, slen: len } = p;
    let len = *len;
    let mut scan = Scan::new(Relation::ST, tol);
    for x in 0..len {
        let counts = x > 0 && !(sx[x] == T::zero() && sy[x] == T::zero());
        scan.visit_with(x as i64, survival_check(sx[x], sy[x], px.tail_mass(), py.tail_mass()), counts);
    }
    scan.finish(len as i64 - 1, exact_pair(px, py) && len == sx.len())
}

/// Evaluates the hazard-rate inequality at `x` as `f_Y S_X ≤ f_X S_Y`, or as the
/// equivalent `S_X(x+1) S_Y ≤ S_Y(x+1) S_X` when both hazards exceed one half
/// and `f ≈ S` would hide the difference. The flag is false when both products
/// vanish.
fn hr_point<T: Scalar>(f: (T, T), s: (T, T), next: (T, T), tail: (T, T)) -> (PointCheck<T>, bool) {
    let ((fx, fy), (sx, sy), (nx, ny), (tx, ty)) = (f, s, next, tail);
    let half = T::of(0.5);
    let resolved = |v: T| v == T::zero() || v > T::numeric_floor();
    let steep = fx > half * sx && fy > half * sy && resolved(nx) && resolved(ny);
    // (a, b, c, d) for the products a b ≤ c d; dx, dy divide the tail masses
    let ((a, b, c, d), dx, dy) = if steep { ((nx, sy, ny, sx), nx, ny) } else { ((fy, sx, fx, sy), sx, sy) };
    let excess = product_excess(a, b, c, d);
    let mut tail_effect = T::zero();
    if dx > T::zero() {
        tail_effect = tail_effect + tx / dx;
    }
    if dy > T::zero() {
        tail_effect = tail_effect + ty / dy;
    }
    let vanish = |u: T, v: T| u == T::zero() || v == T::zero();
    let counts = !(vanish(a, b) && vanish(c, d));
    (PointCheck { excess, rounding: T::of(16.0) * T::epsilon(), tail_effect }, counts)
}

/// Hazard-rate order, through `f_Y S_X ≤ f_X S_Y` (equivalently `S_X/S_Y`
/// nonincreasing), over every resolved `x`.
pub fn check_hr<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tol: T) -> Result<OrderVerdict<T>> {
    Ok(hr_on(&Prepared::new(px, py)?, tol))
}

fn hr_on<T: Scalar>(p: &Prepared<T>, tol: T) -> OrderVerdict<T> {
    let Prepared { px, py, sx, sy, slen } = p;
    let len = resolved_len(px, py).min(*slen);
    let mut scan = Scan::new(Relation::HR, tol);
    for x in 0..len {
        let tails = (px.tail_mass(), py.tail_mass());
        let (c, counts) = hr_point((px.mass(x), py.mass(x)), (sx[x], sy[x]), (sx[x + 1], sy[x + 1]), tails);
        scan.visit_with(x as i64, c, counts);
    }
    scan.finish(len as i64 - 1, exact_pair(px, py) && len == px.probs().len())
}

/// Hazard-rate order through the hazard curves themselves: `h_X(x) ≥ h_Y(x)`
/// wherever both hazards are defined. An independent route to [`check_hr`].
pub fn check_hr_by_hazard<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tol: T) -> Result<OrderVerdict<T>> {
    let (px, py) = aligned(px, py)?;
    let (sx, sy, slen) = resolved_survival(&px, &py);
    let len = resolved_len(&px, &py).min(slen);
    let mut scan = Scan::new(Relation::HR, tol);
    let one = T::one();
    for x in 0..len {
        let h = |f: T, s: T, exact_end: bool| {
            if s > T::zero() {
                (f / s).min(one)
            } else if exact_end {
                one
            } else {
                T::nan()
            }
        };
        let hx = h(px.mass(x), sx[x], px.upper_is_exact());
        let hy = h(py.mass(x), sy[x], py.upper_is_exact());
        if hx.is_nan() || hy.is_nan() {
            break;
        }
        let c = PointCheck { excess: rel_excess(hy, hx), rounding: T::of(16.0) * T::epsilon(), tail_effect: T::zero() };
        scan.visit(x as i64, c);
    }
    let last = scan.last;
    Ok(scan.finish(last, exact_pair(&px, &py) && len == px.probs().len()))
}

/// Mean-residual-life order over `x = -1, 0, …` while both residual lives are
/// defined; the certified error of each curve widens the tolerance.
pub fn check_mrl<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tol: T) -> Result<OrderVerdict<T>> {
    let p = Prepared::new(px, py)?;
    let (mx, my) = (mrl_curve(&p.px), mrl_curve(&p.py));
    Ok(mrl_on(&p, &mx, &my, tol))
}

fn mrl_on<T: Scalar>(p: &Prepared<T>, mx: &ReliabilityCurve<T>, my: &ReliabilityCurve<T>, tol: T) -> OrderVerdict<T> {
    let Prepared { px, py, sx, sy, .. } = p;
    let horizon = mx.horizon.min(my.horizon);
    let n_plus_1 = px.probs().len() as i64;
    let mut scan = Scan::new(Relation::MRL, tol);
    for x in -1..=horizon {
        let (Some(a), Some(b), Some(ea), Some(eb)) = (mx.value_at(x), my.value_at(x), mx.error_at(x), my.error_at(x)) else {
            break;
        };
        let total = a + b;
        let j = (x + 1) as usize;
        // moving the lumped tails anywhere past the horizon shifts each numerator
        // by at most the excess bound plus (N + 1 - x) times the tail mass
        let reach = T::of((n_plus_1 - x) as f64);
        let shift = |p: &TruncatedPmf<T>, s: T| (p.tail_excess().upper + reach * p.tail_mass()) / s;
        let tail_effect = (shift(px, sx[j]) + shift(py, sy[j])) / total;
        let rounding = (ea + eb) / total;
        scan.visit(x, PointCheck { excess: rel_excess(a, b), rounding, tail_effect });
    }
    let last = scan.last;
    scan.finish(last, exact_pair(px, py))
}

/// Likelihood-ratio order: `f_X(x') f_Y(x) ≤ f_X(x) f_Y(x')` for consecutive
/// points `x < x'` of the union of the supports, which encodes `a/0 = +∞`.
pub fn check_lr<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tol: T) -> Result<OrderVerdict<T>> {
    let (px, py) = aligned(px, py)?;
    Ok(lr_on(&px, &py, tol))
}

fn lr_on<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tol: T) -> OrderVerdict<T> {
    let len = resolved_len(px, py);
    let mut scan = Scan::new(Relation::LR, tol);
    let mut prev: Option<usize> = None;
    let mut horizon = -1;
    for x in 0..len {
        let (fx, fy) = (px.mass(x), py.mass(x));
        if fx == T::zero() && fy == T::zero() {
            continue;
        }
        horizon = x as i64;
        if let Some(p) = prev {
            let excess = product_excess(fx, py.mass(p), px.mass(p), fy);
            let c = PointCheck { excess, rounding: T::of(8.0) * T::epsilon(), tail_effect: T::zero() };
            let vanish = |a: T, b: T| a == T::zero() || b == T::zero();
            scan.visit_with(p as i64, c, !(vanish(fx, py.mass(p)) && vanish(px.mass(p), fy)));
        }
        prev = Some(x);
    }
    if prev.is_some() && scan.last < -1 {
        // a single support point is trivially ordered
        scan.last = horizon;
    }
    scan.finish(horizon, exact_pair(px, py) && len == px.probs().len())
}

/// Re-evaluates one defining inequality at `x` in isolation.
pub fn point_check<T: Scalar>(relation: Relation, px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, x: i64) -> Result<PointCheck<T>> {
    let (px, py) = aligned(px, py)?;
    let (sx, sy, _) = resolved_survival(&px, &py);
    let bad = || Error::Precondition(format!("{relation} has no point {x}"));
    match relation {
        Relation::ST => {
            let i = usize::try_from(x).map_err(|_| bad())?;
            Ok(survival_check(*sx.get(i).ok_or_else(bad)?, *sy.get(i).ok_or_else(bad)?, px.tail_mass(), py.tail_mass()))
        }
        Relation::HR => {
            let i = usize::try_from(x).map_err(|_| bad())?;
            if i >= px.probs().len() {
                return Err(bad());
            }
            let tails = (px.tail_mass(), py.tail_mass());
            Ok(hr_point((px.mass(i), py.mass(i)), (sx[i], sy[i]), (sx[i + 1], sy[i + 1]), tails).0)
        }
        Relation::LR => {
            let i = usize::try_from(x).map_err(|_| bad())?;
            let next = (i + 1..px.probs().len()).find(|&j| px.mass(j) > T::zero() || py.mass(j) > T::zero()).ok_or_else(bad)?;
            let excess = product_excess(px.mass(next), py.mass(i), px.mass(i), py.mass(next));
            Ok(PointCheck { excess, rounding: T::of(8.0) * T::epsilon(), tail_effect: T::zero() })
        }
        Relation::MRL => {
            let mx = mrl_curve(&px);
            let my = mrl_curve(&py);
            let (a, b) = (mx.value_at(x).ok_or_else(bad)?, my.value_at(x).ok_or_else(bad)?);
            let (ea, eb) = (mx.error_at(x).ok_or_else(bad)?, my.error_at(x).ok_or_else(bad)?);
            Ok(PointCheck { excess: rel_excess(a, b), rounding: (ea + eb) / (a + b), tail_effect: T::zero() })
        }
    }
}

/// The four oracle verdicts for `X ≤ Y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllVerdicts<T> {
    pub lr: OrderVerdict<T>,
    pub hr: OrderVerdict<T>,
    pub mrl: OrderVerdict<T>,
    pub st: OrderVerdict<T>,
    /// Internal (truncated) means `m(-1) - 1`.
    pub mean_x: T,
    pub mean_y: T,
}

impl<T: Scalar> AllVerdicts<T> {
    pub fn get(&self, relation: Relation) -> &OrderVerdict<T> {
        match relation {
            Relation::LR => &self.lr,
            Relation::HR => &self.hr,
            Relation::MRL => &self.mrl,
            Relation::ST => &self.st,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &OrderVerdict<T>> {
        [&self.lr, &self.hr, &self.mrl, &self.st].into_iter()
    }
}

/// A failure that the unstored tails cannot explain, within the premise's range.
fn contradicts<T: Scalar>(premise: &OrderVerdict<T>, conclusion: &OrderVerdict<T>) -> bool {
    if !premise.holds() || !conclusion.fails() {
        return false;
    }
    let inside = conclusion.witness.is_some_and(|w| w <= premise.horizon);
    inside && conclusion.violation > conclusion.tail_effect
}

/// Runs all four checks and enforces `lr ⟹ hr ⟹ {mrl, st}` and
/// `mrl ⟹ E[X] ≤ E[Y]` on certified verdicts.
pub fn check_all<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tol: T) -> Result<AllVerdicts<T>> {
    let p = Prepared::new(px, py)?;
    let (mx, my) = (mrl_curve(&p.px), mrl_curve(&p.py));
    let lr = lr_on(&p.px, &p.py, tol);
    let hr = hr_on(&p, tol);
    let mrl = mrl_on(&p, &mx, &my, tol);
    let st = st_on(&p, tol);
    for (premise, conclusion) in [(&lr, &hr), (&hr, &mrl), (&hr, &st)] {
        if contradicts(premise, conclusion) {
            return Err(Error::Consistency(format!(
                "{} holds up to {} but {} fails at {:?}",
                premise.relation, premise.horizon, conclusion.relation, conclusion.witness
            )));
        }
    }
    let mean = |c: &ReliabilityCurve<T>| c.value_at(-1).map_or(T::nan(), |v| v - T::one());
    let (mean_x, mean_y) = (mean(&mx), mean(&my));
    if mrl.holds() {
        let slack = tol * (mean_x.abs() + mean_y.abs() + T::of(2.0)) + mx.error_at(-1).unwrap_or(T::zero()) + my.error_at(-1).unwrap_or(T::zero());
        if mean_x > mean_y + slack {
            return Err(Error::Consistency(format!("mrl holds but E[X] = {mean_x} exceeds E[Y] = {mean_y}")));
        }
    }
    Ok(AllVerdicts { lr, hr, mrl, st, mean_x, mean_y })
}
