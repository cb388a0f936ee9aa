//! Monotone / unimodal classification of finite sequences, log-concavity, and
//! the likelihood ratio of two truncated pmfs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::survival_values;
use crate::pmf::{align, TruncatedPmf};
use crate::scalar::Scalar;

/// Relative guard band around the threshold one in ratio-based decisions.
pub const GUARD_BAND: f64 = 1e-9;
/// Default relative tie tolerance for direct scans.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeTag {
    Increasing,
    Decreasing,
    Constant,
    Unimodal,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeClass {
    pub tag: ShapeTag,
    /// First position attaining the maximum, for unimodal sequences.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    /// Range of tied maxima when the peak is flat.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plateau: Option<(usize, usize)>,
    /// Valley positions (a descent followed by an ascent) for `Other`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<usize>,
    /// Entries dropped from the end before classification.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trimmed_tail: Option<usize>,
}

impl ShapeClass {
    fn tagged(tag: ShapeTag) -> Self {
        Self { tag, mode: None, plateau: None, witnesses: Vec::new(), trimmed_tail: None }
    }

    pub fn is_unimodal(&self) -> bool {
        self.tag == ShapeTag::Unimodal
    }
}

fn step<T: Scalar>(a: T, b: T, tie_tol: T) -> i8 {
    if a == b {
        return 0;
    }
    if a.is_infinite() || b.is_infinite() {
        return if b > a { 1 } else { -1 };
    }
    let scale = a.abs().max(b.abs());
    if (b - a).abs() <= tie_tol * scale {
        0
    } else if b > a {
        1
    } else {
        -1
    }
}

/// Classification that tolerates zero and infinite entries (used for ratios).
pub fn classify_steps<T: Scalar>(seq: &[T], tie_tol: T) -> ShapeClass {
    let steps: Vec<i8> = seq.windows(2).map(|w| step(w[0], w[1], tie_tol)).collect();
    let rises = steps.iter().any(|&s| s > 0);
    let falls = steps.iter().any(|&s| s < 0);
    match (rises, falls) {
        (false, false) => return ShapeClass::tagged(ShapeTag::Constant),
        (true, false) => return ShapeClass::tagged(ShapeTag::Increasing),
        (false, true) => return ShapeClass::tagged(ShapeTag::Decreasing),
        _ => {}
    }
    let mut witnesses = Vec::new();
    let mut last_nonzero = 0i8;
    for (i, &s) in steps.iter().enumerate() {
        if s == 0 {
            continue;
        }
        if last_nonzero < 0 && s > 0 {
            witnesses.push(i);
        }
        last_nonzero = s;
    }
    if !witnesses.is_empty() {
        return ShapeClass { witnesses, ..ShapeClass::tagged(ShapeTag::Other) };
    }
    let last_rise = steps.iter().rposition(|&s| s > 0).unwrap_or(0);
    let first_fall = steps.iter().position(|&s| s < 0).unwrap_or(0);
    let mode = last_rise + 1;
    let plateau = (first_fall > mode).then_some((mode, first_fall));
    ShapeClass { mode: Some(mode), plateau, ..ShapeClass::tagged(ShapeTag::Unimodal) }
}

fn check_positive<T: Scalar>(seq: &[T], min_len: usize) -> Result<()> {
    if seq.len() < min_len {
        return Err(Error::Domain(format!("need at least {min_len} entries, got {}", seq.len())));
    }
    if let Some(i) = seq.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::Domain(format!("entry {i} is not a positive finite number")));
    }
    Ok(())
}

/// Direct scan: monotone, constant, strictly unimodal, or other.
pub fn classify_sequence<T: Scalar>(seq: &[T], tie_tol: T) -> Result<ShapeClass> {
    check_positive(seq, 2)?;
    Ok(classify_steps(seq, tie_tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LogConcavity {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<usize>,
}

/// `2 log a_j ≥ log a_{j+1} + log a_{j-1} - tol` for every interior `j`.
pub fn is_logconcave<T: Scalar>(seq: &[T], tol: T) -> Result<LogConcavity> {
    check_positive(seq, 1)?;
    let logs: Vec<T> = seq.iter().map(|v| v.ln()).collect();
    let first_violation = (1..logs.len().saturating_sub(1)).find(|&j| logs[j] + logs[j] < logs[j + 1] + logs[j - 1] - tol);
    Ok(LogConcavity { holds: first_violation.is_none(), first_violation })
}

/// Ratio-based classification of a log-concave sequence from its first and
/// last successive ratios. Returns `None` when either ratio lies within the
/// guard band around one.
pub fn classify_logconcave<T: Scalar>(seq: &[T]) -> Result<Option<ShapeClass>> {
    check_positive(seq, 2)?;
    if let Some(j) = is_logconcave(seq, T::of(TIE_TOL))?.first_violation {
        return Err(Error::Precondition(format!("sequence is not log-concave at {j}")));
    }
    let n = seq.len();
    let band = T::of(GUARD_BAND);
    let first = seq[1] / seq[0];
    let terminal = seq[n - 1] / seq[n - 2];
    let near_one = |r: T| (r - T::one()).abs() <= band;
    if near_one(first) {
        return Ok(None);
    }
    if first < T::one() {
        return Ok(Some(ShapeClass::tagged(ShapeTag::Decreasing)));
    }
    if near_one(terminal) {
        return Ok(None);
    }
    if terminal > T::one() {
        return Ok(Some(ShapeClass::tagged(ShapeTag::Increasing)));
    }
    let mode = (0..n - 1).find(|&j| seq[j + 1] <= seq[j]).unwrap_or(n - 1);
    Ok(Some(ShapeClass { mode: Some(mode), ..ShapeClass::tagged(ShapeTag::Unimodal) }))
}

/// `l(x) = f_X(x)/f_Y(x)` over the examined range, with `a/0 = +∞`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LikelihoodRatio<T> {
    pub values: Vec<T>,
    /// Positions where `f_Y = 0 < f_X`.
    pub infinite_at: Vec<usize>,
    /// Positions where both masses vanish (left out of shape analysis).
    pub excluded: Vec<usize>,
    /// `f_Y(x) > 0` wherever `f_X(x) > 0` over the examined range.
    pub contained: bool,
    /// Entries cut from the end because a mass fell below the numeric floor.
    pub trimmed_tail: usize,
}

impl<T: Scalar> LikelihoodRatio<T> {
    /// Values entering shape analysis, with their positions.
    pub fn shape_points(&self) -> (Vec<usize>, Vec<T>) {
        let mut xs = Vec::with_capacity(self.values.len());
        let mut vs = Vec::with_capacity(self.values.len());
        for (x, &v) in self.values.iter().enumerate() {
            if !self.excluded.contains(&x) {
                xs.push(x);
                vs.push(v);
            }
        }
        (xs, vs)
    }

    /// Direct-scan shape of `l`, with the trimming recorded.
    pub fn shape(&self, tie_tol: T) -> ShapeClass {
        let (xs, vs) = self.shape_points();
        let mut class = if vs.len() < 2 { ShapeClass::tagged(ShapeTag::Constant) } else { classify_steps(&vs, tie_tol) };
        class.mode = class.mode.map(|m| xs[m]);
        class.plateau = class.plateau.map(|(a, b)| (xs[a], xs[b]));
        class.witnesses = class.witnesses.iter().map(|&w| xs[w]).collect();
        if self.trimmed_tail > 0 {
            class.trimmed_tail = Some(self.trimmed_tail);
        }
        class
    }
}

/// Last index up to which every mass is either zero or above the floor.
pub(crate) fn resolved_len<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>) -> usize {
    let floor = T::numeric_floor();
    let unresolved = |v: T| v > T::zero() && v <= floor;
    let n = px.probs().len();
    (0..n).find(|&i| unresolved(px.mass(i)) || unresolved(py.mass(i))).unwrap_or(n)
}

pub fn likelihood_ratio<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>) -> Result<LikelihoodRatio<T>> {
    let (px, py) = align(px, py)?;
    let n = px.probs().len();
    let mut len = resolved_len(&px, &py);
    while len > 0 && px.mass(len - 1) == T::zero() && py.mass(len - 1) == T::zero() {
        len -= 1;
    }
    let mut values = Vec::with_capacity(len);
    let mut infinite_at = Vec::new();
    let mut excluded = Vec::new();
    for x in 0..len {
        let (fx, fy) = (px.mass(x), py.mass(x));
        let v = if fy > T::zero() {
            fx / fy
        } else if fx > T::zero() {
            infinite_at.push(x);
            T::infinity()
        } else {
            excluded.push(x);
            T::nan()
        };
        values.push(v);
    }
    Ok(LikelihoodRatio { contained: infinite_at.is_empty(), values, infinite_at, excluded, trimmed_tail: n - len })
}

/// `S_X(x)/S_Y(x)` over the range where both survival values are resolved,
/// with absolute errors.
pub fn survival_ratio<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>) -> Result<(Vec<T>, Vec<T>)> {
    let (px, py) = align(px, py)?;
    let sx = survival_values(&px);
    let sy = survival_values(&py);
    let floor = T::numeric_floor();
    let eps = T::of(8.0) * T::epsilon();
    let mut values = Vec::new();
    let mut errors = Vec::new();
    for (&a, &b) in sx.iter().zip(&sy) {
        if !(b > floor) || (a > T::zero() && a <= floor) {
            break;
        }
        let r = a / b;
        values.push(r);
        errors.push(r * eps);
    }
    Ok((values, errors))
}

/// Direct-scan shape of `S_X/S_Y` over the resolved range.
pub fn survival_ratio_shape<T: Scalar>(px: &TruncatedPmf<T>, py: &TruncatedPmf<T>, tie_tol: T) -> Result<ShapeClass> {
    let (values, _) = survival_ratio(px, py)?;
    if values.len() < 2 {
        return Ok(ShapeClass::tagged(ShapeTag::Constant));
    }
    Ok(classify_steps(&values, tie_tol))
}
