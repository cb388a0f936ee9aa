//! Survival, hazard rate and mean residual life of a truncated pmf.

use std::fmt::Write as _;

use serde::Serialize;

use crate::pmf::TruncatedPmf;
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    Survival,
    HazardRate,
    MeanResidualLife,
}

/// Values of a reliability measure over `domain_start..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityCurve<T> {
    pub kind: CurveKind,
    pub domain_start: i64,
    pub values: Vec<T>,
    pub abs_errors: Vec<T>,
    /// Last `x` carrying a certified value.
    pub horizon: i64,
}

impl<T: Scalar> ReliabilityCurve<T> {
    fn slot(&self, x: i64) -> Option<usize> {
        if x < self.domain_start || x > self.horizon {
            return None;
        }
        Some((x - self.domain_start) as usize)
    }

    pub fn value_at(&self, x: i64) -> Option<T> {
        self.slot(x).map(|i| self.values[i])
    }

    pub fn error_at(&self, x: i64) -> Option<T> {
        self.slot(x).map(|i| self.abs_errors[i])
    }

    /// `(x, value, abs_error)` triples in order.
    pub fn points(&self) -> impl Iterator<Item = (i64, T, T)> + '_ {
        self.values
            .iter()
            .zip(&self.abs_errors)
            .enumerate()
            .map(move |(i, (&v, &e))| (self.domain_start + i as i64, v, e))
    }

    /// CSV with header `x,value,abs_error`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value,abs_error\n");
        for (x, v, e) in self.points() {
            let _ = writeln!(out, "{x},{v},{e}");
        }
        out
    }
}

/// Survival values `S(i) = P(X ≥ i)` for `i = 0..=N+1`, by one backward pass.
pub(crate) fn survival_values<T: Scalar>(p: &TruncatedPmf<T>) -> Vec<T> {
    let probs = p.probs();
    let mut out = vec![T::zero(); probs.len() + 1];
    let mut acc = CompensatedSum::new();
    acc.add(p.tail_mass());
    out[probs.len()] = p.tail_mass();
    for i in (0..probs.len()).rev() {
        acc.add(probs[i]);
        out[i] = acc.value();
    }
    out
}

/// `S(x)` over `x = 0..=N+1`; `S(N+1)` is the tail mass.
pub fn survival_curve<T: Scalar>(p: &TruncatedPmf<T>) -> ReliabilityCurve<T> {
    let values = survival_values(p);
    let eps = T::of(4.0) * T::epsilon();
    let abs_errors = values.iter().map(|&s| s * eps).collect();
    let horizon = values.len() as i64 - 1;
    ReliabilityCurve { kind: CurveKind::Survival, domain_start: 0, values, abs_errors, horizon }
}

/// `h(x) = f(x)/S(x)` while `S(x)` exceeds the numeric floor. When the upper
/// extreme `u` is exactly known, `h(u) = 1` and `h(x) = 1` beyond `u`.
pub fn hazard_curve<T: Scalar>(p: &TruncatedPmf<T>) -> ReliabilityCurve<T> {
    let s = survival_values(p);
    let probs = p.probs();
    let floor = T::numeric_floor();
    let upper = p.upper_extreme();
    let eps = T::of(4.0) * T::epsilon();
    let mut values = Vec::with_capacity(probs.len());
    let mut abs_errors = Vec::with_capacity(probs.len());
    for (x, &f) in probs.iter().enumerate() {
        let h = match upper {
            Some(u) if x >= u => T::one(),
            _ if s[x] > floor => (f / s[x]).min(T::one()),
            _ => break,
        };
        values.push(h);
        abs_errors.push(h * eps);
    }
    let horizon = values.len() as i64 - 1;
    ReliabilityCurve { kind: CurveKind::HazardRate, domain_start: 0, values, abs_errors, horizon }
}

/// `m(x) = Σ_{i>x} S(i) / S(x+1)` for `x = -1, 0, …` while `S(x+1)` exceeds the
/// numeric floor. The unstored part of the numerator contributes its midpoint,
/// and its half-width enters the recorded error.
pub fn mrl_curve<T: Scalar>(p: &TruncatedPmf<T>) -> ReliabilityCurve<T> {
    let s = survival_values(p);
    let floor = T::numeric_floor();
    let excess = p.tail_excess();
    let mid = excess.midpoint();
    let half = excess.half_width();
    let eps = T::of(8.0) * T::epsilon();
    // numerators A(x) = Σ_{i=x+1}^{N+1} S(i), stored at slot x+1
    let mut numer = vec![T::zero(); s.len()];
    let mut acc = CompensatedSum::new();
    for i in (0..s.len()).rev() {
        acc.add(s[i]);
        numer[i] = acc.value();
    }
    let mut values = Vec::with_capacity(s.len());
    let mut abs_errors = Vec::with_capacity(s.len());
    for j in 0..s.len() {
        if !(s[j] > floor) {
            break;
        }
        let a = numer[j] + mid;
        values.push(a / s[j]);
        abs_errors.push((half + a * eps) / s[j]);
    }
    let horizon = values.len() as i64 - 2;
    ReliabilityCurve { kind: CurveKind::MeanResidualLife, domain_start: -1, values, abs_errors, horizon }
}

/// Mean of the (internally indexed) truncated law, `m(-1) - 1`, with its error.
pub fn mean_with_error<T: Scalar>(p: &TruncatedPmf<T>) -> (T, T) {
    let m = mrl_curve(p);
    match (m.value_at(-1), m.error_at(-1)) {
        (Some(v), Some(e)) => (v - T::one(), e),
        _ => (T::zero(), T::infinity()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_law() {
        let p = TruncatedPmf::exact(vec![0.5, 0.5]).unwrap();
        let s = survival_curve(&p);
        assert_eq!(&s.values[..2], &[1.0, 0.5]);
        let h = hazard_curve(&p);
        assert_eq!(h.values, vec![0.5, 1.0]);
        let m = mrl_curve(&p);
        assert_relative_eq!(m.value_at(-1).unwrap(), 1.5);
        assert_relative_eq!(m.value_at(0).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_at_zero() {
        let p = TruncatedPmf::exact(vec![1.0]).unwrap();
        assert_eq!(survival_curve(&p).values[0], 1.0);
        assert_eq!(mrl_curve(&p).value_at(-1), Some(1.0));
    }

    #[test]
    fn geometric_is_memoryless() {
        let q: f64 = 0.6;
        let n = 80;
        let probs: Vec<f64> = (0..=n).map(|x| (1.0 - q) * q.powi(x)).collect();
        let tail = q.powi(n + 1);
        // Σ_{i ≥ N+2} q^i
        let excess = q.powi(n + 2) / (1.0 - q);
        let p = TruncatedPmf::new(probs, tail, 1e-12).unwrap().with_tail_excess(excess, excess).unwrap();
        let h = hazard_curve(&p);
        for &v in &h.values[..60] {
            assert_relative_eq!(v, 1.0 - q, max_relative = 1e-12);
        }
        let m = mrl_curve(&p);
        for x in -1..60 {
            assert_relative_eq!(m.value_at(x).unwrap(), 1.0 / (1.0 - q), max_relative = 1e-10);
        }
    }

    #[test]
    fn csv_layout() {
        let p = TruncatedPmf::exact(vec![0.5, 0.5]).unwrap();
        let csv = mrl_curve(&p).to_csv();
        assert!(csv.starts_with("x,value,abs_error\n-1,1.5,"));
    }
}
