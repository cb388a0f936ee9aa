//! Mass tables built from the successive-ratio recursion, anchored at the mode.

use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;

/// Normalized masses over `0..=E` plus bounds on what lies past `E`.
pub(crate) struct Extended {
    pub probs: Vec<f64>,
    /// Upper bound on the mass past the last entry.
    pub beyond_mass: f64,
    /// Upper bound on `Σ_{i ≥ E+2} P(X ≥ i, X > E)`.
    pub beyond_excess: f64,
    pub exact: bool,
}

pub(crate) struct RatioRecursion<'a> {
    pub mode: usize,
    /// `w(x) / w(x-1)` for `x ≥ 1`.
    pub ratio: &'a dyn Fn(usize) -> f64,
    /// An upper bound on `sup_{i > x} ratio(i)`.
    pub sup_after: &'a dyn Fn(usize) -> f64,
    /// Last support point for finite supports.
    pub support_end: Option<usize>,
}

impl RatioRecursion<'_> {
    /// Runs the recursion up from the mode until the unexplored weight is below
    /// `thr` relative to the accumulated total and at least `min_len` entries
    /// are stored.
    pub fn build(&self, min_len: usize, thr: f64, cap: usize) -> Result<Extended> {
        let mut w = vec![0.0; self.mode + 1];
        w[self.mode] = 1.0;
        for x in (1..=self.mode).rev() {
            w[x - 1] = w[x] / (self.ratio)(x);
        }
        let mut running: f64 = w.iter().sum();
        let mut bound_rho = 0.0;
        let mut exact = false;
        loop {
            let last = w.len() - 1;
            if let Some(end) = self.support_end {
                if last >= end {
                    exact = true;
                    break;
                }
            }
            if w.len() >= min_len {
                if w[last] == 0.0 {
                    break;
                }
                let rho = (self.sup_after)(last);
                if rho < 1.0 && w[last] * rho / (1.0 - rho) <= thr * running {
                    bound_rho = rho;
                    break;
                }
            }
            if w.len() >= cap {
                return Err(Error::Convergence { what: "mass table".into(), cap });
            }
            let next = w[last] * (self.ratio)(last + 1);
            running += next;
            w.push(next);
        }
        let mut total = CompensatedSum::new();
        for &v in &w {
            total.add(v);
        }
        let total = total.value();
        let last = *w.last().unwrap_or(&0.0) / total;
        let probs: Vec<f64> = w.iter().map(|v| v / total).collect();
        let (beyond_mass, beyond_excess) = if exact || last == 0.0 || bound_rho == 0.0 {
            (0.0, 0.0)
        } else {
            let r = bound_rho;
            (last * r / (1.0 - r), last * r / ((1.0 - r) * (1.0 - r)))
        };
        Ok(Extended { probs, beyond_mass, beyond_excess, exact })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_recursion() {
        let q = 0.3;
        let rec = RatioRecursion { mode: 0, ratio: &|_| q, sup_after: &|_| q, support_end: None };
        let t = rec.build(1, 1e-20, 1000).unwrap();
        for (x, p) in t.probs.iter().enumerate().take(10) {
            assert!((p - (1.0 - q) * q.powi(x as i32)).abs() < 1e-16);
        }
        assert!(t.beyond_mass < 1e-19);
    }

    #[test]
    fn finite_support_is_exact() {
        let rec = RatioRecursion { mode: 1, ratio: &|x| if x == 1 { 2.0 } else { 0.5 }, sup_after: &|_| 0.5, support_end: Some(2) };
        let t = rec.build(1, 1e-20, 1000).unwrap();
        assert!(t.exact);
        assert_eq!(t.probs.len(), 3);
        assert!((t.probs[1] - 0.5).abs() < 1e-16);
    }
}
