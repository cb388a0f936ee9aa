//! Finite probability vectors with an accounted-for tail.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{stable_sum, Scalar};

/// Bounds on `Σ_{i ≥ N+2} S(i)`, the part of the mean-residual-life numerator
/// that lies beyond the stored entries (`N` is the last stored index).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailExcess<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> TailExcess<T> {
    pub fn zero() -> Self {
        Self { lower: T::zero(), upper: T::zero() }
    }

    pub fn unknown() -> Self {
        Self { lower: T::zero(), upper: T::infinity() }
    }

    pub fn midpoint(&self) -> T {
        if self.upper.is_finite() {
            (self.lower + self.upper) / T::of(2.0)
        } else {
            self.lower
        }
    }

    pub fn half_width(&self) -> T {
        (self.upper - self.lower) / T::of(2.0)
    }
}

/// Probability vector over `{0, …, N}` plus the mass `P(X > N)` left out.
///
/// Index `i` corresponds to the native value `i + origin_shift`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedPmf<T> {
    origin_shift: usize,
    probs: Vec<T>,
    tail_mass: T,
    tail_tol: T,
    upper_is_exact: bool,
    tail_excess: TailExcess<T>,
}

impl<T: Scalar> TruncatedPmf<T> {
    /// Builds a truncated pmf, checking non-negativity, the tail bound and
    /// normalization to within `4·eps·len`.
    pub fn new(probs: Vec<T>, tail_mass: T, tail_tol: T) -> Result<Self> {
        let upper_is_exact = tail_mass == T::zero();
        let tail_excess = if upper_is_exact { TailExcess::zero() } else { TailExcess::unknown() };
        let pmf = Self { origin_shift: 0, probs, tail_mass, tail_tol, upper_is_exact, tail_excess };
        pmf.validate()?;
        Ok(pmf)
    }

    /// A finite-support pmf with nothing left in the tail.
    pub fn exact(probs: Vec<T>) -> Result<Self> {
        Self::new(probs, T::zero(), T::of(crate::DEFAULT_TAIL_TOL))
    }

    pub(crate) fn from_parts(
        probs: Vec<T>,
        tail_mass: T,
        tail_tol: T,
        upper_is_exact: bool,
        tail_excess: TailExcess<T>,
        origin_shift: usize,
    ) -> Self {
        Self { origin_shift, probs, tail_mass, tail_tol, upper_is_exact, tail_excess }
    }

    pub fn with_origin_shift(mut self, shift: usize) -> Self {
        self.origin_shift = shift;
        self
    }

    pub fn with_tail_excess(mut self, lower: T, upper: T) -> Result<Self> {
        if !(lower >= T::zero() && upper >= lower) {
            return Err(Error::InvalidPmf(format!("tail excess bounds [{lower}, {upper}] are not ordered")));
        }
        self.tail_excess = TailExcess { lower, upper };
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probs.is_empty() {
            return Err(Error::InvalidPmf("no stored entries".into()));
        }
        if let Some(i) = self.probs.iter().position(|p| !(*p >= T::zero()) || !p.is_finite()) {
            return Err(Error::InvalidPmf(format!("entry {i} is negative or not finite")));
        }
        if !(self.tail_mass >= T::zero()) {
            return Err(Error::InvalidPmf("negative tail mass".into()));
        }
        if !(self.tail_tol > T::zero()) {
            return Err(Error::InvalidPmf("tail tolerance must be positive".into()));
        }
        if self.tail_mass >= self.tail_tol {
            return Err(Error::InvalidPmf(format!(
                "tail mass {} is not below tolerance {}",
                self.tail_mass, self.tail_tol
            )));
        }
        let total = stable_sum(&self.probs) + self.tail_mass;
        let slack = T::of(4.0) * T::epsilon() * T::of(self.probs.len() as f64);
        if (total - T::one()).abs() > slack {
            return Err(Error::InvalidPmf(format!("total mass {total} differs from 1 by more than {slack}")));
        }
        Ok(())
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn tail_mass(&self) -> T {
        self.tail_mass
    }

    pub fn tail_tol(&self) -> T {
        self.tail_tol
    }

    pub fn upper_is_exact(&self) -> bool {
        self.upper_is_exact
    }

    pub fn origin_shift(&self) -> usize {
        self.origin_shift
    }

    pub fn tail_excess(&self) -> TailExcess<T> {
        self.tail_excess
    }

    /// Index of the last stored entry.
    pub fn last_index(&self) -> usize {
        self.probs.len() - 1
    }

    /// Mass at index `x`, with zero beyond the stored range.
    pub fn mass(&self, x: usize) -> T {
        self.probs.get(x).copied().unwrap_or_else(T::zero)
    }

    /// Upper support extreme when the support is finite and fully stored.
    pub fn upper_extreme(&self) -> Option<usize> {
        if !self.upper_is_exact {
            return None;
        }
        self.probs.iter().rposition(|p| *p > T::zero())
    }

    pub fn cast<U: Scalar>(&self) -> TruncatedPmf<U> {
        let c = |x: T| U::of(x.as_f64());
        TruncatedPmf {
            origin_shift: self.origin_shift,
            probs: self.probs.iter().map(|&p| c(p)).collect(),
            tail_mass: c(self.tail_mass),
            tail_tol: c(self.tail_tol),
            upper_is_exact: self.upper_is_exact,
            tail_excess: TailExcess { lower: c(self.tail_excess.lower), upper: c(self.tail_excess.upper) },
        }
    }

    /// Moves the origin down by `k`, inserting `k` leading zeros.
    pub fn shift_origin_down(&self, k: usize) -> Result<Self> {
        if k > self.origin_shift {
            return Err(Error::Precondition(format!(
                "cannot lower origin by {k} below native zero (shift {})",
                self.origin_shift
            )));
        }
        if k == 0 {
            return Ok(self.clone());
        }
        let mut probs = vec![T::zero(); k];
        probs.extend_from_slice(&self.probs);
        // Every stored survival value past the old end moves k slots right,
        // which leaves the tail sums unchanged.
        Ok(Self { origin_shift: self.origin_shift - k, probs, ..self.clone() })
    }

    /// Stores entries up to index `n`, padding with zeros (exact supports) or
    /// keeping the stored range when `n` is already covered.
    pub fn extend_exact(&self, n: usize) -> Result<Self> {
        if n <= self.last_index() {
            return Ok(self.clone());
        }
        if !self.upper_is_exact {
            return Err(Error::Precondition("only exact supports can be padded with zeros".into()));
        }
        let mut probs = self.probs.clone();
        probs.resize(n + 1, T::zero());
        Ok(Self { probs, ..self.clone() })
    }

    /// Keeps entries up to index `n` and moves the rest into the tail.
    pub fn fold_to(&self, n: usize) -> Self {
        let last = self.last_index();
        if n >= last {
            return self.clone();
        }
        let mut tail = self.tail_mass;
        let mut survival = self.tail_mass;
        let mut excess = T::zero();
        // survival at i for i = last+1 down to n+2 feeds the new excess
        let mut i = last + 1;
        while i >= n + 2 {
            excess = excess + survival;
            i -= 1;
            survival = survival + self.probs[i];
        }
        for &p in &self.probs[n + 1..] {
            tail = tail + p;
        }
        let tail_tol = if tail >= self.tail_tol { tail + tail * T::of(4.0) * T::epsilon() } else { self.tail_tol };
        let upper_is_exact = self.upper_is_exact && tail == T::zero();
        Self {
            origin_shift: self.origin_shift,
            probs: self.probs[..=n].to_vec(),
            tail_mass: tail,
            tail_tol,
            upper_is_exact,
            tail_excess: TailExcess {
                lower: self.tail_excess.lower + excess,
                upper: self.tail_excess.upper + excess,
            },
        }
    }
}

/// Brings two pmfs onto a common origin and a common index range.
///
/// The origin becomes the smaller native origin of the two; the range becomes
/// the longer stored range when the shorter support is exact, and the shorter
/// range (folding the excess of the longer one into its tail) otherwise.
pub fn align<T: Scalar>(x: &TruncatedPmf<T>, y: &TruncatedPmf<T>) -> Result<(TruncatedPmf<T>, TruncatedPmf<T>)> {
    let origin = x.origin_shift.min(y.origin_shift);
    let x = x.shift_origin_down(x.origin_shift - origin)?;
    let y = y.shift_origin_down(y.origin_shift - origin)?;
    let (nx, ny) = (x.last_index(), y.last_index());
    if nx == ny {
        return Ok((x, y));
    }
    let (short, long, x_is_short) = if nx < ny { (x, y, true) } else { (y, x, false) };
    let (short, long) = if short.upper_is_exact {
        let n = long.last_index();
        (short.extend_exact(n)?, long)
    } else {
        let n = short.last_index();
        (short, long.fold_to(n))
    };
    Ok(if x_is_short { (short, long) } else { (long, short) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_normalization() {
        assert!(TruncatedPmf::exact(vec![0.5, 0.4]).is_err());
        assert!(TruncatedPmf::exact(vec![0.5, 0.5]).is_ok());
        assert!(TruncatedPmf::new(vec![0.5, 0.5 - 1e-3], 1e-3, 1e-6).is_err());
        assert!(TruncatedPmf::exact(vec![-0.5, 1.5]).is_err());
    }

    #[test]
    fn fold_preserves_mass_and_excess() {
        let p = TruncatedPmf::exact(vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        let f = p.fold_to(1);
        assert_eq!(f.probs(), &[0.25, 0.25]);
        assert_eq!(f.tail_mass(), 0.5);
        // S(2) = 0.5, S(3) = 0.25; the new excess is S(3) = 0.25
        assert_eq!(f.tail_excess().lower, 0.25);
        assert_eq!(f.tail_excess().upper, 0.25);
        assert!(f.validate().is_ok());
    }

    #[test]
    fn align_pads_exact_and_shifts_origin() {
        let a = TruncatedPmf::exact(vec![0.5, 0.5]).unwrap();
        let b = TruncatedPmf::exact(vec![0.2, 0.3, 0.5]).unwrap().with_origin_shift(1);
        let (a2, b2) = align(&a, &b).unwrap();
        assert_eq!(a2.probs(), &[0.5, 0.5, 0.0, 0.0]);
        assert_eq!(b2.probs(), &[0.0, 0.2, 0.3, 0.5]);
        assert_eq!(b2.origin_shift(), 0);
    }
}
