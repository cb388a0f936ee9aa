use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point type the numerical layers are written against.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` constant, saturating to the nearest representable value.
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| if x > 0.0 { Self::max_value() } else { Self::min_value() })
    }

    /// Smallest value treated as a genuine (non-underflowed) magnitude.
    fn numeric_floor() -> Self {
        let f = Self::of(crate::NUMERIC_FLOOR);
        if f > Self::zero() {
            f
        } else {
            Self::min_positive_value()
        }
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub(crate) fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub(crate) fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice.
pub fn stable_sum<T: Scalar>(xs: &[T]) -> T {
    let mut acc = CompensatedSum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// A non-negative magnitude split as `mantissa * 2^exponent`, so products of
/// tiny masses can be compared without underflow.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Magnitude {
    mantissa: f64,
    exponent: i64,
}

impl Magnitude {
    pub(crate) fn of<T: Scalar>(x: T) -> Self {
        if x <= T::zero() {
            return Self { mantissa: 0.0, exponent: 0 };
        }
        let (m, e, _) = x.integer_decode();
        let mantissa = m as f64;
        let norm = mantissa.log2().floor() as i64;
        Self { mantissa: mantissa / 2f64.powi(norm as i32), exponent: e as i64 + norm }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub(crate) fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self { mantissa: 0.0, exponent: 0 };
        }
        let mut m = self.mantissa * other.mantissa;
        let mut e = self.exponent + other.exponent;
        if m >= 2.0 {
            m /= 2.0;
            e += 1;
        }
        Self { mantissa: m, exponent: e }
    }

    /// `(self - other) / (self + other)`, in `[-1, 1]`; zero when both vanish.
    pub(crate) fn relative_excess(self, other: Self) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => 0.0,
            (false, true) => 1.0,
            (true, false) => -1.0,
            (false, false) => {
                let top = self.exponent.max(other.exponent);
                let a = scale(self.mantissa, self.exponent - top);
                let b = scale(other.mantissa, other.exponent - top);
                (a - b) / (a + b)
            }
        }
    }
}

fn scale(m: f64, shift: i64) -> f64 {
    if shift < -1000 {
        0.0
    } else {
        m * 2f64.powi(shift as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1.0, 1e-17, 1e-17, 1e-17, -1.0];
        assert!((stable_sum(&xs) - 3e-17).abs() < 1e-30);
    }

    #[test]
    fn magnitude_products_survive_underflow() {
        let a = Magnitude::of(1e-200f64).mul(Magnitude::of(1e-200f64));
        let b = Magnitude::of(2e-200f64).mul(Magnitude::of(1e-200f64));
        let r = a.relative_excess(b);
        assert!((r - (-1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(Magnitude::of(0.0f64).relative_excess(Magnitude::of(0.0f64)), 0.0);
    }

    #[test]
    fn floor_is_positive_for_f32() {
        assert!(<f32 as Scalar>::numeric_floor() > 0.0);
        assert_eq!(<f64 as Scalar>::numeric_floor(), 1e-300);
    }
}
