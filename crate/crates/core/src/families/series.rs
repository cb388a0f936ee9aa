//! Tail sums of completely monotone sequences.

use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;

/// `B_{2j} / (2j)!` for `j = 1..=7`.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Number of correction terms used before the remainder term.
pub(crate) const EM_TERMS: usize = 6;

/// Derivatives `f^{(n)}(k)` for `n = 0..=2·EM_TERMS+1` are expected in `derivs`.
///
/// For a completely monotone `f` the remainder after the last correction lies
/// between zero and the next term, so its magnitude is returned as the error.
pub(crate) fn euler_maclaurin_tail(integral: f64, derivs: &[f64]) -> (f64, f64) {
    debug_assert!(derivs.len() >= 2 * EM_TERMS + 2);
    let mut acc = CompensatedSum::new();
    acc.add(integral);
    acc.add(derivs[0] / 2.0);
    for j in 1..=EM_TERMS {
        acc.add(-BERNOULLI_OVER_FACTORIAL[j - 1] * derivs[2 * j - 1]);
    }
    let remainder = (BERNOULLI_OVER_FACTORIAL[EM_TERMS] * derivs[2 * EM_TERMS + 1]).abs();
    let value = acc.value();
    (value, remainder + 8.0 * f64::EPSILON * value.abs())
}

/// Hurwitz zeta `Σ_{k≥0} (q + k)^{-sigma}` for `sigma > 1`, `q > 0`, with an
/// absolute error bound.
pub(crate) fn hurwitz_zeta(sigma: f64, q: f64) -> Result<(f64, f64)> {
    if !(sigma > 1.0) || !(q > 0.0) {
        return Err(Error::Domain(format!("hurwitz zeta needs sigma > 1 and q > 0, got ({sigma}, {q})")));
    }
    let start = (2.0 * sigma + 20.0).max(20.0);
    let mut acc = CompensatedSum::new();
    let mut t = q;
    while t < start {
        acc.add(t.powf(-sigma));
        t += 1.0;
    }
    let (tail, err) = power_tail(sigma, t);
    acc.add(tail);
    let value = acc.value();
    Ok((value, err + 4.0 * f64::EPSILON * value))
}

/// Euler–Maclaurin estimate of `Σ_{k≥0} (t + k)^{-sigma}` for large `t`.
fn power_tail(sigma: f64, t: f64) -> (f64, f64) {
    let integral = t.powf(1.0 - sigma) / (sigma - 1.0);
    let mut derivs = [0.0; 2 * EM_TERMS + 2];
    let mut d = t.powf(-sigma);
    for (n, slot) in derivs.iter_mut().enumerate() {
        *slot = d;
        d *= -(sigma + n as f64) / t;
    }
    euler_maclaurin_tail(integral, &derivs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn riemann_zeta_two() {
        let (v, e) = hurwitz_zeta(2.0, 1.0).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.powi(2) / 6.0, max_relative = 1e-15);
        assert!(e < 1e-14);
    }

    #[test]
    fn shifted_zeta_matches_direct_sum() {
        // ζ(3, 0.5) = 7 ζ(3)
        let zeta3 = 1.202_056_903_159_594_3;
        let (v, _) = hurwitz_zeta(3.0, 0.5).unwrap();
        assert_relative_eq!(v, 7.0 * zeta3, max_relative = 1e-14);
    }

    #[test]
    fn rejects_divergent() {
        assert!(hurwitz_zeta(1.0, 1.0).is_err());
    }
}
