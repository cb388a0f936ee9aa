//! Hurwitz-Lerch normalizing series `T(z, s, a) = Σ_{x≥1} z^x / (a + x)^{s+1}`.

use super::series::hurwitz_zeta;
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;

/// `Σ_{x≥1} z^x (a + x)^{-e}` with an absolute error below `tol`, plus the
/// achieved error bound. Requires `e ≥ 0`, and `e > 1` when `z = 1`.
pub(crate) fn series(z: f64, e: f64, a: f64, tol: f64, cap: usize) -> Result<(f64, f64)> {
    if z == 1.0 {
        if !(e > 1.0) {
            return Err(Error::ParameterDomain(format!("series with z = 1 diverges for exponent {e} <= 1")));
        }
        let (v, err) = hurwitz_zeta(e, a + 1.0)?;
        if err >= tol {
            return Err(Error::Convergence { what: format!("Hurwitz zeta to tolerance {tol:e}"), cap });
        }
        return Ok((v, err));
    }
    let mut acc = CompensatedSum::new();
    let ln_z = z.ln();
    for x in 1..=cap {
        let xf = x as f64;
        acc.add((xf * ln_z - e * (a + xf).ln()).exp());
        let bound = ((xf + 1.0) * ln_z - e * (a + xf + 1.0).ln()).exp() / (1.0 - z);
        let value = acc.value();
        let err = bound + 4.0 * f64::EPSILON * value;
        if err < tol {
            return Ok((value, err));
        }
    }
    Err(Error::Convergence { what: format!("Hurwitz-Lerch series for z = {z}"), cap })
}

/// `Σ_{j≥j0} (a + j + 1)^{-e}`, the unnormalized `z = 1` tail past internal index `j0 - 1`.
pub(crate) fn unit_tail(e: f64, a: f64, j0: usize) -> Result<(f64, f64)> {
    hurwitz_zeta(e, a + j0 as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_series() {
        let (v, _) = series(0.5, 1.0, 0.0, 1e-15, 1_000_000).unwrap();
        assert_relative_eq!(v, 2f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn unit_z_is_zeta() {
        let (v, _) = series(1.0, 2.0, 0.0, 1e-14, 1_000_000).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.powi(2) / 6.0, max_relative = 1e-14);
        assert!(series(1.0, 1.0, 0.0, 1e-12, 1_000_000).is_err());
    }
}
