//! Discrete Weibull: closed-form survival and certified tail sums.

use statrs::function::gamma::{gamma, gamma_ur};

use super::series::{euler_maclaurin_tail, EM_TERMS};
use crate::error::{Error, Result};
use crate::scalar::CompensatedSum;

/// `S(x) = q^{x^β} = exp{-(x/α)^β}`.
pub(crate) fn survival(alpha: f64, beta: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    (-(x / alpha).powf(beta)).exp()
}

/// `S(x) - S(x+1)` evaluated without cancellation.
pub(crate) fn pmf(alpha: f64, beta: f64, x: u64) -> f64 {
    let s = survival(alpha, beta, x as f64);
    if s == 0.0 {
        return 0.0;
    }
    let delta = if x == 0 {
        alpha.powf(-beta)
    } else {
        let xf = x as f64;
        (xf / alpha).powf(beta) * (beta * (1.0 / xf).ln_1p()).exp_m1()
    };
    s * -(-delta).exp_m1()
}

/// Smallest `m ≥ 1` with `S(m) < tol`.
pub(crate) fn first_below(alpha: f64, beta: f64, tol: f64, cap: usize) -> Result<usize> {
    let guess = alpha * (-tol.ln()).powf(1.0 / beta);
    if !(guess < 2.0 * cap as f64) {
        return Err(Error::Convergence { what: format!("discrete Weibull truncation (needs about {guess:.3e} points)"), cap });
    }
    let mut m = (guess.floor() as usize).max(1);
    while survival(alpha, beta, m as f64) >= tol {
        m += 1;
    }
    while m > 1 && survival(alpha, beta, (m - 1) as f64) < tol {
        m -= 1;
    }
    if m > cap {
        return Err(Error::Convergence { what: "discrete Weibull truncation".into(), cap });
    }
    Ok(m)
}

/// `Σ_{i≥k} S(i)` with an absolute error bound.
pub(crate) fn tail_sum(alpha: f64, beta: f64, k: u64, cap: usize) -> Result<(f64, f64)> {
    if beta >= 1.0 {
        geometric_tail(alpha, beta, k, cap)
    } else {
        smooth_tail(alpha, beta, k, cap)
    }
}

// For β ≥ 1 successive ratios S(i+1)/S(i) are nonincreasing.
fn geometric_tail(alpha: f64, beta: f64, k: u64, cap: usize) -> Result<(f64, f64)> {
    let mut acc = CompensatedSum::new();
    let mut i = k;
    let mut cur = survival(alpha, beta, i as f64);
    for _ in 0..cap {
        if cur == 0.0 {
            return Ok((acc.value(), 0.0));
        }
        acc.add(cur);
        let next = survival(alpha, beta, (i + 1) as f64);
        let rho = next / cur;
        let bound = if rho < 1.0 { next / (1.0 - rho) } else { f64::INFINITY };
        let total = acc.value();
        if bound <= 1e-17 * total {
            return Ok((total + bound / 2.0, bound / 2.0 + 4.0 * f64::EPSILON * total));
        }
        i += 1;
        cur = next;
    }
    Err(Error::Convergence { what: "discrete Weibull survival tail".into(), cap })
}

// For β < 1, t ↦ exp{-c t^β} is completely monotone.
fn smooth_tail(alpha: f64, beta: f64, k: u64, cap: usize) -> Result<(f64, f64)> {
    let c = alpha.powf(-beta);
    let mut acc = CompensatedSum::new();
    let mut t = k as f64;
    if k == 0 {
        acc.add(1.0);
        t = 1.0;
    }
    for _ in 0..cap {
        let derivs = jets(c, beta, t);
        let f = derivs[0];
        if f == 0.0 {
            return Ok((acc.value(), 0.0));
        }
        let remainder = remainder_size(&derivs);
        if remainder <= 1e-17 * (acc.value() + f) {
            let shape = 1.0 / beta;
            let integral = alpha / beta * gamma(shape) * gamma_ur(shape, c * t.powf(beta));
            let (tail, err) = euler_maclaurin_tail(integral, &derivs);
            acc.add(tail);
            let total = acc.value();
            // the incomplete gamma is trusted to a few ulps
            return Ok((total, err + 1e-13 * integral + 4.0 * f64::EPSILON * total));
        }
        acc.add(f);
        t += 1.0;
    }
    Err(Error::Convergence { what: "discrete Weibull survival tail".into(), cap })
}

fn remainder_size(derivs: &[f64]) -> f64 {
    derivs[2 * EM_TERMS + 1].abs() / 74_724_249_600.0
}

/// Derivatives of `exp{-c t^β}` at `t > 0`, orders `0..=2·EM_TERMS+1`, from the
/// Taylor coefficients of the exponent.
fn jets(c: f64, beta: f64, t: f64) -> [f64; 2 * EM_TERMS + 2] {
    const N: usize = 2 * EM_TERMS + 2;
    let tb = t.powf(beta);
    let mut h = [0.0; N];
    let mut binom = 1.0;
    for (n, slot) in h.iter_mut().enumerate() {
        if n > 0 {
            binom *= (beta - (n - 1) as f64) / n as f64;
        }
        *slot = -c * tb * binom * t.powi(-(n as i32));
    }
    let mut f = [0.0; N];
    f[0] = h[0].exp();
    for n in 1..N {
        let mut s = 0.0;
        for k in 1..=n {
            s += k as f64 * h[k] * f[n - k];
        }
        f[n] = s / n as f64;
    }
    let mut fact = 1.0;
    for (n, v) in f.iter_mut().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        *v *= fact;
    }
    f
}
