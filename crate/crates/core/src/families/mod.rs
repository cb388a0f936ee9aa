//! Parametric lifetime families: Poisson, binomial, negative binomial,
//! discrete Weibull, generalized Poisson and Hurwitz-Lerch.
//!
//! All point queries use the internal 0-based index. The Hurwitz-Lerch family
//! lives natively on `{1, 2, …}` and is stored with an origin shift of one;
//! [`mean`] reports the native mean.

mod hurwitz;
mod series;
mod table;
mod weibull;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::pmf::{align, TailExcess, TruncatedPmf};
use crate::scalar::CompensatedSum;
use table::{Extended, RatioRecursion};

pub(crate) use series::hurwitz_zeta;

/// Maximum number of terms any series or table may use.
pub const ITERATION_CAP: usize = 10_000_000;

/// Relative accuracy of the stored tail mass past the horizon.
const TAIL_REL: f64 = 1e-17;

/// A distribution family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    Poisson { lambda: f64 },
    Binomial { n: u64, p: f64 },
    NegBinomial { r: u64, p: f64 },
    DiscreteWeibull { alpha: f64, beta: f64 },
    GeneralizedPoisson { theta: f64, lambda: f64 },
    HurwitzLerch { z: f64, s: f64, a: f64 },
}

impl FamilySpec {
    /// Validating constructor for every variant.
    pub fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ParameterDomain(msg));
        match *self {
            FamilySpec::Poisson { lambda } => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return bad(format!("poisson lambda must be positive, got {lambda}"));
                }
            }
            FamilySpec::Binomial { n, p } | FamilySpec::NegBinomial { r: n, p } => {
                if n == 0 {
                    return bad(format!("{} count must be a positive integer", self.name()));
                }
                if !(p > 0.0 && p < 1.0) {
                    return bad(format!("{} p must lie in (0, 1), got {p}", self.name()));
                }
            }
            FamilySpec::DiscreteWeibull { alpha, beta } => {
                if !(alpha > 0.0 && alpha.is_finite() && beta > 0.0 && beta.is_finite()) {
                    return bad(format!("dweibull needs alpha > 0 and beta > 0, got ({alpha}, {beta})"));
                }
            }
            FamilySpec::GeneralizedPoisson { theta, lambda } => {
                if !(theta > 0.0 && theta.is_finite()) {
                    return bad(format!("gpoisson theta must be positive, got {theta}"));
                }
                if !(lambda > 0.0 && lambda < 1.0) {
                    return bad(format!("gpoisson lambda must lie in (0, 1), got {lambda}"));
                }
            }
            FamilySpec::HurwitzLerch { z, s, a } => {
                if !(z > 0.0 && z <= 1.0) {
                    return bad(format!("hurwitzlerch z must lie in (0, 1], got {z}"));
                }
                if !(s >= 0.0 && s.is_finite()) {
                    return bad(format!("hurwitzlerch s must be non-negative, got {s}"));
                }
                if !(0.0..=1.0).contains(&a) {
                    return bad(format!("hurwitzlerch a must lie in [0, 1], got {a}"));
                }
                if z == 1.0 && s == 0.0 {
                    return bad("hurwitzlerch with z = 1 needs s > 0".into());
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Poisson { .. } => "poisson",
            FamilySpec::Binomial { .. } => "binomial",
            FamilySpec::NegBinomial { .. } => "negbinomial",
            FamilySpec::DiscreteWeibull { .. } => "dweibull",
            FamilySpec::GeneralizedPoisson { .. } => "gpoisson",
            FamilySpec::HurwitzLerch { .. } => "hurwitzlerch",
        }
    }

    /// Native value of internal index 0.
    pub fn origin_shift(&self) -> usize {
        match self {
            FamilySpec::HurwitzLerch { .. } => 1,
            _ => 0,
        }
    }

    /// `(a, b)` with `f(x) = (a + b/x) f(x-1)`, for the three Panjer members.
    pub fn panjer_coefficients(&self) -> Option<(f64, f64)> {
        match *self {
            FamilySpec::Poisson { lambda } => Some((0.0, lambda)),
            FamilySpec::Binomial { n, p } => Some((-p / (1.0 - p), (n as f64 + 1.0) * p / (1.0 - p))),
            FamilySpec::NegBinomial { r, p } => Some((1.0 - p, (r as f64 - 1.0) * (1.0 - p))),
            _ => None,
        }
    }

    /// Last internal support point when the support is finite.
    pub fn support_end(&self) -> Option<usize> {
        match *self {
            FamilySpec::Binomial { n, .. } => Some(n as usize),
            _ => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Poisson { lambda } => write!(f, "poisson({lambda})"),
            FamilySpec::Binomial { n, p } => write!(f, "binomial({n},{p})"),
            FamilySpec::NegBinomial { r, p } => write!(f, "negbinomial({r},{p})"),
            FamilySpec::DiscreteWeibull { alpha, beta } => write!(f, "dweibull({alpha},{beta})"),
            FamilySpec::GeneralizedPoisson { theta, lambda } => write!(f, "gpoisson({theta},{lambda})"),
            FamilySpec::HurwitzLerch { z, s, a } => write!(f, "hurwitzlerch({z},{s},{a})"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse { input: input.to_string(), reason: reason.to_string() };
        let text: String = input.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
        let open = text.find('(').ok_or_else(|| err("expected `name(params)`"))?;
        if !text.ends_with(')') {
            return Err(err("missing closing parenthesis"));
        }
        let name = &text[..open];
        let body = &text[open + 1..text.len() - 1];
        let params = body
            .split(',')
            .map(|t| t.parse::<f64>().map_err(|_| err(&format!("`{t}` is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        let arity = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(err(&format!("{name} takes {k} parameter(s), got {}", params.len())))
            }
        };
        let count = |v: f64| -> Result<u64> {
            if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
                Ok(v as u64)
            } else {
                Err(Error::ParameterDomain(format!("{name} count must be a positive integer, got {v}")))
            }
        };
        let spec = match name {
            "poisson" => {
                arity(1)?;
                FamilySpec::Poisson { lambda: params[0] }
            }
            "binomial" => {
                arity(2)?;
                FamilySpec::Binomial { n: count(params[0])?, p: params[1] }
            }
            "negbinomial" => {
                arity(2)?;
                FamilySpec::NegBinomial { r: count(params[0])?, p: params[1] }
            }
            "dweibull" => {
                arity(2)?;
                FamilySpec::DiscreteWeibull { alpha: params[0], beta: params[1] }
            }
            "gpoisson" => {
                arity(2)?;
                FamilySpec::GeneralizedPoisson { theta: params[0], lambda: params[1] }
            }
            "hurwitzlerch" => {
                arity(3)?;
                FamilySpec::HurwitzLerch { z: params[0], s: params[1], a: params[2] }
            }
            _ => return Err(err(&format!("unknown family `{name}`"))),
        };
        spec.checked()
    }
}

impl Serialize for FamilySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Point mass at internal index `x`.
pub fn pmf(spec: &FamilySpec, x: u64) -> Result<f64> {
    spec.validate()?;
    Ok(match *spec {
        FamilySpec::Poisson { lambda } => panjer_pmf(0.0, lambda, -lambda, x),
        FamilySpec::Binomial { n, p } => {
            if x > n {
                0.0
            } else {
                let (a, b) = spec.panjer_coefficients().unwrap_or_default();
                panjer_pmf(a, b, n as f64 * (-p).ln_1p(), x)
            }
        }
        FamilySpec::NegBinomial { r, p } => {
            let (a, b) = spec.panjer_coefficients().unwrap_or_default();
            panjer_pmf(a, b, r as f64 * p.ln(), x)
        }
        FamilySpec::DiscreteWeibull { alpha, beta } => weibull::pmf(alpha, beta, x),
        FamilySpec::GeneralizedPoisson { theta, lambda } => gp_log_pmf(theta, lambda, x).exp(),
        FamilySpec::HurwitzLerch { z, s, a } => {
            let t = hl_normalizer(z, s, a, series_tol(z, s + 1.0, a))?;
            let native = x as f64 + 1.0;
            (native * z.ln() - (s + 1.0) * (a + native).ln()).exp() / t
        }
    })
}

/// `f(x)` from `f(0)` through the Panjer recursion, accumulated in log space.
fn panjer_pmf(a: f64, b: f64, ln_f0: f64, x: u64) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.add(ln_f0);
    for k in 1..=x {
        let k = k as f64;
        let r = (a * k + b) / k;
        if r <= 0.0 {
            return 0.0;
        }
        acc.add(r.ln());
    }
    acc.value().exp()
}

fn gp_log_pmf(theta: f64, lambda: f64, x: u64) -> f64 {
    let xf = x as f64;
    theta.ln() + (xf - 1.0) * (theta + xf * lambda).ln() - ln_gamma(xf + 1.0) - theta - lambda * xf
}

/// Absolute tolerance giving `Σ_{x≥1} z^x (a + x)^{-e}` about 1e-14 relative
/// accuracy: the sum is at most the first term times `1/(1 - z)`, or times
/// `(a + 1)/(e - 1) + 1` when `z = 1`.
fn series_tol(z: f64, e: f64, a: f64) -> f64 {
    let first = z / (a + 1.0).powf(e);
    let spread = if z < 1.0 { 1.0 / (1.0 - z) } else { (a + 1.0) / (e - 1.0) + 1.0 };
    first * spread * 1e-14
}

/// `P(X ≥ x)` at internal index `x`, to within absolute error `tol`.
pub fn survival(spec: &FamilySpec, x: u64, tol: f64) -> Result<f64> {
    spec.validate()?;
    check_tol(tol)?;
    if x == 0 {
        return Ok(1.0);
    }
    match *spec {
        FamilySpec::DiscreteWeibull { alpha, beta } => Ok(weibull::survival(alpha, beta, x as f64)),
        FamilySpec::Binomial { n, .. } if x > n => Ok(0.0),
        FamilySpec::HurwitzLerch { z, s, a } if z == 1.0 => {
            let e = s + 1.0;
            let (total, _) = hurwitz::unit_tail(e, a, 0)?;
            let (tail, _) = hurwitz::unit_tail(e, a, x as usize)?;
            Ok(tail / total)
        }
        _ => {
            let x = usize::try_from(x).map_err(|_| Error::Convergence { what: "survival index".into(), cap: ITERATION_CAP })?;
            let ext = extended(spec, (tol * 1e-3).min(1e-20), x + 1)?;
            let mut acc = CompensatedSum::new();
            for &p in ext.probs[x..].iter().rev() {
                acc.add(p);
            }
            Ok(acc.value() + ext.beyond_mass / 2.0)
        }
    }
}

/// Mean on the native support, to within `tol` (relative to `max(1, mean)`
/// for the discrete Weibull, whose mean has no closed form).
pub fn mean(spec: &FamilySpec, tol: f64) -> Result<f64> {
    spec.validate()?;
    check_tol(tol)?;
    Ok(match *spec {
        FamilySpec::Poisson { lambda } => lambda,
        FamilySpec::Binomial { n, p } => n as f64 * p,
        FamilySpec::NegBinomial { r, p } => r as f64 * (1.0 - p) / p,
        FamilySpec::GeneralizedPoisson { theta, lambda } => theta / (1.0 - lambda),
        FamilySpec::DiscreteWeibull { alpha, beta } => {
            let (v, err) = weibull::tail_sum(alpha, beta, 1, ITERATION_CAP)?;
            if err > tol * v.max(1.0) {
                return Err(Error::Convergence { what: format!("discrete Weibull mean to {tol:e}"), cap: ITERATION_CAP });
            }
            v
        }
        FamilySpec::HurwitzLerch { z, s, a } => {
            if z == 1.0 && s <= 1.0 {
                return Err(Error::ParameterDomain(format!("hurwitzlerch({z},{s},{a}) has an infinite mean")));
            }
            let (lower, _) = hurwitz::series(z, s, a, series_tol(z, s, a), ITERATION_CAP)?;
            let (upper, _) = hurwitz::series(z, s + 1.0, a, series_tol(z, s + 1.0, a), ITERATION_CAP)?;
            lower / upper - a
        }
    })
}

/// `T(z, s, a) = Σ_{x≥1} z^x/(a + x)^{s+1}` to absolute error below `tol`.
pub fn hl_normalizer(z: f64, s: f64, a: f64, tol: f64) -> Result<f64> {
    FamilySpec::HurwitzLerch { z, s, a }.validate()?;
    check_tol(tol)?;
    Ok(hurwitz::series(z, s + 1.0, a, tol, ITERATION_CAP)?.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("tolerance must be positive, got {tol}")))
    }
}

/// Ratio-recursion mass table for the Panjer members, the generalized
/// Poisson and Hurwitz-Lerch with `z < 1`.
fn extended(spec: &FamilySpec, thr: f64, min_len: usize) -> Result<Extended> {
    match *spec {
        FamilySpec::Poisson { .. } | FamilySpec::Binomial { .. } | FamilySpec::NegBinomial { .. } => {
            let (a, b) = spec.panjer_coefficients().unwrap_or_default();
            let ratio = move |x: usize| {
                let x = x as f64;
                ((a * x + b) / x).max(0.0)
            };
            let mut mode = (b / (1.0 - a)).floor().max(0.0) as usize;
            if let Some(end) = spec.support_end() {
                mode = mode.min(end);
            }
            let rec = RatioRecursion { mode, ratio: &ratio, sup_after: &|x| ratio(x + 1), support_end: spec.support_end() };
            rec.build(min_len, thr, ITERATION_CAP)
        }
        FamilySpec::GeneralizedPoisson { theta, lambda } => {
            let ratio = move |x: usize| {
                let x = x as f64;
                (theta + x * lambda) / x * ((x - 2.0) * (lambda / (theta + (x - 1.0) * lambda)).ln_1p() - lambda).exp()
            };
            let limit = lambda * (1.0 - lambda).exp();
            let mut mode = 0;
            while ratio(mode + 1) >= 1.0 {
                mode += 1;
                if mode >= ITERATION_CAP {
                    return Err(Error::Convergence { what: "generalized Poisson mode".into(), cap: ITERATION_CAP });
                }
            }
            // Successive ratios fall from the mode and then creep up to the limit.
            let sup_after = move |x: usize| ratio(x + 1).max(limit);
            let rec = RatioRecursion { mode, ratio: &ratio, sup_after: &sup_after, support_end: None };
            rec.build(min_len, thr, ITERATION_CAP)
        }
        FamilySpec::HurwitzLerch { z, s, a } if z < 1.0 => {
            // internal index j is native value j + 1
            let ratio = move |j: usize| {
                let j = j as f64;
                z * ((a + j) / (a + j + 1.0)).powf(s + 1.0)
            };
            let rec = RatioRecursion { mode: 0, ratio: &ratio, sup_after: &|_| z, support_end: None };
            rec.build(min_len, thr, ITERATION_CAP)
        }
        _ => Err(Error::Precondition(format!("{} has no ratio table", spec.name()))),
    }
}

/// Truncates to the smallest `N` with `P(X > N) < tail_tol`.
pub fn truncate(spec: &FamilySpec, tail_tol: f64) -> Result<TruncatedPmf<f64>> {
    build(spec, tail_tol, 0, None)
}

/// Truncates as [`truncate`], but storing at least up to internal index
/// `min_last` and at most up to `max_last` (the excess is folded into the tail).
pub fn truncate_within(spec: &FamilySpec, tail_tol: f64, min_last: usize, max_last: Option<usize>) -> Result<TruncatedPmf<f64>> {
    build(spec, tail_tol, min_last, max_last)
}

/// Truncates both laws onto a common native origin and a common horizon, the
/// larger of the two tail-consistent horizons, optionally capped at `max_n`.
pub fn truncate_pair(
    x: &FamilySpec,
    y: &FamilySpec,
    tail_tol: f64,
    max_n: Option<usize>,
) -> Result<(TruncatedPmf<f64>, TruncatedPmf<f64>)> {
    let px = build(x, tail_tol, 0, max_n)?;
    let py = build(y, tail_tol, 0, max_n)?;
    let native_end = |p: &TruncatedPmf<f64>| p.last_index() + p.origin_shift();
    let horizon = native_end(&px).max(native_end(&py));
    let widen = |spec: &FamilySpec, p: TruncatedPmf<f64>| -> Result<TruncatedPmf<f64>> {
        if p.upper_is_exact() || native_end(&p) >= horizon {
            Ok(p)
        } else {
            build(spec, tail_tol, horizon - p.origin_shift(), max_n)
        }
    };
    let (px, py) = align(&widen(x, px)?, &widen(y, py)?)?;
    Ok(match max_n {
        Some(m) if px.last_index() > m => (px.fold_to(m), py.fold_to(m)),
        _ => (px, py),
    })
}

fn build(spec: &FamilySpec, tail_tol: f64, min_last: usize, max_last: Option<usize>) -> Result<TruncatedPmf<f64>> {
    spec.validate()?;
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::Precondition(format!("tail tolerance must lie in (0, 1), got {tail_tol}")));
    }
    let cap_to = |n: usize| max_last.map_or(n, |m| n.min(m));
    let pmf = match *spec {
        FamilySpec::DiscreteWeibull { alpha, beta } => {
            let needed = match max_last {
                Some(m) if weibull::survival(alpha, beta, (m + 1) as f64) >= tail_tol => m,
                _ => weibull::first_below(alpha, beta, tail_tol, ITERATION_CAP)? - 1,
            };
            let n = cap_to(needed.max(min_last));
            let probs: Vec<f64> = (0..=n as u64).map(|x| weibull::pmf(alpha, beta, x)).collect();
            let tail = weibull::survival(alpha, beta, (n + 1) as f64);
            let (excess, err) = weibull::tail_sum(alpha, beta, n as u64 + 2, ITERATION_CAP)?;
            TruncatedPmf::from_parts(
                probs,
                tail,
                widen_tol(tail_tol, tail),
                false,
                TailExcess { lower: (excess - err).max(0.0), upper: excess + err },
                0,
            )
        }
        FamilySpec::HurwitzLerch { z, s, a } if z == 1.0 => unit_hurwitz(s, a, tail_tol, min_last, max_last)?,
        _ => {
            let thr = (tail_tol * 1e-8).min(1e-20);
            let layout = |ext: &Extended| {
                let last = ext.probs.len() - 1;
                // survival over the stored table, S[i] = Σ_{j ≥ i} p_j
                let mut surv = vec![0.0; last + 2];
                let mut acc = CompensatedSum::new();
                for i in (0..=last).rev() {
                    acc.add(ext.probs[i]);
                    surv[i] = acc.value();
                }
                let natural = if ext.exact { last } else { (0..=last).find(|&n| surv[n + 1] < tail_tol).unwrap_or(last) };
                let n = cap_to(natural.max(min_last).min(last));
                (surv, n)
            };
            let mut ext = extended(spec, thr, min_last + 1)?;
            let (mut surv, mut n) = layout(&ext);
            // the stored tail must be accurate relative to itself, not only to the total
            let wanted = TAIL_REL * surv[n + 1];
            if !ext.exact && ext.beyond_mass > wanted {
                ext = extended(spec, wanted.max(f64::MIN_POSITIVE), n + 2)?;
                (surv, n) = layout(&ext);
            }
            let last = ext.probs.len() - 1;
            let mut excess = CompensatedSum::new();
            for &v in &surv[(n + 2).min(last + 1)..] {
                excess.add(v);
            }
            let excess = excess.value();
            let slack = (last - n) as f64 * ext.beyond_mass + ext.beyond_excess;
            let tail = surv[n + 1];
            TruncatedPmf::from_parts(
                ext.probs[..=n].to_vec(),
                tail,
                widen_tol(tail_tol, tail),
                ext.exact && n == last,
                TailExcess { lower: excess, upper: excess + slack },
                spec.origin_shift(),
            )
        }
    };
    pmf.validate()?;
    Ok(pmf)
}

fn widen_tol(tail_tol: f64, tail: f64) -> f64 {
    if tail < tail_tol {
        tail_tol
    } else {
        tail + tail * 4.0 * f64::EPSILON
    }
}

/// Hurwitz-Lerch with `z = 1`: a power-law tail handled through the Hurwitz zeta.
fn unit_hurwitz(s: f64, a: f64, tail_tol: f64, min_last: usize, max_last: Option<usize>) -> Result<TruncatedPmf<f64>> {
    let e = s + 1.0;
    let (total, _) = hurwitz::unit_tail(e, a, 0)?;
    let tail_at = |j0: usize| -> Result<f64> { Ok(hurwitz::unit_tail(e, a, j0)?.0 / total) };
    // smallest N with tail past N below tolerance, from the integral estimate
    let guess = (tail_tol * total * s).powf(-1.0 / s) - a - 1.0;
    if !(guess < 2.0 * ITERATION_CAP as f64) && max_last.is_none() {
        return Err(Error::Convergence { what: format!("Hurwitz-Lerch truncation (needs about {guess:.3e} points)"), cap: ITERATION_CAP });
    }
    let mut n = match max_last {
        Some(m) if tail_at(m + 1)? >= tail_tol => m,
        _ => {
            let mut n = guess.clamp(0.0, ITERATION_CAP as f64) as usize;
            while tail_at(n + 1)? >= tail_tol {
                n += 1;
            }
            while n > 0 && tail_at(n)? < tail_tol {
                n -= 1;
            }
            n
        }
    };
    n = n.max(min_last);
    if let Some(m) = max_last {
        n = n.min(m);
    }
    if n >= ITERATION_CAP {
        return Err(Error::Convergence { what: "Hurwitz-Lerch truncation".into(), cap: ITERATION_CAP });
    }
    let weights: Vec<f64> = (0..=n).map(|j| (a + j as f64 + 1.0).powf(-e)).collect();
    let (tail_w, _) = hurwitz::unit_tail(e, a, n + 1)?;
    let mut acc = CompensatedSum::new();
    for &w in &weights {
        acc.add(w);
    }
    acc.add(tail_w);
    let norm = acc.value();
    let probs = weights.iter().map(|w| w / norm).collect();
    let tail = tail_w / norm;
    let excess = if e > 2.0 {
        let q = a + n as f64 + 3.0;
        let (hi_pow, err1) = hurwitz_zeta(e - 1.0, q)?;
        let (lo_pow, err2) = hurwitz_zeta(e, q)?;
        let v = (hi_pow - (q - 1.0) * lo_pow) / norm;
        let err = (err1 + (q - 1.0) * err2) / norm + 8.0 * f64::EPSILON * hi_pow / norm;
        TailExcess { lower: (v - err).max(0.0), upper: v + err }
    } else {
        TailExcess::unknown()
    };
    Ok(TruncatedPmf::from_parts(probs, tail, widen_tol(tail_tol, tail), false, excess, 1))
}
