//! Stochastic orders for discrete lifetime distributions.
//!
//! The crate decides whether two discrete lifetimes `X` and `Y` (supported on
//! the non-negative integers) are ordered in the likelihood-ratio (`lr`),
//! hazard-rate (`hr`), mean-residual-life (`mrl`) or usual stochastic (`st`)
//! order. It does so along two independent routes:
//!
//! * [`criteria`]: closed-form parameter conditions for the Panjer family
//!   (Poisson, binomial, negative binomial), the discrete Weibull, the
//!   generalized Poisson and the Hurwitz-Lerch family, plus shape-based rules
//!   driven by the unimodality of the likelihood ratio `l(x) = f_X(x)/f_Y(x)`.
//! * [`orders`]: a brute-force oracle that checks the defining inequalities
//!   pointwise over truncated supports.
//!
//! The numerical layers ([`pmf`], [`measures`], [`shape`], [`orders`]) are
//! generic over the floating-point type through [`Scalar`]; the `f64`
//! instantiations used throughout the CLI are exported as type aliases.

pub mod criteria;
pub mod error;
pub mod families;
pub mod measures;
pub mod orders;
pub mod pmf;
pub mod scalar;
pub mod shape;

pub use error::{Error, Result};
pub use families::FamilySpec;
pub use scalar::Scalar;

/// Truncated mass function in double precision.
pub type Pmf = pmf::TruncatedPmf<f64>;
/// Reliability curve in double precision.
pub type Curve = measures::ReliabilityCurve<f64>;
/// Likelihood ratio in double precision.
pub type Ratio = shape::LikelihoodRatio<f64>;
/// Oracle verdict in double precision.
pub type Verdict = orders::OrderVerdict<f64>;
/// Oracle verdicts for all four orders in double precision.
pub type VerdictSet = orders::AllVerdicts<f64>;

/// Default truncation tolerance on the neglected tail mass.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Default comparison tolerance, relative to the local magnitude.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Survival values at or below this are treated as numerically zero.
pub const NUMERIC_FLOOR: f64 = 1e-300;
