//! Report, curve, audit and shape commands behind the `lifeorder` binary.

pub mod audit;
pub mod curves;
pub mod report;
pub mod shapes;

use lifeorder::Error;

/// Numerical settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Settings {
    pub tol: f64,
    pub tail_tol: f64,
    pub max_n: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self { tol: lifeorder::DEFAULT_TOL, tail_tol: lifeorder::DEFAULT_TAIL_TOL, max_n: 1_000_000 }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DISAGREEMENT: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        Error::Consistency(_) => EXIT_DISAGREEMENT,
        _ => EXIT_USAGE,
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        ryu::Buffer::new().format_finite(v).to_string()
    }
}
