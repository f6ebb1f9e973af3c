use std::fmt;

use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Membership classes of Bernstein functions that can be tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum BernsteinClass {
    /// φ(0)=0, finite mean φ′(0⁺), and d>0 or ϑ(0,1)=∞.
    Rho,
    /// 0 ≤ φ(−u) < ∞ for every u ≤ 1.
    One,
    /// Lévy density exists and is non-increasing.
    Minus,
}

impl fmt::Display for BernsteinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BernsteinClass::Rho => write!(f, "B_rho"),
            BernsteinClass::One => write!(f, "B_1"),
            BernsteinClass::Minus => write!(f, "B_minus"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("pole: {what} at z = {z}")]
    Pole { what: &'static str, z: Complex64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument z = {z} outside the strip ({lower}, {upper}) of {law}")]
    Strip {
        law: String,
        z: Complex64,
        lower: f64,
        upper: f64,
    },

    #[error("integration failed: {what} (residual estimate {residual:e})")]
    Integration { what: String, residual: f64 },

    #[error("no convergence in {what}: last iterates {last} and {previous}")]
    NonConvergence {
        what: String,
        last: Complex64,
        previous: Complex64,
    },

    #[error("truncation failure: {what}, achieved bound {bound:e}")]
    Truncation { what: String, bound: f64 },

    #[error("{class} membership failed: {reason}")]
    Membership { class: BernsteinClass, reason: String },

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("series radius violated: |z| = {modulus} but radius is {radius}")]
    Radius { modulus: f64, radius: f64 },

    #[error("negative density value {value:e} at t = {t}")]
    Negativity { t: f64, value: f64 },

    #[error("density not available: smoothness index N = {index} <= 1")]
    DensityNotAvailable { index: f64 },

    #[error("insufficient samples: need at least {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("model spec, line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for failures of a stated precondition or class membership, as opposed to numeric breakdowns.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Membership { .. }
                | Error::Precondition(_)
                | Error::Strip { .. }
                | Error::Domain(_)
                | Error::Radius { .. }
                | Error::DensityNotAvailable { .. }
                | Error::Invalid(_)
                | Error::Parse { .. }
                | Error::Indeterminate(_)
        )
    }
}
