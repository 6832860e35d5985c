use core::fmt;

/// Failure modes shared by every evaluation routine in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// The exponent `p` must be a finite real strictly greater than one.
    InvalidExponent(f64),
    /// An integer-only routine was called with non-integer `p`.
    NonIntegerExponent(f64),
    /// The point lies on (or within rejection distance of) the branch cut `[-1, 1]`.
    OnCut { re: f64, im: f64 },
    /// Adaptive quadrature stopped before reaching the requested tolerance.
    NonConvergence {
        estimate: f64,
        error_estimate: f64,
        tolerance: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::InvalidExponent(p) => write!(f, "exponent p must be finite and > 1 (got {p})"),
            Error::NonIntegerExponent(p) => {
                write!(f, "operation requires an integer exponent p >= 2 (got {p})")
            }
            Error::OnCut { re, im } => {
                write!(f, "point ({re}, {im}) lies on the branch cut [-1, 1]")
            }
            Error::NonConvergence {
                estimate,
                error_estimate,
                tolerance,
            } => write!(
                f,
                "quadrature did not converge: estimate {estimate}, error {error_estimate} > tolerance {tolerance}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
