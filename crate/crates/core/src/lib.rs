//! Numerics for the optimal discrete p-Hardy weight.
//!
//! The crate evaluates the optimal weight `omega_p`, the associated
//! Herglotz-Nevanlinna function `f_p(z) = -z^(p-1) omega_p(z)`, its boundary
//! density `rho_p`, and the moments `m_2k` of that density by several
//! independent routes, and provides property checks that cross-certify them.
//!
//! Everything here is `no_std` with `alloc`; IO and the command-line front end
//! live in the companion `hardy-weight-cli` crate.
#![no_std]
// NaN must fail every range check, so `!(x > a)` is preferred over `x <= a`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod complex;
pub mod density;
pub mod error;
pub mod expansion;
#[cfg(feature = "extended")]
pub mod extended;
pub mod hardy;
pub mod herglotz;
pub mod moments;
pub mod quadrature;
pub mod report;
pub mod suites;
pub mod weight;

pub use complex::{ComplexPoint, HolderPair, Region};
pub use error::{Error, Result};
pub use report::{Comparison, VerificationReport};
