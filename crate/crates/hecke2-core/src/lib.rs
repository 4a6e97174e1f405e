//! Exact arithmetic on truncated GF(2) power series, formal Hecke operators,
//! bit-packed linear algebra, and the truncated operator-algebra solvers built
//! on top of them.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature only
//! enables `std::error::Error` integration.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bits;
pub mod hecke;
pub mod matrix;
pub mod oracle;
pub mod series;
pub mod spaces;
pub mod theta;

use core::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An operation needed more known coefficients than were available.
    InsufficientPrecision { needed: usize, have: usize },
    /// Division where the numerator's valuation is below the denominator's.
    Valuation,
    /// Laurent division left a nonzero remainder within known precision.
    Inexact,
    /// Decomposition failed; the residual's valuation is reported.
    NotInSpan { valuation: usize },
    /// Operator application would leave no known coefficients.
    PrecisionExhausted,
    /// A linear system had no solution.
    NoSolution,
    /// Two truncated-algebra elements from different ambients were combined.
    AmbientMismatch,
    /// Chunk generators failed the independence certification.
    DependentGenerators,
    /// An operator image left the chunk span (flagged, not silently dropped).
    ImageOverflow { generator: usize },
    /// Killing-degree search exceeded its bound.
    BoundExceeded { bound: usize },
    /// Internal consistency check failed (signals a kernel bug).
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InsufficientPrecision { needed, have } => {
                write!(f, "insufficient precision: needed {needed}, have {have}")
            }
            Error::Valuation => write!(f, "valuation error: numerator below denominator"),
            Error::Inexact => write!(f, "inexact division within known precision"),
            Error::NotInSpan { valuation } => {
                write!(f, "not in chunk span (residual valuation {valuation})")
            }
            Error::PrecisionExhausted => write!(f, "precision exhausted"),
            Error::NoSolution => write!(f, "no solution"),
            Error::AmbientMismatch => write!(f, "ambient mismatch"),
            Error::DependentGenerators => write!(f, "dependent generators"),
            Error::ImageOverflow { generator } => {
                write!(f, "operator image overflows chunk (generator {generator})")
            }
            Error::BoundExceeded { bound } => write!(f, "bound {bound} exceeded"),
            Error::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
