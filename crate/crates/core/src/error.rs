//! Shared error type.

use std::error::Error;
use std::fmt;

/// Errors surfaced by the public construction and evaluation entry points.
///
/// Mixing scalars from different rings (e.g. `Z/4` with `Z/8`) is always an
/// error, never an implicit coercion: silent precision loss is the classic
/// p-adic bug.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// Values from two distinct rings were combined.
    RingMismatch { left: String, right: String },
    /// Matrix or vector shapes are incompatible.
    DimensionMismatch { expected: String, found: String },
    /// A modulus ring was requested with a composite base.
    NotPrime(u64),
    /// A field modulus polynomial failed the irreducibility check.
    NotIrreducible(String),
    /// An algebra basis does not span a unital algebra.
    NotUnital,
    /// An operation required Howell-form input and got something else.
    NotHowell,
    /// No canonical field embedding is available for the requested extension.
    MissingEmbedding { from: String, to: String },
    /// An enumeration would exceed the configured cap.
    Resource {
        cap: u64,
        needed: u64,
        what: &'static str,
    },
    /// A configuration file was malformed; the message names the offending key.
    Config(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::RingMismatch { left, right } => {
                write!(f, "ring mismatch: {left} vs {right}")
            }
            CoreError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            CoreError::NotPrime(p) => write!(f, "{p} is not prime"),
            CoreError::NotIrreducible(poly) => write!(f, "polynomial {poly} is not irreducible"),
            CoreError::NotUnital => write!(f, "basis does not span a unital algebra"),
            CoreError::NotHowell => write!(f, "matrix is not in Howell form"),
            CoreError::MissingEmbedding { from, to } => {
                write!(f, "no canonical embedding of {from} into {to}")
            }
            CoreError::Resource { cap, needed, what } => {
                write!(
                    f,
                    "enumeration cap exceeded: {what} needs {needed}, cap is {cap}"
                )
            }
            CoreError::Config(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl Error for CoreError {}
