use core::fmt;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A Blaschke product needs at least one zero.
    EmptyProduct,
    /// Zero `index` does not lie in the open unit disk.
    ZeroOutsideDisk {
        index: usize,
        modulus: f64,
    },
    /// A value that must lie on the unit circle does not.
    NotUnimodular {
        what: &'static str,
        modulus: f64,
    },
    /// Evaluation point too close to a pole `1/conj(a_j)`.
    PoleProximity {
        z: Complex64,
    },
    /// Two boundary roots coincide after polishing.
    RootCollision {
        distance: f64,
    },
    /// A polished boundary root does not satisfy the equation.
    RootResidual {
        residual: f64,
    },
    /// The kernel-at-zeros basis needs distinct zeros.
    RepeatedZeros,
    /// Operands live in different model spaces.
    SpaceMismatch,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// The operation needs a particular basis kind.
    BasisMismatch(&'static str),
    QuadratureNonConvergence {
        points: usize,
    },
    /// Two Clark points fall within the matching tolerance of one partner.
    AmbiguousMatch {
        distance: f64,
    },
    /// More shared Clark points than `min(m, n)`.
    SharedPointsExceedDimension {
        shared: usize,
        m: usize,
        n: usize,
    },
    /// A denominator fell below tolerance where the theory says it cannot.
    ToleranceBreakdown {
        what: &'static str,
        value: f64,
    },
    /// Residual inside the separation band between accept and reject.
    Indeterminate {
        residual: f64,
        threshold: f64,
    },
    ZeroVector,
    RankNotOne {
        rank: usize,
    },
    NotMember {
        residual: f64,
    },
    /// A non-standard rank-one operator where both degrees exceed one.
    DichotomyViolation {
        m: usize,
        n: usize,
    },
    /// Internal consistency check failed.
    Inconsistent(&'static str),
    InvalidParameter(&'static str),
    /// Structured and raw parts of a symbol disagree on the circle.
    SymbolMismatch {
        deviation: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyProduct => write!(f, "Blaschke product must have at least one zero"),
            Error::ZeroOutsideDisk { index, modulus } => {
                write!(f, "zero {index} has modulus {modulus}, expected < 1")
            }
            Error::NotUnimodular { what, modulus } => {
                write!(f, "{what} must be unimodular, got modulus {modulus}")
            }
            Error::PoleProximity { z } => write!(f, "point {z} is too close to a pole"),
            Error::RootCollision { distance } => {
                write!(f, "boundary roots collide (distance {distance:e})")
            }
            Error::RootResidual { residual } => {
                write!(f, "boundary root residual {residual:e} above tolerance")
            }
            Error::RepeatedZeros => write!(f, "kernel-at-zeros basis requires distinct zeros"),
            Error::SpaceMismatch => write!(f, "operands belong to different model spaces"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::BasisMismatch(msg) => write!(f, "basis mismatch: {msg}"),
            Error::QuadratureNonConvergence { points } => {
                write!(f, "circle quadrature did not converge with {points} points")
            }
            Error::AmbiguousMatch { distance } => {
                write!(f, "ambiguous Clark point matching (distance {distance:e})")
            }
            Error::SharedPointsExceedDimension { shared, m, n } => {
                write!(f, "{shared} shared Clark points exceed min({m}, {n})")
            }
            Error::ToleranceBreakdown { what, value } => {
                write!(f, "tolerance breakdown in {what}: {value:e}")
            }
            Error::Indeterminate {
                residual,
                threshold,
            } => write!(
                f,
                "indeterminate verdict: residual {residual:e} inside band above {threshold:e}"
            ),
            Error::ZeroVector => write!(f, "vector is zero"),
            Error::RankNotOne { rank } => {
                write!(f, "operator has numerical rank {rank}, expected 1")
            }
            Error::NotMember { residual } => {
                write!(
                    f,
                    "operator is not a truncated Toeplitz operator (residual {residual:e})"
                )
            }
            Error::DichotomyViolation { m, n } => write!(
                f,
                "non-standard rank-one operator found for degrees ({m}, {n}), which is impossible"
            ),
            Error::Inconsistent(msg) => write!(f, "internal inconsistency: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SymbolMismatch { deviation } => {
                write!(f, "structured and raw symbol disagree by {deviation:e}")
            }
        }
    }
}

impl core::error::Error for Error {}
