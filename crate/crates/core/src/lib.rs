//! Finite-dimensional model spaces `K_α = H² ⊖ αH²` of finite Blaschke
//! products and the asymmetric truncated Toeplitz operators between them.
//!
//! Everything in this crate is pure computation over small dense complex
//! matrices. It is `no_std` and only needs `alloc`; file formats, the command
//! line and random sampling live in the `atto` companion crate.
//!
//! Vectors of `K_α` are stored internally in the Takenaka–Malmquist basis,
//! which is orthonormal for every zero configuration. All other bases
//! (kernels at the zeros, Clark, modified Clark) carry their change-of-basis
//! matrices to that coordinate system.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod blaschke;
pub mod error;
mod linalg;
pub mod membership;
pub mod modelspace;
pub mod operators;
pub mod quadrature;
pub mod rankone;
pub mod symbol;
pub mod tolerance;

#[cfg(test)]
mod testutil;

pub use blaschke::{BlaschkeProduct, ClarkPointSet};
pub use error::{Error, Result};
pub use membership::{ClarkPairing, MembershipVerdict, Method, Witness};
pub use modelspace::{ArgBranch, BasisKind, ModelBasis, ModelSpace, ModelVector};
pub use operators::{OperatorMatrix, RankOneVariant, SpanReport};
pub use rankone::{Example41, RankOneDecomposition, RankOneTag, VectorClass, VectorClassification};
pub use symbol::{BoundarySymbol, RawSymbol, SymbolSpec};
pub use tolerance::Tolerances;

pub use num_complex::Complex64;

/// Dense complex matrix used for every operator and change of basis.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
