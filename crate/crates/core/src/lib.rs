//! Exact covariant differential calculus on quantum Minkowski-type spaces.
//!
//! A structure `(N, R, Z, T, g[, γ])` defines a coordinate algebra by quadratic-linear-constant
//! relations. On top of it this crate builds normal forms, the covariant first-order calculus,
//! the R-antisymmetrized exterior algebra, metric operators (Laplacian and Dirac), plane-wave
//! and dispersion machinery, and braided tensor powers. All symbolic arithmetic is over Q(i).

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod calculus;
pub mod error;
pub mod exterior;
pub mod fock;
pub mod linalg;
pub mod matrix;
pub mod ncalgebra;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod structures;
pub mod suite;
pub mod text;
pub mod waves;

pub use error::{Error, Result};
pub use matrix::{Matrix, SparseVec};
pub use ncalgebra::{NCPoly, NormalFormEngine, Word};
pub use report::{Check, Report, ValidationReport};
pub use scalar::Scalar;
pub use structures::{StructureData, StructureParts, validate};
