//! Higher Toda brackets in bounded chain complexes over a prime field.
//!
//! Everything is computed with exact arithmetic mod `p`. Quotients are taken
//! in canonical coordinates (see [`linalg::Matrix::cokernel`]), so two
//! constructions that quotient the same ambient space by the same subspace
//! produce literally equal complexes.

pub mod bridge;
pub mod chain;
pub mod cubes;
pub mod error;
pub mod gen;
pub mod linalg;
pub mod random;
pub mod toda_cubical;
pub mod toda_recursive;

pub use chain::{ChainComplex, ChainMap, GradedMap};
pub use error::{Error, Result};
pub use linalg::{Matrix, Scalar};
