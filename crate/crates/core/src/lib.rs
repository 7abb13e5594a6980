//! Exact-arithmetic computations with finite-dimensional Hopf algebras:
//! structure-constant data with full axiom verification, module categories
//! with projectivity and freeness certificates, the Coend module coalgebra
//! with its convolution calculus, and the blockwise halfdual recursion that
//! produces machine-checkable non-flatness witness certificates.

pub mod coend;
pub mod error;
pub mod field;
pub mod freeword;
pub mod hopf;
pub mod matrix;
pub mod rep;
pub mod witness;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use matrix::{solve_affine, AffineSolution, Matrix};
