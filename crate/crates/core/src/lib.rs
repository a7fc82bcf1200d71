//! Exact symbolic engine for Courant algebroids and their supergeometric
//! description.
//!
//! The crate is organised bottom-up:
//!
//! - [`rational`] and [`poly`]: exact rationals and commutative polynomials
//!   in the base coordinates `x^1..x^n`.
//! - [`superalgebra`]: functions on a degree-2 symplectic graded manifold
//!   (`x` of degree 0, odd `θ` of degree 1, momenta `p` of degree 2) and the
//!   degree -2 Poisson superbracket.
//! - [`linalg`]: dense rational matrices and exact row reduction.
//! - [`leibniz`]: finite-dimensional Leibniz algebras, contracted products,
//!   Nijenhuis torsion and the Leibniz 2-cocycle condition.
//! - [`courant`]: the Dorfman bracket on `TR^n ⊕ T*R^n` with polynomial
//!   coefficients, block endomorphisms, classification of Courant-Nijenhuis
//!   tensors and the commutant computation.
//! - [`derived`]: cubic Hamiltonians, derived brackets and quadratic
//!   generators of orthogonal tensors.
//! - [`cli`]: JSON documents, check dispatch and deterministic reports.

pub mod cli;
pub mod courant;
pub mod derived;
pub mod error;
pub mod leibniz;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod rational;
pub mod superalgebra;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use poly::Poly;
pub use rational::Q;
pub use superalgebra::{CoordKind, GradedContext, GradedCoordinate, SuperPolynomial};
