//! Noncommutative rational functions in free symmetric variables.
//!
//! The crate evaluates matrix-valued rational expressions on tuples of
//! symmetric matrices, converts them to descriptor realizations
//! `r(x) = D + C^T (J - L_A(x))^{-1} C`, minimizes and inverts those
//! realizations, probes pencil singularities and hidden singularities,
//! and audits positivity sets against the invertibility set of the
//! direct-sum pencil of a realization and its inverse.
//!
//! Numerical modules are generic over the floating-point scalar (see
//! [`scalar::Scalar`]); the truncated Fock space machinery in [`fock`]
//! works in exact integer arithmetic. Concrete f64 aliases for the main
//! types live at the crate root.

pub mod blockschur;
pub mod corpus;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod lmirep;
pub mod ncalg;
pub mod realization;
pub mod scalar;
pub mod singular;

pub use scalar::Scalar;

/// f64 dense matrix, the default working matrix type.
pub type Matrix = nalgebra::DMatrix<f64>;
/// f64 rational expression tree.
pub type Expr = ncalg::RationalExpr<f64>;
/// f64 free matrix-valued polynomial.
pub type Polynomial = ncalg::FreePolynomial<f64>;
/// f64 evaluation point: a g-tuple of n×n matrices.
pub type Tuple = ncalg::MatrixTuple<f64>;
/// f64 descriptor realization.
pub type Realization = realization::DescriptorRealization<f64>;
/// f64 affine linear pencil.
pub type Pencil = realization::Pencil<f64>;
