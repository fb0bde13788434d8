//! Exact symbolic engine for the equivariant Chern group cocycles of
//! Diff(R^n), the Hopf algebra H_n with its relative Hopf cyclic complex,
//! and the extraction of the corresponding Hopf cyclic Chern tensors.
//!
//! Everything is exact: arbitrary-precision rationals, multivariate
//! polynomials localized at registered Jacobian determinants, bigraded
//! exterior forms on the simplex times R^n, and operator-level Hopf
//! algebra computations.  No floating point anywhere.

pub mod error;
pub mod poly;
pub mod localized;
pub mod parse;
pub mod jet;
pub mod form;
pub mod chern;
pub mod hopf;
pub mod cyclic;
pub mod consts;
pub mod cli;
pub mod cochain;
pub mod extract;
pub mod sample;

pub use error::CoreError;
pub use localized::{DenId, LocalizedPoly};
pub use poly::{Monomial, MultiIdx, Poly, Rational, Var};
