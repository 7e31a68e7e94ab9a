//! Gaussian rearrangement calculus.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: φ, Φ, Φ⁻¹ and the isoperimetric profile `I = φ∘Φ⁻¹`.
//! - [`quantile`]: decreasing rearrangements as grid functions on `(0,1]`,
//!   maximal averages, Hardy operators and the weighted norms built on them.
//! - [`sampler`]: analytic and random test functions on `ℝⁿ`, empirical
//!   rearrangements from seeded Gaussian samples and the one-dimensional
//!   Gaussian symmetrization `f°(x) = f*(Φ(x₁))`.
//! - [`sets`]: half-spaces, centered balls and slabs with exact or Monte
//!   Carlo Gaussian measure and perimeter.
//! - [`suite`]: one verifier per inequality, each producing an
//!   [`suite::InequalityReport`].

// Coefficient tables are copied at full published precision, and `!(x > y)`
// is used on purpose so NaN falls into the rejecting branch.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gaussian;
pub mod quadrature;
pub mod quantile;
pub mod sampler;
pub mod sets;
pub mod special;
pub mod suite;

pub use error::{Error, Result};
pub use quantile::{GridFunction, Interpolation, NormTag, QuantileFunction};
pub use sampler::{EmpiricalRearrangement, TestFunction};
pub use suite::{InequalityReport, Verdict};
