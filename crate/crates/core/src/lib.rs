//! Symmetrized phase-space moments of a free particle.
//!
//! Moments `Y_k = <{P^k X^(n-k)}>` about the centroid evolve under free
//! motion as a binomial shear, so every order carries polynomial invariants
//! and a small catalogue of possible time courses. The crate propagates
//! moment vectors, extracts the invariants, classifies the geometry of
//! `Y_0(t)`, measures moments of grid wavefunctions and classical ensembles,
//! and checks the inequalities quantum states must obey.

// `!(x > 0.0)` is the NaN-rejecting form; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classical_ensemble;
pub mod error;
pub mod geometry;
pub mod inequalities;
pub mod moment_core;
pub mod quadrature;
pub mod wavefunction;

pub use error::{Error, Result};
pub use moment_core::{InvariantSet, MomentVector};
