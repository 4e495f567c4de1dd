//! Numerical k-symplectic Lagrangian field theory with symmetry.
//!
//! The crate builds second-order PDE fields (SOPDEs) on the bundle of
//! k¹-velocities of a configuration manifold, reduces them by a Lie group
//! symmetry to Lagrange-Poincaré fields, tests their integrability, and
//! reconstructs full solutions from reduced ones through the mechanical
//! k-connection. Everything is coordinate based: vector fields, metrics and
//! group data are supplied as expressions and differentiated exactly with
//! nested hyper-dual numbers.

pub mod cli;
pub mod diff;
pub mod error;
pub mod exprlang;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod geometry;
pub mod integrability;
pub mod lagrange_poincare;
pub mod lagrangian;
pub mod reconstruction;
pub mod scalar;
pub mod solver;
pub mod symmetry;

pub use error::{Error, Result};
pub use scalar::{HyperDual, Scalar};
