//! Globally divergence-free, pressure-robust hybridizable discontinuous
//! Galerkin discretization of the Stokes tangential Dirichlet boundary control
//! problem on uniform triangular meshes.

pub mod analysis;
pub mod cli;
pub mod fem;
pub mod hdg;
pub mod mesh;
pub mod solver;

/// A point or vector in the plane.
pub type Point = [f64; 2];
