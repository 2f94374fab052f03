//! Numerical toolkit for p-capacity, isocapacitary constants and p-Laplacian
//! Sobolev constants on finite weighted graphs with boundary.
//!
//! A [`WeightedGraph`] plays the role of a compact manifold with boundary:
//! edge conductances stand in for the metric, `mu` for the volume measure and
//! `nu` for the boundary area measure. On top of it the crate computes
//!
//! * p-capacities between disjoint vertex sets ([`capacity`]),
//! * Steklov and Neumann (p, α)-Sobolev constants and first nontrivial
//!   p-Laplacian eigenvalues ([`spectral`]),
//! * Steklov, Neumann and Dirichlet isocapacitary constants ([`isocap`]),
//! * checkers for the two-sided isocapacitary bounds and the inequalities
//!   behind them ([`checks`]),
//! * model geometries, disk meshes and graph I/O ([`geometry`]).

// `!(x > y)` is used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod checks;
pub mod error;
pub mod fmt;
pub mod geometry;
pub mod graph;
pub mod isocap;
mod linalg;
pub mod rng;
pub mod spectral;

pub use capacity::{capacity, capacity_p2_oracle, path_capacity_closed_form, CapacityMode, CapacityResult};
pub use error::{Error, Result};
pub use graph::{
    finite_difference_check, p_energy, p_energy_gradient, Edge, Measure, SetKind, VertexFunction,
    VertexSet, WeightedGraph,
};
pub use isocap::{IsocapMode, IsocapResult, IsocapSearch};
pub use spectral::{Certification, SobolevMode, SobolevResult, SpectralMode};
