//! Finite models of cusped spaces for relatively hyperbolic groups and spaces.
//!
//! The library builds desk-scale truncations of the classical objects of coarse
//! geometry over peripheral structures:
//!
//! - weighted graphs with exact shortest paths, Gromov products, four-point
//!   hyperbolicity constants and quasi-centres ([`graph`]),
//! - Cayley balls of free groups and free products of cyclic groups, together
//!   with their peripheral coset structures ([`group`]),
//! - combinatorial horoballs over unit-weight graphs, with the closed-form
//!   distance estimate and its exact integer minimisation ([`horoball`]),
//! - cusped spaces obtained by gluing truncated horoballs onto peripheral
//!   subsets, with Busemann approximations ([`cusped_space`]),
//! - transient/deep decompositions of geodesics, coarse projections and the
//!   distance formula ([`transient`]),
//! - finite boundary samples, visual quasi-metrics and shadow decorations
//!   ([`boundary`]),
//! - snowflake-on-peripheral map specifications, the cusped extension of such
//!   maps and distortion/quasisymmetry measurements ([`maps`]),
//! - exact computations in the upper half-space model of real hyperbolic
//!   space ([`realhyp`]),
//! - experiment orchestration with deterministic, machine-readable reports
//!   ([`report`]).
//!
//! Everything is deterministic: randomised scans take explicit seeds, geodesics
//! are tie-broken lexicographically, and reports are byte-stable under a fixed
//! configuration.

pub mod boundary;
pub mod cusped_space;
pub mod error;
pub mod graph;
pub mod group;
pub mod horoball;
pub mod maps;
pub mod realhyp;
pub mod report;
pub mod transient;

pub use error::{Error, Result};
pub use graph::WeightedGraph;

/// Tolerance used for all equality comparisons of path lengths.
///
/// Horoball weights e^{-n} are irrational, so lengths are doubles and exact
/// rational arithmetic is not available.
pub const LENGTH_TOL: f64 = 1e-9;
