//! First-order rigidity of polytopes.
//!
//! A polytope is treated as a point-hyperplane framework: vertex positions `p`
//! together with unit facet normals `a`, constrained by edge lengths, facet
//! coplanarity and the unit-norm condition. The crate decides first-order
//! rigidity, builds flexible polytopes (Minkowski, zonotope and affine
//! flexes), and implements the Tutte / Maxwell-Cremona machinery used to
//! build contraction sequences of realizations.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod constructions;
pub mod contraction;
mod error;
pub mod exact;
pub mod geometry;
pub mod graph;
pub mod linalg;
pub mod rigidity;
pub mod tutte_mc;

pub use error::{Error, Result};
pub use geometry::{Realization, ToleranceConfig};
pub use graph::{CombinatorialType, PolyhedralGraph};
