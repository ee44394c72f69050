//! Plane trees with a given degree sequence, their encodings, edge-deletion
//! fragmentations, laminations of the disk and the continuum limits.

pub mod degree_sequence;
pub mod error;
pub mod excursion;
pub mod fragmentation;
pub mod harness;
pub mod lamination;
pub mod plane_tree;
pub mod sampler;

pub use error::{Error, Result};
