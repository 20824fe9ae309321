//! Halphen transforms of space curves in projective 3-space.
//!
//! The crate computes, with exact arithmetic over towers of quadratic
//! extensions of the rationals, the image of a curve under the Halphen map
//! attached to a quadric, together with degree, rank, class, branch types and
//! stationary indices of both curves.

pub mod algebra;
pub mod cli;
pub mod corpus;
pub mod desing;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod verify;

pub use error::{Error, Result};
