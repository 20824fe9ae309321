//! Projective geometry of space curves and their Halphen transforms.

pub mod branch;
pub mod curve;
pub mod halphen;
pub mod quadric;
pub mod wedge;
