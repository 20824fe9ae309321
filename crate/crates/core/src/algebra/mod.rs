//! Exact scalars, homogeneous polynomials, binary forms and truncated series.

pub mod binary;
pub mod field;
pub mod json;
pub mod modp;
pub mod parse;
pub mod poly;
pub mod series;

pub use binary::{BinaryForm, UniPoly};
pub use field::{FieldElement, FieldTower, Rational, TowerRef};
pub use parse::{parse_poly, parse_scalar, PolyParser};
pub use poly::{HomoPoly, Vars};
pub use series::TruncSeries;
