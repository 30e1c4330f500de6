//! Exact congruence-class geometry over prime fields.
//!
//! Points live in 𝔽_p² with the quadratic form `‖u‖ = u₁² + u₂²` as squared
//! distance. The crate enumerates O₂(𝔽_p), counts congruence classes of
//! segments and triangles, computes distance and hinge statistics, and checks
//! the counting inequalities that relate them on concrete sets.

pub mod bounds;
pub mod cli;
pub mod congruence;
pub mod error;
pub mod field;
pub mod harness;
pub mod isometry;
pub mod sets;
pub mod statistics;

pub use error::{Error, Result};
pub use field::{FieldElement, FieldParams, Point};
