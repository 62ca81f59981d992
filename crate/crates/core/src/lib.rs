//! Numerical discovery engine for triangle geometry centered on the
//! Gergonne point.
//!
//! The crate is organized as a stack:
//!
//! * [`scalar`] — the two working precisions (fast `f64`, confirm
//!   double-double) behind one trait.
//! * [`geom`] — planar kernel: points, lines, circles, intersections,
//!   predicates with a relative tolerance policy.
//! * [`triangle`] — triangle representation, named centers, cevians,
//!   associated circles.
//! * [`formulas`] — closed-form quantities for the Gergonne
//!   configuration, stated over side lengths only.
//! * [`apollonius`] — tangent-circle solvers for the PPP..CLP families.
//! * [`lang`] — the `.geo` construction DSL: parser, evaluator,
//!   formatter.
//! * [`sampler`] — random constrained triangle shapes.
//! * [`detect`] — relation detection and triviality filtering.
//! * [`explorer`] — enumeration of construction sequences and the
//!   discovery loop.
//! * [`corpus`] — the built-in regression corpus of catalogued
//!   properties.
//! * [`render`] — SVG figure emission.

pub mod apollonius;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod explorer;
pub mod formulas;
pub mod geom;
pub mod lang;
pub mod render;
pub mod sampler;
pub mod scalar;
pub mod triangle;

pub use error::GeomError;
pub use scalar::{Dd, Scalar};
