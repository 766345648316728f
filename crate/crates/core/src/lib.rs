//! Exact-arithmetic toolkit for ultrametric spaces, leveled trees, and
//! partition arguments over them.
//!
//! The crate is organised around a pipeline:
//!
//! * [`rational`] — arbitrary-precision rational numbers with strict parsing,
//!   so every distance in the crate is exact.
//! * [`space`] — finite metric and ultrametric spaces with full validation,
//!   plus point colorings.
//! * [`katetov`] — admissible one-point extension profiles over a base space.
//! * [`copysearch`] — scaled-copy search for an extension profile: a greedy
//!   stage-by-stage strategy and an exhaustive oracle.
//! * [`treespace`] — leveled trees, the ultrametric they induce on their
//!   leaves, and conversions between ultrametric spaces and trees (including
//!   regularised trees with uniform level values).
//! * [`treeramsey`] — monochromatic complete subtrees of uniformly branching
//!   trees under leaf colorings.
//! * [`universal`] — a universal leveled tree for a finite distance palette,
//!   and extraction of monochromatic isometric copies of a finite ultrametric
//!   space from any leaf coloring of it.
//! * [`gen`] — seeded random generators for spaces, trees, and colorings.
//! * [`format`] — JSON document types for every object above.
//! * [`dot`] — Graphviz output.

pub mod copysearch;
pub mod dot;
pub mod format;
pub mod gen;
pub mod katetov;
pub mod rational;
pub mod space;
pub mod treeramsey;
pub mod treespace;
pub mod universal;

pub use rational::Rational;
pub use space::{Coloring, MetricSpace, UltrametricSpace};
