//! ZX-calculus engine for cutting stabiliser decompositions of magic state
//! cultivation circuits.
//!
//! The crate provides an exact-scalar ZX-diagram representation, a Clifford
//! simplifier, stabiliser decompositions (spider cutting, two-T, BSS, magic
//! cat states), builders for the d=3 and d=5 cultivation circuits
//! post-selected on +1, and a dense contraction oracle used to verify every
//! pipeline against ground truth.

pub mod builders;
pub mod canon;
pub mod circuit;
pub mod codes;
pub mod decomp;
pub mod error;
pub mod evaluator;
pub mod graph;
pub mod json;
pub mod phase;
pub mod rewrite;
pub mod scalar;
pub mod strategy;
pub mod tikz;

pub use error::Error;
pub use graph::{Diagram, EdgeKind, Spider, SpiderKind, V};
pub use phase::Phase;
pub use scalar::ExactScalar;
