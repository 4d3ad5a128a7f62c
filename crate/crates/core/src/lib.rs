//! Dynamic logic with assignments as formulas, plus termination.
//!
//! Evaluation under actual and expected semantics, side-effect sets and
//! their classification, short-circuit logic checks, and a program-algebra
//! pipeline (projection, behavior extraction, translation).

pub mod error;
pub mod semantics;
pub mod syntax;

pub use error::{Error, Result};
pub mod effects;
pub mod sos;
pub mod classify;
pub mod gen;
pub mod scl;
pub mod pga;
