//! Decision procedures for first-order epistemic planning over automatic
//! structures.

pub mod automata;
pub mod cli;
pub mod demo;
pub mod epistemic;
pub mod error;
pub mod logic;
pub mod planner;
mod prefix;
pub mod presentation;

pub use error::{Error, Result};
