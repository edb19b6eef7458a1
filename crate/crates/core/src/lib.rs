//! Simulator and dialogue harness for a Planner-Actor-Reporter agent in a
//! partially observable gridworld.
//!
//! A Planner reads a task question plus the dialogue so far and emits one
//! instruction ("Examine X." / "Pickup X."). The Actor executes it in the
//! grid, and the Reporter turns the resulting events into text that is
//! appended to the dialogue.

pub mod actor;
pub mod curve;
pub mod error;
pub mod gridworld;
pub mod planner;
pub mod protocol;
pub mod reporter;
pub mod rng;
pub mod tasks;
pub mod vocab;

pub use error::*;
