pub mod error;
pub mod eval;
pub mod geometry;
pub mod harness;
pub mod navgraph;
pub mod navigators;
pub mod planners;
pub mod subgoal;
pub mod world;

pub use error::{Error, Result};
