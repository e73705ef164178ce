//! Costed head-automaton dependency models for analysis and generation, a
//! bilingual-lexicon tiling transfer step, and trainable cost functions.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command line live in the `headmt` crate.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod cost;
pub mod error;
pub mod generation;
pub mod graph;
pub mod key;
pub mod model;
pub mod pipeline;
pub mod train;
pub mod transfer;
pub mod tree;

pub use cost::Cost;
pub use error::Error;
pub use graph::{GraphArc, GraphNode, NodeId, UnorderedDependencyGraph};
pub use model::{Model, ModelDef, Mode};
pub use tree::{Dependent, OrderedDependencyTree};

pub type Result<T> = core::result::Result<T, Error>;
