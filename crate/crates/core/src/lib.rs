//! Exact computation in right-angled Artin groups.

pub mod cmp;
pub mod decomp;
pub mod dls;
pub mod element;
pub mod error;
pub mod graph;
mod literal;
pub mod subgroup;
pub mod tree;
pub mod word;

pub use error::{Error, Result};
pub use graph::{DefGraph, VertexSet};
pub use word::{Letter, NormalForm, Word};
