//! Directed expander decomposition: cut-matching, push-pull-relabel and trimming.

pub mod cert;
pub mod cutmatch;
pub mod decomp;
pub mod error;
pub mod flow;
pub mod graph;
pub mod linkcut;
pub mod oracle;
pub mod ppr;
pub mod rational;
pub mod trim;
pub mod witness;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Subgraph, Weighting};
pub use rational::Q;
