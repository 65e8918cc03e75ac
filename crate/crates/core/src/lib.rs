//! Exact combinatorial analysis of finite bigraphs: folds and
//! cut-involutions, cut-percolation and left-cut-percolation, reachability
//! of edge colorings under folding maps, fold-stability in its plain,
//! strong, symmetric and left-symmetric variants, and rational
//! homomorphism densities over finite bigraphons.
//!
//! All verdicts are exact: graph searches are exhaustive over explicit
//! state spaces and all density arithmetic is big-rational. Floating point
//! is never used.

pub mod bigraph;
pub mod catalog;
pub mod coloring;
pub mod density;
pub mod dyadic;
pub mod error;
pub mod flag;
pub mod fold;
pub mod iso;
pub mod percolation;
mod scc;
pub mod stability;
pub mod tree;

pub use bigraph::{Bigraph, EdgeSet, Endomorphism, VertexSet};
pub use coloring::{tensor, ColorVec, ColoredBigraph, Coloring, LeftColoring};
pub use error::{Error, Result};
pub use flag::Flag;
pub use fold::{Fold, FoldSet};
