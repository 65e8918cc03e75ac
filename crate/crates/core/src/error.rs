//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),
    #[error("duplicate vertex label `{0}`")]
    DuplicateLabel(String),
    #[error("vertex parts are not disjoint: `{0}` appears on both sides")]
    OverlappingParts(String),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(String, String),
    #[error("edge ({0}, {1}) does not respect the bipartition")]
    BadEdgeOrientation(String, String),
    #[error("bigraph has an empty part")]
    EmptyPart,
    #[error("coloring covers {got} edges, graph has {expected}")]
    ColoringSizeMismatch { got: usize, expected: usize },
    #[error("color palettes differ")]
    PaletteMismatch,
    #[error("objects live over different hosts")]
    HostMismatch,
    #[error("map is not an automorphism of the host")]
    NotAnAutomorphism,
    #[error("not a valid fold: {0}")]
    NotAFold(String),
    #[error("fold does not preserve the coloring")]
    NotColorPreserving,
    #[error("labeling is not injective")]
    ThetaNotInjective,
    #[error("flag restriction must keep all labeled vertices")]
    RestrictionDropsLabel,
    #[error("search budget exceeded: visited {visited} states (budget {budget}), frontier {frontier}")]
    BudgetExceeded {
        visited: usize,
        budget: usize,
        frontier: usize,
    },
    #[error("tree height {height} exceeds cap {cap}")]
    HeightCapExceeded { height: usize, cap: usize },
    #[error("folding problem is not absorbing")]
    NotAbsorbing,
    #[error("initial coloring does not reach the objectives")]
    ObjectiveUnreachable,
    #[error("graph must be connected for this analysis")]
    Disconnected,
    #[error("fold set is not invariant under the automorphism group")]
    NotAutInvariant,
    #[error("palette too small: need at least {need} colors, have {have}")]
    PaletteTooSmall { need: usize, have: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
