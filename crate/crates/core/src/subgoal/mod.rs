//! Subgoal candidate generation: polar maps, the clearance heuristic
//! proposer, Gaussian NMS, discretization of graph candidates, view indices
//! and Sinkhorn scoring.

mod candidate;
mod generate;
mod nms;
mod proposer;
pub mod radial;
mod sinkhorn;

pub use candidate::{candidate_view_index, SubgoalCandidate, VIEW_COUNT, VIEW_ELEVATIONS, VIEW_HEADINGS};
pub use generate::{
    discretize_candidates, generate_candidates, CandidateSet, CandidateSource, SubgoalConfig,
    CANDIDATE_NMS_SIGMA,
};
pub use nms::{gaussian_nms, DEFAULT_NMS_EPSILON, DEFAULT_NMS_SIGMA, DEFAULT_TOP_K};
pub use proposer::{propose_heatmap, ProposerConfig, ProposerMode};
pub use radial::{RadialKind, RadialMap};
pub use sinkhorn::{
    bin_point, entropic_ot, sinkhorn_divergence, sinkhorn_divergence_points, OtSolution, SinkhornConfig,
};
