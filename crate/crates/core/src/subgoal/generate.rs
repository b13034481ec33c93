use super::candidate::{candidate_view_index, SubgoalCandidate};
use super::nms::{gaussian_nms, DEFAULT_NMS_EPSILON, DEFAULT_TOP_K};
use super::proposer::{propose_heatmap, ProposerConfig, ProposerMode};
use super::radial::{heading_bin, heading_center, range_bin, range_center, RadialKind, RadialMap};
use crate::error::Result;
use crate::navgraph::{localize, neighbors, NavGraph};
use crate::world::{elevation_probe, laser_scan_with, GridWorld, Pose, ScanConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    Graph,
    OptimalSgm,
    HeuristicSgm,
}

/// NMS width used for generated candidates, in bins. Wider than the bare
/// NMS default so that the k candidates spread over distinct directions
/// instead of crowding the single most open one.
pub const CANDIDATE_NMS_SIGMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubgoalConfig {
    pub proposer: ProposerConfig,
    pub nms_sigma: f64,
    pub top_k: usize,
    pub nms_epsilon: f64,
    pub scan: ScanConfig,
}

impl Default for SubgoalConfig {
    fn default() -> Self {
        Self {
            proposer: ProposerConfig::default(),
            nms_sigma: CANDIDATE_NMS_SIGMA,
            top_k: DEFAULT_TOP_K,
            nms_epsilon: DEFAULT_NMS_EPSILON,
            scan: ScanConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    /// Node the agent was localized to, for graph-backed sources.
    pub node: Option<usize>,
    pub candidates: Vec<SubgoalCandidate>,
    /// Probability map the candidates were drawn from, for map-backed sources.
    pub heatmap: Option<RadialMap>,
}

/// Maps each candidate to its radial bin with equal mass. Reconstructed
/// candidates sit at bin centers and keep their elevation angle; they no
/// longer refer to a graph node.
pub fn discretize_candidates(candidates: &[SubgoalCandidate]) -> (RadialMap, Vec<SubgoalCandidate>) {
    let mut map = RadialMap::zeros(RadialKind::Prob);
    if candidates.is_empty() {
        return (map, Vec::new());
    }
    let mass = 1.0 / candidates.len() as f64;
    let rebuilt = candidates
        .iter()
        .map(|c| {
            let (r, clamped) = range_bin(c.r);
            let h = heading_bin(c.theta);
            map.add(r, h, mass);
            let mut out = SubgoalCandidate::new(range_center(r), heading_center(h), c.phi, mass);
            out.clamped = clamped || c.clamped;
            out
        })
        .collect();
    (map, rebuilt)
}

/// Candidates offered at `pose` by the chosen source.
pub fn generate_candidates(
    source: CandidateSource,
    world: &GridWorld,
    graph: &NavGraph,
    pose: &Pose,
    mode: ProposerMode,
    cfg: &SubgoalConfig,
) -> Result<CandidateSet> {
    match source {
        CandidateSource::Graph | CandidateSource::OptimalSgm => {
            let node = localize(graph, world, pose.planar())?;
            let found = neighbors(graph, node, pose)?;
            if source == CandidateSource::Graph {
                return Ok(CandidateSet {
                    node: Some(node),
                    candidates: found,
                    heatmap: None,
                });
            }
            let (map, candidates) = discretize_candidates(&found);
            Ok(CandidateSet {
                node: Some(node),
                candidates,
                heatmap: Some(map),
            })
        }
        CandidateSource::HeuristicSgm => {
            let scan = laser_scan_with(world, pose, &cfg.scan);
            let probe = (mode == ProposerMode::ElevAware).then(|| elevation_probe(world, pose));
            let map = propose_heatmap(&scan, probe.as_ref(), mode, &cfg.proposer);
            let mut candidates = gaussian_nms(&map, cfg.nms_sigma, cfg.top_k, cfg.nms_epsilon);
            if let Some(probe) = &probe {
                for c in &mut candidates {
                    if let Some(ramp) = probe.readings[heading_bin(c.theta)] {
                        if c.r >= ramp.entry_range {
                            c.phi = ramp.rise.atan2(ramp.exit_range).to_degrees();
                            c.view_index = candidate_view_index(c.theta, c.phi);
                        }
                    }
                }
            }
            Ok(CandidateSet {
                node: None,
                candidates,
                heatmap: Some(map),
            })
        }
    }
}
