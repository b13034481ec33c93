//! Episodes, per-episode scoring in graph (VLN) and continuous (VLN-CE)
//! conventions, and suite-level aggregation.

mod episodes;
mod report;

pub use episodes::{
    load_episodes, make_episodes, save_episodes, Episode, MAX_HOPS, MIN_HOPS, START_HEADING_INCREMENT,
};
pub use report::{render_markdown, ElevationBin, ElevationSplit, ErrorTail, SummaryReport};

use crate::error::{Error, Result};
use crate::harness::AgentDecision;
use crate::navigators::NavOutcome;
use crate::subgoal::SubgoalCandidate;
use crate::world::{Action, DistanceField, GridWorld, Pose};
use serde::{Deserialize, Serialize};

/// Success radius around the goal, meters.
pub const SUCCESS_DISTANCE: f64 = 3.0;
/// Short-range navigation error thresholds, meters.
pub const ERROR_THRESHOLDS: [f64; 3] = [0.2, 0.5, 1.0];
/// Episodes whose reference climbs or drops more than this are "high".
pub const ELEVATION_SPLIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricMode {
    /// Straight-line distances between hop endpoints.
    Vln,
    /// Geodesic distances over the executed low-level path.
    Vlnce,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub pose: Pose,
    /// Action that produced this pose; `None` for the start and teleports.
    pub action: Option<Action>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub teleport: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hop {
    pub candidate: SubgoalCandidate,
    pub outcome: NavOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub episode_id: usize,
    pub scene: String,
    /// Every pose visited, starting with the episode start.
    pub steps: Vec<Step>,
    /// Every decision in order, including a final STOP if one was issued.
    pub decisions: Vec<AgentDecision>,
    pub hops: Vec<Hop>,
    pub stop_called: bool,
}

impl Trajectory {
    pub fn start(episode: &Episode) -> Self {
        Self {
            episode_id: episode.id,
            scene: episode.scene.clone(),
            steps: vec![Step {
                pose: episode.start,
                action: None,
                teleport: false,
            }],
            decisions: Vec::new(),
            hops: Vec::new(),
            stop_called: false,
        }
    }

    pub fn terminal(&self) -> Option<&Pose> {
        self.steps.last().map(|s| &s.pose)
    }

    /// Poses at hop boundaries: the start and each hop's terminal pose.
    pub fn hop_endpoints(&self) -> Vec<Pose> {
        let mut out = Vec::with_capacity(self.hops.len() + 1);
        out.extend(self.steps.first().map(|s| s.pose));
        out.extend(self.hops.iter().map(|h| h.outcome.pose));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub episode_id: usize,
    pub scene: String,
    pub mode: MetricMode,
    pub tl: f64,
    #[serde(with = "crate::navigators::inf_as_null")]
    pub ne: f64,
    pub os: u8,
    pub sr: u8,
    pub spl: f64,
    pub elevation_delta: f64,
}

/// Success weighted by inverse path length.
pub fn spl(success: u8, reference_length: f64, taken_length: f64) -> Result<f64> {
    if !(reference_length > 0.0) || !(taken_length >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spl needs reference > 0 and taken >= 0, got {reference_length} and {taken_length}"
        )));
    }
    Ok(f64::from(success.min(1)) * reference_length / taken_length.max(reference_length))
}

pub fn score_episode(episode: &Episode, trajectory: &Trajectory, world: &GridWorld, mode: MetricMode) -> Result<MetricsRow> {
    let field = match mode {
        MetricMode::Vln => None,
        MetricMode::Vlnce => Some(world.distance_field(episode.goal.planar())?),
    };
    score_with(episode, trajectory, world, mode, field.as_ref())
}

/// Scores against a precomputed geodesic field from the goal, which must be
/// present in VLN-CE mode.
pub fn score_with(
    episode: &Episode,
    trajectory: &Trajectory,
    world: &GridWorld,
    mode: MetricMode,
    goal_field: Option<&DistanceField>,
) -> Result<MetricsRow> {
    if world.name() != episode.scene || trajectory.scene != episode.scene {
        return Err(Error::ModeMismatch(format!(
            "episode scene {} scored on world {} with trajectory from {}",
            episode.scene,
            world.name(),
            trajectory.scene
        )));
    }
    let terminal = *trajectory.terminal().ok_or(Error::Empty("trajectory"))?;
    let goal = episode.goal;
    let (tl, ne, os, reference) = match mode {
        MetricMode::Vln => {
            let ends = trajectory.hop_endpoints();
            let tl = ends.windows(2).map(|w| w[0].position().dist(&w[1].position())).sum();
            let to_goal = |p: &Pose| p.position().dist(&goal);
            let os = ends.iter().any(|p| to_goal(p) <= SUCCESS_DISTANCE);
            (tl, to_goal(&terminal), os, episode.reference_euclidean)
        }
        MetricMode::Vlnce => {
            let field = goal_field
                .ok_or_else(|| Error::ModeMismatch("VLN-CE scoring needs a geodesic field".into()))?;
            if field.source().planar().dist(&goal.planar()) > 1e-9 {
                return Err(Error::ModeMismatch("geodesic field is not rooted at the goal".into()));
            }
            let mut tl = 0.0;
            for w in trajectory.steps.windows(2) {
                let (a, b) = (&w[0].pose, &w[1].pose);
                tl += if w[1].teleport {
                    world
                        .geodesic_distance(a.planar(), b.planar())?
                        .unwrap_or(f64::INFINITY)
                } else {
                    a.position().dist(&b.position())
                };
            }
            let to_goal = |p: &Pose| field.to(world, p.planar()).unwrap_or(f64::INFINITY);
            let os = trajectory.steps.iter().any(|s| to_goal(&s.pose) <= SUCCESS_DISTANCE);
            (tl, to_goal(&terminal), os, episode.reference_length)
        }
    };
    let sr = u8::from(trajectory.stop_called && ne <= SUCCESS_DISTANCE);
    Ok(MetricsRow {
        episode_id: episode.id,
        scene: episode.scene.clone(),
        mode,
        tl,
        ne,
        os: u8::from(os),
        sr,
        spl: spl(sr, reference, tl)?,
        elevation_delta: episode.elevation_delta,
    })
}

/// Suite means, short-range error tails over every driven hop, and SR split
/// by elevation delta. Inputs are reordered by `(scene, episode id)` first,
/// so the result does not depend on their order.
pub fn aggregate(rows: &[MetricsRow], trajectories: &[Trajectory]) -> Result<SummaryReport> {
    if rows.is_empty() {
        return Err(Error::Empty("metrics rows"));
    }
    let mode = rows[0].mode;
    if rows.iter().any(|r| r.mode != mode) {
        return Err(Error::ModeMismatch("rows mix VLN and VLN-CE scoring".into()));
    }
    let mut sorted: Vec<&MetricsRow> = rows.iter().collect();
    sorted.sort_by(|a, b| (&a.scene, a.episode_id).cmp(&(&b.scene, b.episode_id)));
    let n = sorted.len() as f64;
    let mean = |f: &dyn Fn(&MetricsRow) -> f64| sorted.iter().map(|r| f(r)).sum::<f64>() / n;

    let mut errors: Vec<f64> = trajectories
        .iter()
        .flat_map(|t| t.hops.iter())
        .filter(|h| !h.outcome.teleported)
        .map(|h| h.outcome.nav_error)
        .collect();
    errors.sort_by(f64::total_cmp);
    let tails = ERROR_THRESHOLDS
        .iter()
        .map(|&t| {
            let above = errors.iter().filter(|&&e| e > t).count();
            ErrorTail {
                threshold: t,
                above,
                fraction: if errors.is_empty() { 0.0 } else { above as f64 / errors.len() as f64 },
            }
        })
        .collect();

    let bin = |high: bool| {
        let members: Vec<&&MetricsRow> = sorted
            .iter()
            .filter(|r| (r.elevation_delta > ELEVATION_SPLIT) == high)
            .collect();
        ElevationBin {
            episodes: members.len(),
            sr: if members.is_empty() {
                0.0
            } else {
                members.iter().map(|r| f64::from(r.sr)).sum::<f64>() / members.len() as f64
            },
        }
    };

    Ok(SummaryReport {
        mode,
        episodes: sorted.len(),
        tl: mean(&|r| r.tl),
        ne: mean(&|r| r.ne),
        os: mean(&|r| f64::from(r.os)),
        sr: mean(&|r| f64::from(r.sr)),
        spl: mean(&|r| r.spl),
        navigations: errors.len(),
        mean_nav_error: if errors.is_empty() {
            0.0
        } else {
            errors.iter().sum::<f64>() / errors.len() as f64
        },
        error_tails: tails,
        elevation: ElevationSplit {
            threshold: ELEVATION_SPLIT,
            high: bin(true),
            low: bin(false),
        },
    })
}
