//! Agents, the per-episode control loop and the suite runner.

mod suite;

pub use suite::{
    load_replay, read_file, read_rows, read_stored_report, read_trajectories, run_episodes, run_suite, sweep, RunLabel, StoredReport,
    SuiteOutput, REPORT_JSON, REPORT_MD, ROWS_FILE, TRAJECTORIES_FILE,
};

use crate::error::{Error, Result};
use crate::eval::{score_with, Episode, Hop, MetricMode, MetricsRow, Step, Trajectory};
use crate::geometry::Point2;
use crate::navgraph::NavGraph;
use crate::navigators::{
    local, oracle_navigate, project_target, teleport, LocalPolicyConfig, NavOutcome, NavigatorKind,
};
use crate::planners::DEFAULT_STOP_RADIUS;
use crate::subgoal::{generate_candidates, CandidateSource, ProposerMode, SubgoalCandidate, SubgoalConfig};
use crate::world::{DistanceField, GridWorld, Pose};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const DEFAULT_MAX_DECISIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentKind {
    Greedy,
    Random,
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentDecision {
    Stop,
    /// Index into the candidate list presented at that step.
    Candidate(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub world: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub episodes: Option<PathBuf>,
    pub subgoals: CandidateSource,
    pub proposer: ProposerMode,
    pub navigator: NavigatorKind,
    pub agent: AgentKind,
    pub mode: MetricMode,
    pub max_decisions: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 picks one per core. Never affects results.
    pub workers: usize,
    /// Trajectory log whose decisions a replay agent repeats.
    pub replay: Option<PathBuf>,
    pub stop_radius: f64,
    pub local: LocalPolicyConfig,
    pub subgoal: SubgoalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            world: None,
            graph: None,
            episodes: None,
            subgoals: CandidateSource::Graph,
            proposer: ProposerMode::Freespace,
            navigator: NavigatorKind::Teleport,
            agent: AgentKind::Greedy,
            mode: MetricMode::Vlnce,
            max_decisions: DEFAULT_MAX_DECISIONS,
            seed: 0,
            out: None,
            workers: 1,
            replay: None,
            stop_radius: DEFAULT_STOP_RADIUS,
            local: LocalPolicyConfig::default(),
            subgoal: SubgoalConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_decisions == 0 {
            return Err(Error::InvalidParameter("max-decisions must be positive".into()));
        }
        if !(self.stop_radius > 0.0) {
            return Err(Error::InvalidParameter("stop-radius must be positive".into()));
        }
        if self.agent == AgentKind::Replay && self.replay.is_none() {
            return Err(Error::InvalidParameter("the replay agent needs a replay log".into()));
        }
        Ok(())
    }
}

/// Geodesic distance to the goal of every candidate's projection, `None`
/// where the projection fails.
fn candidate_distances(
    candidates: &[SubgoalCandidate],
    world: &GridWorld,
    pose: &Pose,
    goal_field: &DistanceField,
) -> Vec<Option<f64>> {
    candidates
        .iter()
        .map(|c| {
            project_target(world, pose, c.r, c.theta)
                .ok()
                .and_then(|p| goal_field.to(world, p))
        })
        .collect()
}

/// Picks the candidate geodesically nearest the goal if it improves on the
/// current position, else STOP. Ties go to the lowest index.
pub fn select_greedy(candidates: &[SubgoalCandidate], world: &GridWorld, pose: &Pose, goal: Point2) -> Result<AgentDecision> {
    let field = world.distance_field(goal)?;
    Ok(greedy_with(candidates, world, pose, &field))
}

fn greedy_with(candidates: &[SubgoalCandidate], world: &GridWorld, pose: &Pose, goal_field: &DistanceField) -> AgentDecision {
    let here = goal_field.to(world, pose.planar()).unwrap_or(f64::INFINITY);
    let mut best: Option<(f64, usize)> = None;
    for (i, d) in candidate_distances(candidates, world, pose, goal_field).into_iter().enumerate() {
        let Some(d) = d else { continue };
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    match best {
        Some((d, i)) if d < here => AgentDecision::Candidate(i),
        _ => AgentDecision::Stop,
    }
}

/// Uniform over the candidates and STOP.
pub fn select_random(candidate_count: usize, rng: &mut impl Rng) -> AgentDecision {
    let k = rng.gen_range(0..=candidate_count);
    if k == candidate_count {
        AgentDecision::Stop
    } else {
        AgentDecision::Candidate(k)
    }
}

pub fn select_replay(log: &[AgentDecision], t: usize) -> Result<AgentDecision> {
    log.get(t).copied().ok_or(Error::ReplayMissing(t))
}

fn episode_rng(seed: u64, episode: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode as u64);
    rng
}

/// Conveys the agent toward one candidate with the configured navigator.
fn convey(cfg: &RunConfig, world: &GridWorld, pose: &Pose, prev: Point2, c: &SubgoalCandidate) -> Result<NavOutcome> {
    let target = match c.target {
        Some(p) => Ok(p.planar()),
        None => project_target(world, pose, c.r, c.theta),
    };
    let target = match target {
        Ok(t) => t,
        Err(Error::NoSnap { .. }) => return Ok(NavOutcome::stalled(*pose, pose.planar().offset(c.r, pose.heading + c.theta))),
        Err(e) => return Err(e),
    };
    match cfg.navigator {
        NavigatorKind::Teleport => teleport(world, pose, prev, target),
        NavigatorKind::Oracle => oracle_navigate(world, pose, target, cfg.stop_radius),
        NavigatorKind::Local => {
            let local_cfg = LocalPolicyConfig {
                stop_radius: cfg.stop_radius,
                ..cfg.local
            };
            Ok(local::drive(world, pose, target, &local_cfg))
        }
    }
}

/// Runs one episode: generate candidates, decide, convey, until STOP or the
/// decision budget runs out; then scores the trajectory.
pub fn run_episode(
    cfg: &RunConfig,
    episode: &Episode,
    world: &GridWorld,
    graph: &NavGraph,
    replay: Option<&[AgentDecision]>,
) -> Result<(Trajectory, MetricsRow)> {
    cfg.validate()?;
    let goal_field = world.distance_field(episode.goal.planar())?;
    let mut rng = episode_rng(cfg.seed, episode.id);
    let mut traj = Trajectory::start(episode);
    let mut pose = episode.start;
    let mut prev = pose.planar();

    for t in 0..cfg.max_decisions {
        let set = generate_candidates(cfg.subgoals, world, graph, &pose, cfg.proposer, &cfg.subgoal)?;
        let decision = match cfg.agent {
            AgentKind::Greedy => greedy_with(&set.candidates, world, &pose, &goal_field),
            AgentKind::Random => select_random(set.candidates.len(), &mut rng),
            AgentKind::Replay => select_replay(replay.ok_or(Error::ReplayMissing(t))?, t)?,
        };
        traj.decisions.push(decision);
        let AgentDecision::Candidate(i) = decision else {
            traj.stop_called = true;
            break;
        };
        let candidate = set.candidates.get(i).cloned().ok_or_else(|| {
            Error::InvalidParameter(format!("decision {i} out of {} candidates", set.candidates.len()))
        })?;
        let outcome = convey(cfg, world, &pose, prev, &candidate)?;
        if outcome.teleported {
            traj.steps.push(Step {
                pose: outcome.pose,
                action: None,
                teleport: true,
            });
        } else {
            let mut cur = pose;
            for &a in &outcome.actions {
                cur = world.step_action(&cur, a).0;
                traj.steps.push(Step {
                    pose: cur,
                    action: Some(a),
                    teleport: false,
                });
            }
        }
        prev = pose.planar();
        pose = outcome.pose;
        traj.hops.push(Hop { candidate, outcome });
    }
    let row = score_with(episode, &traj, world, cfg.mode, Some(&goal_field))?;
    Ok((traj, row))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use rand::SeedableRng;

    fn hall() -> GridWorld {
        GridWorld::open("hall", 0.05, 400, 60)
    }

    #[test]
    fn greedy_picks_candidate_at_goal() {
        let w = hall();
        let pose = w.pose(1.025, 1.025, 0.0).unwrap();
        let cands = vec![
            SubgoalCandidate::new(2.0, 180.0, 0.0, 0.5),
            SubgoalCandidate::new(4.0, 0.0, 0.0, 0.5),
        ];
        let d = select_greedy(&cands, &w, &pose, Point2::new(5.025, 1.025)).unwrap();
        assert_eq!(d, AgentDecision::Candidate(1));
    }

    #[test]
    fn greedy_stops_when_nothing_improves() {
        let w = hall();
        let pose = w.pose(5.025, 1.025, 0.0).unwrap();
        let cands = vec![
            SubgoalCandidate::new(2.0, 180.0, 0.0, 0.5),
            SubgoalCandidate::new(2.0, 0.0, 0.0, 0.5),
        ];
        let d = select_greedy(&cands, &w, &pose, Point2::new(5.525, 1.025)).unwrap();
        assert_eq!(d, AgentDecision::Stop);
    }

    #[test]
    fn greedy_ties_take_lowest_index() {
        let w = hall();
        let pose = w.pose(5.025, 1.525, 0.0).unwrap();
        let cands = vec![
            SubgoalCandidate::new(2.0, 0.0, 0.0, 0.5),
            SubgoalCandidate::new(2.0, 0.0, 0.0, 0.5),
        ];
        let d = select_greedy(&cands, &w, &pose, Point2::new(9.025, 1.525)).unwrap();
        assert_eq!(d, AgentDecision::Candidate(0));
    }

    #[test]
    fn random_includes_stop_and_is_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<_> = (0..200).map(|_| select_random(3, &mut a)).collect();
        let ys: Vec<_> = (0..200).map(|_| select_random(3, &mut b)).collect();
        assert_eq!(xs, ys);
        assert!(xs.contains(&AgentDecision::Stop));
        assert!(xs.contains(&AgentDecision::Candidate(2)));
        assert_eq!(select_random(0, &mut a), AgentDecision::Stop);
    }

    #[test]
    fn replay_returns_logged_decision() {
        let log = [AgentDecision::Candidate(2), AgentDecision::Stop];
        assert_eq!(select_replay(&log, 1).unwrap(), AgentDecision::Stop);
        assert!(matches!(select_replay(&log, 2), Err(Error::ReplayMissing(2))));
    }

    fn chain() -> (GridWorld, NavGraph, Episode) {
        let w = hall();
        let nodes: Vec<Point3> = (0..9).map(|k| Point3::new(0.525 + 2.0 * k as f64, 1.525, 0.0)).collect();
        let g = NavGraph::new(nodes, (0..8).map(|k| (k, k + 1))).unwrap();
        let ep = Episode {
            id: 3,
            scene: "hall".into(),
            start: w.pose(0.525, 1.525, 90.0).unwrap(),
            goal: Point3::new(12.525, 1.525, 0.0),
            reference_path: (0..7).collect(),
            reference_length: 12.0,
            reference_euclidean: 12.0,
            elevation_delta: 0.0,
        };
        (w, g, ep)
    }

    #[test]
    fn greedy_graph_teleport_succeeds_on_node_sequence() {
        let (w, g, ep) = chain();
        let cfg = RunConfig::default();
        let (traj, row) = run_episode(&cfg, &ep, &w, &g, None).unwrap();
        assert!(traj.stop_called);
        assert_eq!(row.sr, 1);
        let visited: Vec<Option<usize>> = traj.hops.iter().map(|h| h.candidate.node).collect();
        assert_eq!(visited, (1..7).map(Some).collect::<Vec<_>>());
        for h in &traj.hops {
            let node = g.node(h.candidate.node.unwrap()).unwrap();
            assert!(h.outcome.pose.planar().dist(&node.planar()) < 1e-6);
        }
    }

    #[test]
    fn immediate_stop_agent() {
        let (w, g, ep) = chain();
        let cfg = RunConfig {
            agent: AgentKind::Replay,
            replay: Some("unused".into()),
            ..RunConfig::default()
        };
        let (traj, row) = run_episode(&cfg, &ep, &w, &g, Some(&[AgentDecision::Stop])).unwrap();
        assert_eq!(traj.steps.len(), 1);
        assert_eq!(row.tl, 0.0);
        assert_eq!(row.sr, 0);
    }

    #[test]
    fn replay_reproduces_oracle_run() {
        let (w, g, ep) = chain();
        let cfg = RunConfig {
            navigator: NavigatorKind::Oracle,
            ..RunConfig::default()
        };
        let (traj, row) = run_episode(&cfg, &ep, &w, &g, None).unwrap();
        let replay_cfg = RunConfig {
            agent: AgentKind::Replay,
            replay: Some("unused".into()),
            ..cfg.clone()
        };
        let (again, row2) = run_episode(&replay_cfg, &ep, &w, &g, Some(&traj.decisions)).unwrap();
        assert_eq!(again, traj);
        assert_eq!(row2, row);
    }

    #[test]
    fn decisions_never_exceed_budget() {
        let (w, g, ep) = chain();
        let cfg = RunConfig {
            agent: AgentKind::Random,
            max_decisions: 4,
            seed: 11,
            ..RunConfig::default()
        };
        for id in 0..10 {
            let ep = Episode { id, ..ep.clone() };
            let (traj, _) = run_episode(&cfg, &ep, &w, &g, None).unwrap();
            assert!(traj.decisions.len() <= 4);
        }
    }
}
