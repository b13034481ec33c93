use super::{run_episode, AgentDecision, AgentKind, RunConfig};
use crate::error::{Error, Result};
use crate::eval::{aggregate, load_episodes, render_markdown, Episode, MetricMode, MetricsRow, SummaryReport, Trajectory};
use crate::navgraph::{load_graph, NavGraph};
use crate::navigators::NavigatorKind;
use crate::subgoal::{CandidateSource, ProposerMode};
use crate::world::{load_world, GridWorld};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const ROWS_FILE: &str = "rows.jsonl";
pub const TRAJECTORIES_FILE: &str = "trajectories.jsonl";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_MD: &str = "report.md";

/// What a suite run was configured as, stored next to its summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLabel {
    pub subgoals: CandidateSource,
    pub proposer: ProposerMode,
    pub navigator: NavigatorKind,
    pub agent: AgentKind,
    pub mode: MetricMode,
    pub seed: u64,
}

impl RunLabel {
    pub fn of(cfg: &RunConfig) -> Self {
        Self {
            subgoals: cfg.subgoals,
            proposer: cfg.proposer,
            navigator: cfg.navigator,
            agent: cfg.agent,
            mode: cfg.mode,
            seed: cfg.seed,
        }
    }

    pub fn title(&self) -> String {
        let mut t = variant_name(&self.subgoals);
        if self.subgoals == CandidateSource::HeuristicSgm {
            t.push_str(&format!(" ({})", variant_name(&self.proposer)));
        }
        format!(
            "{t} / {} / {} / {}",
            variant_name(&self.navigator),
            variant_name(&self.agent),
            variant_name(&self.mode)
        )
    }
}

/// Serialized name of a unit enum variant.
fn variant_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredReport {
    pub run: RunLabel,
    pub summary: SummaryReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutput {
    pub label: RunLabel,
    /// Sorted by episode id.
    pub trajectories: Vec<Trajectory>,
    pub rows: Vec<MetricsRow>,
    pub report: SummaryReport,
}

impl SuiteOutput {
    pub fn markdown(&self) -> String {
        render_markdown(&self.label.title(), &self.report)
    }

    /// Writes rows, trajectories and both report forms into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(ROWS_FILE), jsonl(&self.rows)?)?;
        fs::write(dir.join(TRAJECTORIES_FILE), jsonl(&self.trajectories)?)?;
        let stored = StoredReport {
            run: self.label.clone(),
            summary: self.report.clone(),
        };
        fs::write(dir.join(REPORT_JSON), serde_json::to_string_pretty(&stored)? + "\n")?;
        fs::write(dir.join(REPORT_MD), self.markdown())?;
        Ok(())
    }
}

fn jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it)?);
        out.push('\n');
    }
    Ok(out)
}

/// Reads a file, naming it in the error.
pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_file(path)?).map_err(|_| Error::Malformed(format!("{} is not UTF-8", path.display())))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = read_text(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| {
            serde_json::from_str(l).map_err(|e| Error::Malformed(format!("{} line {}: {e}", path.display(), k + 1)))
        })
        .collect()
}

pub fn read_rows(dir: &Path) -> Result<Vec<MetricsRow>> {
    read_jsonl(&dir.join(ROWS_FILE))
}

pub fn read_trajectories(dir: &Path) -> Result<Vec<Trajectory>> {
    read_jsonl(&dir.join(TRAJECTORIES_FILE))
}

pub fn read_stored_report(dir: &Path) -> Result<StoredReport> {
    Ok(serde_json::from_slice(&read_file(&dir.join(REPORT_JSON))?)?)
}

/// Decision logs keyed by episode id, from a trajectory log.
pub fn load_replay(path: &Path) -> Result<BTreeMap<usize, Vec<AgentDecision>>> {
    let trajectories: Vec<Trajectory> = read_jsonl(path)?;
    Ok(trajectories.into_iter().map(|t| (t.episode_id, t.decisions)).collect())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))
}

/// Runs every episode on `workers` threads. Each episode owns its random
/// stream, so results do not depend on the thread count.
pub fn run_episodes(
    cfg: &RunConfig,
    world: &GridWorld,
    graph: &NavGraph,
    episodes: &[Episode],
    replay: Option<&BTreeMap<usize, Vec<AgentDecision>>>,
) -> Result<SuiteOutput> {
    cfg.validate()?;
    if episodes.is_empty() {
        return Err(Error::Empty("episode set"));
    }
    let run = |ep: &Episode| {
        let log = match (cfg.agent, replay) {
            (AgentKind::Replay, Some(logs)) => Some(logs.get(&ep.id).map(Vec::as_slice).ok_or_else(|| Error::InvalidParameter(format!("replay log has no episode {}", ep.id)))?),
            (AgentKind::Replay, None) => return Err(Error::InvalidParameter("replay agent needs a decision log".into())),
            _ => None,
        };
        run_episode(cfg, ep, world, graph, log)
    };
    let results: Vec<Result<_>> = pool(cfg.workers)?.install(|| episodes.par_iter().map(run).collect());
    let mut pairs = results.into_iter().collect::<Result<Vec<_>>>()?;
    pairs.sort_by_key(|(t, _)| t.episode_id);
    let (trajectories, rows): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    let report = aggregate(&rows, &trajectories)?;
    Ok(SuiteOutput {
        label: RunLabel::of(cfg),
        trajectories,
        rows,
        report,
    })
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::InvalidParameter(format!("missing --{what}")))
}

/// Loads the configured world, graph and episodes, runs them and writes the
/// results when an output directory is set.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteOutput> {
    cfg.validate()?;
    let world = load_world(&read_file(required(&cfg.world, "world")?)?)?;
    let graph = load_graph(&read_file(required(&cfg.graph, "graph")?)?)?;
    let episodes = load_episodes(&read_text(required(&cfg.episodes, "episodes")?)?)?;
    let replay = match (&cfg.replay, cfg.agent) {
        (Some(p), AgentKind::Replay) => Some(load_replay(p)?),
        _ => None,
    };
    let out = run_episodes(cfg, &world, &graph, &episodes, replay.as_ref())?;
    if let Some(dir) = &cfg.out {
        out.write(dir)?;
    }
    Ok(out)
}

/// Runs every (source, navigator) cell over the same episodes and renders
/// one table per cell.
pub fn sweep(
    cfg: &RunConfig,
    world: &GridWorld,
    graph: &NavGraph,
    episodes: &[Episode],
    cells: &[(CandidateSource, NavigatorKind)],
) -> Result<(Vec<SuiteOutput>, String)> {
    let mut outs = Vec::with_capacity(cells.len());
    let mut md = String::new();
    for &(subgoals, navigator) in cells {
        let cell = RunConfig {
            subgoals,
            navigator,
            ..cfg.clone()
        };
        let out = run_episodes(&cell, world, graph, episodes, None)?;
        let _ = writeln!(md, "{}", out.markdown());
        outs.push(out);
    }
    Ok((outs, md))
}
