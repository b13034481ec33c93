use clap::{Parser, Subcommand};
use navtransfer::eval::{aggregate, make_episodes, render_markdown, save_episodes, MetricMode};
use navtransfer::harness::{read_file, read_rows, read_stored_report, read_trajectories, run_suite, AgentKind, RunConfig, StoredReport};
use navtransfer::navgraph::{build_graph, load_graph, save_graph, GraphBuildConfig};
use navtransfer::navigators::NavigatorKind;
use navtransfer::subgoal::{CandidateSource, ProposerMode};
use navtransfer::world::{generate_scene, load_world, save_world, SceneSpec};
use navtransfer::{Error, Result};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "navtransfer", version, about = "Deterministic sim-to-sim navigation harness")]
struct Cli {
    /// JSON file supplying default values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a procedural scene and write it as a world file.
    GenScene {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        clutter: Option<usize>,
        #[arg(long)]
        stairs: Option<usize>,
        #[arg(long)]
        rooms: Option<usize>,
        /// World file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a navigation graph over a world.
    GenGraph {
        #[arg(long)]
        world: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Graph file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample episodes along graph shortest paths.
    GenEpisodes {
        #[arg(long)]
        world: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of episodes.
        #[arg(long)]
        count: Option<usize>,
        /// Episode file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an episode suite and write rows, trajectories and reports.
    Run(RunArgs),
    /// Re-aggregate finished runs into one report.
    Report {
        /// Run directories to include; defaults to `--out` itself.
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = enum_parser::<CandidateSource>)]
    subgoals: Option<CandidateSource>,
    #[arg(long, value_parser = enum_parser::<ProposerMode>)]
    proposer: Option<ProposerMode>,
    #[arg(long, value_parser = enum_parser::<NavigatorKind>)]
    navigator: Option<NavigatorKind>,
    #[arg(long, value_parser = enum_parser::<AgentKind>)]
    agent: Option<AgentKind>,
    #[arg(long, value_parser = enum_parser::<MetricMode>)]
    mode: Option<MetricMode>,
    #[arg(long)]
    episodes: Option<PathBuf>,
    #[arg(long)]
    world: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    max_decisions: Option<usize>,
    /// Trajectory log for the replay agent.
    #[arg(long)]
    replay: Option<PathBuf>,
}

/// Parses a flag value through the type's serialized variant names.
fn enum_parser<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|e| e.to_string())
}

/// Config file contents: run settings at the top level plus optional
/// generator sections.
struct FileConfig {
    run: RunConfig,
    scene: SceneSpec,
    graph_build: GraphBuildConfig,
    count: Option<usize>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let mut value = match path {
        Some(p) => serde_json::from_slice::<Value>(&read_file(p)?)
            .map_err(|e| Error::Malformed(format!("{}: {e}", p.display())))?,
        None => json!({}),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Malformed("config must be a JSON object".into()))?;
    let scene = obj.remove("scene");
    let graph_build = obj.remove("graph_build");
    let count = obj.remove("count");
    Ok(FileConfig {
        scene: section(scene, "scene")?.unwrap_or_default(),
        graph_build: section(graph_build, "graph_build")?.unwrap_or_default(),
        count: section(count, "count")?,
        run: section(Some(value), "run settings")?.unwrap_or_default(),
    })
}

fn section<T: serde::de::DeserializeOwned>(v: Option<Value>, what: &str) -> Result<Option<T>> {
    v.map(|v| serde_json::from_value(v).map_err(|e| Error::Malformed(format!("config {what}: {e}"))))
        .transpose()
}

fn need<'a>(v: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    v.as_deref().ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::write(path, text)?)
}

fn execute(cli: Cli) -> Result<Value> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::GenScene {
            seed,
            clutter,
            stairs,
            rooms,
            out,
        } => {
            let spec = SceneSpec {
                seed: seed.unwrap_or(cfg.scene.seed),
                clutter: clutter.unwrap_or(cfg.scene.clutter),
                stairs: stairs.unwrap_or(cfg.scene.stairs),
                rooms: rooms.unwrap_or(cfg.scene.rooms),
                ..cfg.scene
            };
            let world = generate_scene(&spec)?;
            write(&out, &save_world(&world))?;
            Ok(json!({"world": out, "cells": world.len(), "components": world.component_count()}))
        }
        Command::GenGraph { world, seed, out } => {
            let world = load_world(&read_file(need(&world.or(cfg.run.world), "world")?)?)?;
            let graph = build_graph(&world, seed.unwrap_or(cfg.run.seed), &cfg.graph_build)?;
            write(&out, &save_graph(&graph))?;
            Ok(json!({"graph": out, "nodes": graph.len(), "edges": graph.edges().len()}))
        }
        Command::GenEpisodes {
            world,
            graph,
            seed,
            count,
            out,
        } => {
            let world = load_world(&read_file(need(&world.or(cfg.run.world), "world")?)?)?;
            let graph = load_graph(&read_file(need(&graph.or(cfg.run.graph), "graph")?)?)?;
            let n = count.or(cfg.count).unwrap_or(200);
            let episodes = make_episodes(&world, &graph, seed.unwrap_or(cfg.run.seed), n)?;
            write(&out, &save_episodes(&episodes)?)?;
            Ok(json!({"episodes": out, "count": episodes.len()}))
        }
        Command::Run(args) => {
            let run = &mut cfg.run;
            macro_rules! over {
                ($($f:ident),*) => {$(if let Some(v) = args.$f { run.$f = v; })*};
            }
            over!(seed, subgoals, proposer, navigator, agent, mode, workers, max_decisions);
            macro_rules! over_path {
                ($($f:ident),*) => {$(if args.$f.is_some() { run.$f = args.$f; })*};
            }
            over_path!(episodes, world, graph, out, replay);
            let out = run_suite(run)?;
            Ok(json!({"out": run.out, "episodes": out.rows.len(), "sr": out.report.sr, "spl": out.report.spl}))
        }
        Command::Report { runs, out } => {
            let runs = if runs.is_empty() { vec![out.clone()] } else { runs };
            let mut md = String::new();
            let mut stored = Vec::new();
            for dir in &runs {
                let rows = read_rows(dir)?;
                let trajectories = read_trajectories(dir)?;
                let summary = aggregate(&rows, &trajectories)?;
                let label = read_stored_report(dir)?.run;
                md.push_str(&render_markdown(&label.title(), &summary));
                md.push('\n');
                stored.push(StoredReport { run: label, summary });
            }
            fs::create_dir_all(&out)?;
            write(&out.join("summary.md"), &md)?;
            write(&out.join("summary.json"), &(serde_json::to_string_pretty(&stored)? + "\n"))?;
            Ok(json!({"out": out, "runs": runs.len()}))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let record = json!({"ok": false, "kind": "usage", "message": e.kind().to_string(), "detail": e.to_string()});
            eprintln!("{record}");
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{}", json!({"ok": true, "result": summary}));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({"ok": false, "kind": e.kind(), "message": e.to_string()}));
            ExitCode::from(1)
        }
    }
}
