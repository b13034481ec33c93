//! Runs a small suite across candidate sources and navigators and prints
//! one report table per configuration.

use navtransfer::eval::make_episodes;
use navtransfer::harness::{sweep, RunConfig};
use navtransfer::navgraph::build_graph;
use navtransfer::navigators::NavigatorKind;
use navtransfer::subgoal::CandidateSource;
use navtransfer::world::{generate_scene, SceneSpec};

fn main() -> navtransfer::Result<()> {
    let world = generate_scene(&SceneSpec { seed: 2, stairs: 1, clutter: 10, ..SceneSpec::default() })?;
    let graph = build_graph(&world, 2, &Default::default())?;
    let episodes = make_episodes(&world, &graph, 2, 20)?;
    let cells = [
        (CandidateSource::Graph, NavigatorKind::Teleport),
        (CandidateSource::Graph, NavigatorKind::Local),
        (CandidateSource::OptimalSgm, NavigatorKind::Local),
        (CandidateSource::HeuristicSgm, NavigatorKind::Local),
    ];
    let (_, markdown) = sweep(&RunConfig::default(), &world, &graph, &episodes, &cells)?;
    print!("{markdown}");
    Ok(())
}
