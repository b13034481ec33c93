//! Candidate subgoals from each source at one pose, and how far the
//! discretized and heuristic maps sit from the graph's own candidates.

use navtransfer::navgraph::build_graph;
use navtransfer::subgoal::{
    discretize_candidates, generate_candidates, sinkhorn_divergence, CandidateSource, ProposerMode, RadialMap,
    SinkhornConfig, SubgoalConfig,
};
use navtransfer::world::{generate_scene, SceneSpec};

fn main() -> navtransfer::Result<()> {
    let world = generate_scene(&SceneSpec { seed: 21, stairs: 1, clutter: 6, ..SceneSpec::default() })?;
    let graph = build_graph(&world, 21, &Default::default())?;
    let node = graph.node(graph.len() / 3)?;
    let pose = world.pose(node.x, node.y, 90.0)?;
    let cfg = SubgoalConfig::default();

    let graph_set = generate_candidates(CandidateSource::Graph, &world, &graph, &pose, ProposerMode::Freespace, &cfg)?;
    let (graph_map, _) = discretize_candidates(&graph_set.candidates);
    let sk = SinkhornConfig::default();
    for (source, mode) in [
        (CandidateSource::Graph, ProposerMode::Freespace),
        (CandidateSource::OptimalSgm, ProposerMode::Freespace),
        (CandidateSource::HeuristicSgm, ProposerMode::Freespace),
        (CandidateSource::HeuristicSgm, ProposerMode::ElevAware),
    ] {
        let set = generate_candidates(source, &world, &graph, &pose, mode, &cfg)?;
        println!("{source:?} ({mode:?}): {} candidates", set.candidates.len());
        for c in &set.candidates {
            println!("  r {:4.2} m  theta {:7.2}  phi {:6.2}  mass {:.3}", c.r, c.theta, c.phi, c.mass);
        }
        let map = set.heatmap.unwrap_or_else(|| discretize_candidates(&set.candidates).0);
        println!("  divergence from graph map {:.4}", sinkhorn_divergence(&graph_map, &map, &sk)?);
    }
    let noise = sinkhorn_divergence(&graph_map, &RadialMap::uniform(), &sk)?;
    println!("uniform map for scale: {noise:.4}");
    Ok(())
}
