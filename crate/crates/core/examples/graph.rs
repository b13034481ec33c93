//! Builds a navigation graph over a scene and walks a shortest path.

use navtransfer::navgraph::{build_graph, path_length, shortest_path, GraphBuildConfig};
use navtransfer::world::{generate_scene, SceneSpec};

fn main() -> navtransfer::Result<()> {
    let world = generate_scene(&SceneSpec { seed: 3, clutter: 10, ..SceneSpec::default() })?;
    let graph = build_graph(&world, 3, &GraphBuildConfig::default())?;
    let stats = graph.stats();
    println!(
        "{} nodes, {} edges, mean edge {:.2} m, degrees {:?}",
        stats.nodes, stats.edges, stats.mean_edge_length, stats.degree_histogram
    );

    let far = graph.len() - 1;
    let path = shortest_path(&graph, 0, far)?;
    println!("0 -> {far}: {path:?}");
    println!(
        "graph length {:.2} m, straight line {:.2} m",
        path_length(&graph, &path),
        graph.node(0)?.dist(&graph.node(far)?)
    );
    for (a, b) in path.iter().zip(&path[1..]) {
        let (pa, pb) = (graph.node(*a)?, graph.node(*b)?);
        let geo = world.geodesic_distance(pa.planar(), pb.planar())?.unwrap_or(f64::INFINITY);
        println!("  {a:>3} -> {b:<3} edge {:.2} m, geodesic {geo:.2} m", graph.edge_length(*a, *b));
    }
    Ok(())
}
