use crate::error::{Error, Result};
use crate::geometry::{Point3, Point2};
use crate::navgraph::{shortest_paths_from, NavGraph};
use crate::world::{GridWorld, Pose};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const MIN_HOPS: usize = 5;
pub const MAX_HOPS: usize = 7;
/// Start headings are multiples of this many degrees.
pub const START_HEADING_INCREMENT: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Episode {
    pub id: usize,
    pub scene: String,
    pub start: Pose,
    pub goal: Point3,
    /// Graph shortest path from the start node to the goal node.
    pub reference_path: Vec<usize>,
    /// Sum of geodesic distances between consecutive reference nodes.
    pub reference_length: f64,
    /// Sum of straight-line distances between consecutive reference nodes.
    pub reference_euclidean: f64,
    /// Highest minus lowest node elevation along the reference path.
    pub elevation_delta: f64,
}

impl Episode {
    pub fn hops(&self) -> usize {
        self.reference_path.len().saturating_sub(1)
    }
}

/// Samples `n` episodes whose references are graph shortest paths of
/// `MIN_HOPS..=MAX_HOPS` hops. Only pairs where a walk that always moves to
/// the neighbor geodesically nearest the goal ends at the goal are kept.
/// Distinct node pairs are drawn without replacement until exhausted, then
/// the cycle repeats.
pub fn make_episodes(world: &GridWorld, graph: &NavGraph, seed: u64, n: usize) -> Result<Vec<Episode>> {
    let fields = graph
        .nodes()
        .iter()
        .map(|p| world.distance_field(p.planar()))
        .collect::<Result<Vec<_>>>()?;
    let descends = |a: usize, b: usize| -> Result<bool> {
        let d = |v: usize| fields[b].to(world, graph.nodes()[v].planar()).unwrap_or(f64::INFINITY);
        let mut cur = a;
        // each move strictly lowers the distance, so this terminates
        loop {
            let mut best = (d(cur), cur);
            for &v in graph.adjacent(cur)? {
                if d(v) < best.0 {
                    best = (d(v), v);
                }
            }
            if best.1 == cur {
                return Ok(cur == b);
            }
            cur = best.1;
        }
    };
    let mut pairs = Vec::new();
    for a in 0..graph.len() {
        for (b, found) in shortest_paths_from(graph, a)?.into_iter().enumerate() {
            if let Some((_, path)) = found {
                if (MIN_HOPS..=MAX_HOPS).contains(&(path.len() - 1)) && a != b && descends(a, b)? {
                    pairs.push(path);
                }
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Infeasible(format!(
            "graph has no usable node pair {MIN_HOPS}-{MAX_HOPS} hops apart"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = Vec::new();
    let mut episodes = Vec::with_capacity(n);
    for id in 0..n {
        if order.is_empty() {
            order = (0..pairs.len()).collect();
            order.shuffle(&mut rng);
            order.reverse();
        }
        let path = pairs[order.pop().expect("refilled above")].clone();
        let heading = START_HEADING_INCREMENT * rng.gen_range(0..12) as f64;
        episodes.push(episode_for(world, graph, id, path, heading)?);
    }
    Ok(episodes)
}

fn episode_for(world: &GridWorld, graph: &NavGraph, id: usize, path: Vec<usize>, heading: f64) -> Result<Episode> {
    let pts: Vec<Point3> = path.iter().map(|&v| graph.node(v)).collect::<Result<_>>()?;
    let mut geodesic = 0.0;
    let mut straight = 0.0;
    for w in pts.windows(2) {
        geodesic += world
            .geodesic_distance(w[0].planar(), w[1].planar())?
            .ok_or(Error::Unreachable)?;
        straight += w[0].dist(&w[1]);
    }
    let zmax = pts.iter().map(|p| p.z).fold(f64::MIN, f64::max);
    let zmin = pts.iter().map(|p| p.z).fold(f64::MAX, f64::min);
    let s: Point2 = pts[0].planar();
    Ok(Episode {
        id,
        scene: world.name().to_string(),
        start: world.pose(s.x, s.y, heading)?,
        goal: *pts.last().expect("paths have two or more nodes"),
        reference_path: path,
        reference_length: geodesic,
        reference_euclidean: straight,
        elevation_delta: zmax - zmin,
    })
}

/// One episode per line.
pub fn save_episodes(episodes: &[Episode]) -> Result<String> {
    let mut out = String::new();
    for e in episodes {
        out.push_str(&serde_json::to_string(e)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn load_episodes(text: &str) -> Result<Vec<Episode>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, l)| serde_json::from_str(l).map_err(|e| Error::Malformed(format!("episode line {}: {e}", k + 1))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_world() -> (GridWorld, NavGraph) {
        let w = GridWorld::open("hall", 0.05, 400, 40);
        let nodes = (0..9).map(|k| Point3::new(0.525 + 2.0 * k as f64, 1.025, 0.0)).collect();
        let g = NavGraph::new(nodes, (0..8).map(|k| (k, k + 1))).unwrap();
        (w, g)
    }

    #[test]
    fn hop_counts_in_range_and_reference_consistent() {
        let (w, g) = chain_world();
        let eps = make_episodes(&w, &g, 4, 30).unwrap();
        assert_eq!(eps.len(), 30);
        for e in &eps {
            assert!((MIN_HOPS..=MAX_HOPS).contains(&e.hops()));
            assert_eq!(e.goal, g.node(*e.reference_path.last().unwrap()).unwrap());
            let first = g.node(e.reference_path[0]).unwrap();
            assert!(e.start.planar().dist(&first.planar()) < 1e-6);
            assert!(e.reference_length > 0.0 && e.reference_length >= e.reference_euclidean - 1e-9);
            assert_eq!(e.start.heading % 30.0, 0.0);
        }
    }

    #[test]
    fn same_seed_same_file() {
        let (w, g) = chain_world();
        let a = save_episodes(&make_episodes(&w, &g, 9, 12).unwrap()).unwrap();
        let b = save_episodes(&make_episodes(&w, &g, 9, 12).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(save_episodes(&load_episodes(&a).unwrap()).unwrap(), a);
    }

    #[test]
    fn small_graph_is_rejected() {
        let w = GridWorld::open("tiny", 0.05, 100, 40);
        let g = NavGraph::new(vec![Point3::new(0.5, 1.0, 0.0), Point3::new(2.5, 1.0, 0.0)], [(0, 1)]).unwrap();
        assert!(matches!(make_episodes(&w, &g, 0, 3), Err(Error::Infeasible(_))));
    }
}
