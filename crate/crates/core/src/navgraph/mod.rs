//! Topological nav-graphs: construction over a world, egocentric neighbor
//! candidates, node-path search and geodesic relocalization.

mod build;
mod io;

pub use build::{build_graph, GraphBuildConfig, DEFAULT_EDGE_LENGTH};
pub use io::{load_graph, save_graph};

use crate::error::{Error, Result};
use crate::geometry::{bearing_deg, wrap_deg, Point2, Point3};
use crate::subgoal::SubgoalCandidate;
use crate::world::{GridWorld, Pose};
use std::collections::BTreeMap;

/// Undirected graph of navigable viewpoints. Node ids are `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct NavGraph {
    nodes: Vec<Point3>,
    /// Sorted `(min, max)` pairs without duplicates.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub mean_edge_length: f64,
    /// degree -> node count
    pub degree_histogram: BTreeMap<usize, usize>,
}

impl NavGraph {
    pub fn new(nodes: Vec<Point3>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = nodes.len();
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= n {
                return Err(Error::UnknownNode(a));
            }
            if b >= n {
                return Err(Error::UnknownNode(b));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on node {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self {
            nodes,
            edges: list,
            adjacency,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point3] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node(&self, id: usize) -> Result<Point3> {
        self.nodes.get(id).copied().ok_or(Error::UnknownNode(id))
    }

    /// Neighbor ids in ascending order.
    pub fn adjacent(&self, id: usize) -> Result<&[usize]> {
        self.adjacency.get(id).map(Vec::as_slice).ok_or(Error::UnknownNode(id))
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        self.nodes[a].dist(&self.nodes[b])
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn stats(&self) -> GraphStats {
        let total: f64 = self.edges.iter().map(|&(a, b)| self.edge_length(a, b)).sum();
        let mut degree_histogram = BTreeMap::new();
        for adj in &self.adjacency {
            *degree_histogram.entry(adj.len()).or_insert(0) += 1;
        }
        GraphStats {
            nodes: self.len(),
            edges: self.edges.len(),
            mean_edge_length: if self.edges.is_empty() {
                0.0
            } else {
                total / self.edges.len() as f64
            },
            degree_histogram,
        }
    }
}

/// One candidate per graph neighbor of `node`, measured from the agent's
/// actual pose: planar range, bearing relative to the agent's heading and
/// elevation angle. Candidates come in ascending neighbor id.
pub fn neighbors(graph: &NavGraph, node: usize, pose: &Pose) -> Result<Vec<SubgoalCandidate>> {
    let adj = graph.adjacent(node)?;
    let mass = if adj.is_empty() { 0.0 } else { 1.0 / adj.len() as f64 };
    Ok(adj
        .iter()
        .map(|&n| {
            let p = graph.nodes[n];
            let mut c = egocentric(pose, p, mass);
            c.node = Some(n);
            c
        })
        .collect())
}

/// Candidate for the absolute point `p` as seen from `pose`.
pub fn egocentric(pose: &Pose, p: Point3, mass: f64) -> SubgoalCandidate {
    let here = pose.planar();
    let r = here.dist(&p.planar());
    let theta = if r > 0.0 {
        wrap_deg(bearing_deg(here, p.planar()) - pose.heading)
    } else {
        0.0
    };
    let phi = (p.z - pose.z).atan2(r).to_degrees();
    let mut c = SubgoalCandidate::new(r, theta, phi, mass);
    c.target = Some(p);
    c
}

/// Node nearest to `point` by geodesic distance; ties (within 1e-9) go to
/// the smallest id.
pub fn localize(graph: &NavGraph, world: &GridWorld, point: Point2) -> Result<usize> {
    let source = world
        .cell_at(point)
        .filter(|&c| world.is_free(c))
        .ok_or(Error::NotNavigable { x: point.x, y: point.y })?;
    let origin = Point3::new(point.x, point.y, world.cell_elevation(source));
    let mut limit = 4.0;
    loop {
        let dist = world.dijkstra(source, None, limit);
        let mut best: Option<(f64, usize)> = None;
        for (id, node) in graph.nodes.iter().enumerate() {
            let Some(c) = world.cell_at(node.planar()) else {
                continue;
            };
            let straight = origin.dist(&Point3::new(node.x, node.y, world.cell_elevation(c)));
            let d = if c == source || world.line_of_sight(point, node.planar()) {
                straight
            } else if dist[c].is_finite() {
                dist[c].max(straight)
            } else {
                continue;
            };
            // distances within 1e-9 count as ties
            if best.is_none_or(|(bd, _)| d < bd - 1e-9) {
                best = Some((d, id));
            }
        }
        // every cell within `limit` is settled and unseen nodes without a
        // clear line lie beyond it, so a hit inside it is exact
        match best {
            Some((d, id)) if d <= limit => return Ok(id),
            _ if !limit.is_finite() => return best.map(|(_, id)| id).ok_or(Error::Unreachable),
            _ => limit = if limit < 32.0 { limit * 4.0 } else { f64::INFINITY },
        }
    }
}

/// Minimal total edge length node sequence from `a` to `b`. Equal lengths
/// (within 1e-9) are resolved by the lexicographically smaller sequence.
pub fn shortest_path(graph: &NavGraph, a: usize, b: usize) -> Result<Vec<usize>> {
    graph.node(b)?;
    shortest_paths_from(graph, a)?
        .swap_remove(b)
        .map(|(_, p)| p)
        .ok_or(Error::Unreachable)
}

/// Shortest paths from `a` to every node, with the same tie rule as
/// [`shortest_path`]. Unreachable nodes are `None`.
pub fn shortest_paths_from(graph: &NavGraph, a: usize) -> Result<Vec<Option<(f64, Vec<usize>)>>> {
    graph.node(a)?;
    const TIE: f64 = 1e-9;
    let n = graph.len();
    let mut best: Vec<Option<(f64, Vec<usize>)>> = vec![None; n];
    let mut done = vec![false; n];
    best[a] = Some((0.0, vec![a]));
    loop {
        // graphs are small; a linear scan keeps the tie rule explicit
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            let Some((dv, pv)) = &best[v] else { continue };
            let better = match pick {
                None => true,
                Some(u) => {
                    let (du, pu) = best[u].as_ref().unwrap();
                    *dv < du - TIE || ((dv - du).abs() <= TIE && pv < pu)
                }
            };
            if better {
                pick = Some(v);
            }
        }
        let Some(u) = pick else { break };
        done[u] = true;
        let (du, pu) = best[u].clone().unwrap();
        for &w in &graph.adjacency[u] {
            if done[w] {
                continue;
            }
            let nd = du + graph.edge_length(u, w);
            let mut np = pu.clone();
            np.push(w);
            let replace = match &best[w] {
                None => true,
                Some((dw, pw)) => nd < dw - TIE || ((nd - dw).abs() <= TIE && np < *pw),
            };
            if replace {
                best[w] = Some((nd, np));
            }
        }
    }
    Ok(best)
}

/// Total edge length of a node sequence.
pub fn path_length(graph: &NavGraph, path: &[usize]) -> f64 {
    path.windows(2).map(|w| graph.edge_length(w[0], w[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> NavGraph {
        NavGraph::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.1, 0.0),
                Point3::new(2.0, 0.0, 0.0),
            ],
            [(0, 1), (1, 2), (0, 2)],
        )
        .unwrap()
    }

    #[test]
    fn trivial_path() {
        assert_eq!(shortest_path(&triangle(), 1, 1).unwrap(), vec![1]);
    }

    #[test]
    fn direct_edge_beats_detour() {
        assert_eq!(shortest_path(&triangle(), 0, 2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn long_edge_loses_to_two_hops() {
        let g = NavGraph::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(2.0, 0.0, 0.0),
                Point3::new(1.0, 5.0, 0.0),
            ],
            [(0, 1), (1, 2), (0, 3), (3, 2)],
        )
        .unwrap();
        assert_eq!(shortest_path(&g, 0, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn equal_length_paths_tie_lexicographically() {
        let g = NavGraph::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 1.0, 0.0),
                Point3::new(1.0, -1.0, 0.0),
                Point3::new(2.0, 0.0, 0.0),
            ],
            [(0, 2), (2, 3), (0, 1), (1, 3)],
        )
        .unwrap();
        assert_eq!(shortest_path(&g, 0, 3).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn neighbor_geometry() {
        let g = NavGraph::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(2.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 1.0),
            ],
            [(0, 1), (0, 2)],
        )
        .unwrap();
        let pose = Pose {
            x: 0.0,
            y: 0.0,
            heading: 0.0,
            z: 0.0,
        };
        let c = neighbors(&g, 0, &pose).unwrap();
        assert_eq!(c.len(), 2);
        assert!((c[0].r - 2.0).abs() < 1e-12 && c[0].theta == 0.0 && c[0].phi == 0.0);
        assert!((c[1].theta - 90.0).abs() < 1e-9);
        assert!((c[1].phi - 45.0).abs() < 1e-9);
        assert_eq!(c[1].node, Some(2));
    }

    #[test]
    fn unknown_node_errors() {
        let pose = Pose {
            x: 0.0,
            y: 0.0,
            heading: 0.0,
            z: 0.0,
        };
        assert!(matches!(neighbors(&triangle(), 9, &pose), Err(Error::UnknownNode(9))));
    }

    #[test]
    fn localize_prefers_geodesic_over_euclid() {
        // node 0 is 0.3 m away through a wall, node 1 is 1.0 m away in the open
        let w = GridWorld::from_ascii(
            "walled",
            0.1,
            &[
                "..............",
                "..............",
                "..............",
                "#######.......",
                "..............",
                "..............",
            ],
        )
        .unwrap();
        let g = NavGraph::new(
            vec![Point3::new(0.25, 0.45, 0.0), Point3::new(1.25, 0.15, 0.0)],
            [(0, 1)],
        )
        .unwrap();
        assert_eq!(localize(&g, &w, Point2::new(0.25, 0.15)).unwrap(), 1);
        assert_eq!(localize(&g, &w, Point2::new(0.25, 0.45)).unwrap(), 0);
    }

    #[test]
    fn localize_ties_to_smallest_id() {
        let w = GridWorld::open("open", 0.1, 30, 10);
        let g = NavGraph::new(
            vec![
                Point3::new(0.55, 0.55, 0.0),
                Point3::new(2.55, 0.55, 0.0),
                Point3::new(0.55, 0.55 + 0.0, 0.0),
            ],
            [(0, 1), (1, 2)],
        )
        .unwrap();
        assert_eq!(localize(&g, &w, Point2::new(1.55, 0.55)).unwrap(), 0);
    }

    #[test]
    fn stats_mean_edge() {
        let s = triangle().stats();
        assert_eq!(s.edges, 3);
        let expect = (1.0f64.hypot(0.1) * 2.0 + 2.0) / 3.0;
        assert!((s.mean_edge_length - expect).abs() < 1e-12);
        assert_eq!(s.degree_histogram.get(&2), Some(&3));
    }
}
