use super::NavGraph;
use crate::error::{Error, Result};
use crate::geometry::{MinItem, Point2, Point3};
use crate::world::GridWorld;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BinaryHeap, HashMap};

pub const DEFAULT_EDGE_LENGTH: f64 = 2.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphBuildConfig {
    pub target_edge_length: f64,
    /// Minimum distance from a node to the nearest blocked cell.
    pub clearance: f64,
    /// Candidate edges are considered up to this multiple of the target.
    pub max_edge_factor: f64,
}

impl Default for GraphBuildConfig {
    fn default() -> Self {
        Self {
            target_edge_length: DEFAULT_EDGE_LENGTH,
            clearance: 0.3,
            max_edge_factor: 1.5,
        }
    }
}

/// Builds a connected viewpoint graph over the largest navigable component.
///
/// Nodes are Poisson-disc samples at cell centers with wall clearance. Edges
/// join pairs whose straight segment is traversable, thinned to the relative
/// neighborhood graph. Leftover components are bridged by their geodesically
/// closest node pair. Several disc radii are tried and the one whose mean
/// edge length is nearest the target wins.
pub fn build_graph(world: &GridWorld, seed: u64, cfg: &GraphBuildConfig) -> Result<NavGraph> {
    if !(cfg.target_edge_length > 0.0 && cfg.clearance >= 0.0 && cfg.max_edge_factor >= 1.0) {
        return Err(Error::InvalidParameter("graph build parameters out of range".into()));
    }
    let eligible = eligible_cells(world, cfg.clearance);
    let mut best: Option<(f64, NavGraph)> = None;
    for k in 0..9 {
        let radius = cfg.target_edge_length * (0.55 + 0.075 * k as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = poisson_disc(world, &eligible, radius, &mut rng);
        if nodes.len() < 2 {
            continue;
        }
        let graph = connect(world, nodes, cfg.target_edge_length * cfg.max_edge_factor)?;
        let err = (graph.stats().mean_edge_length - cfg.target_edge_length).abs();
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, graph));
        }
    }
    best.map(|(_, g)| g)
        .ok_or_else(|| Error::Infeasible("world too small to place two graph nodes".into()))
}

/// Free cells of the largest component whose distance to any blocked or
/// out-of-bounds cell is at least `clearance`, in index order.
fn eligible_cells(world: &GridWorld, clearance: f64) -> Vec<usize> {
    let labels = world.components();
    let mut sizes: HashMap<u32, usize> = HashMap::new();
    for (c, &l) in labels.iter().enumerate() {
        if world.is_free(c) {
            *sizes.entry(l).or_insert(0) += 1;
        }
    }
    let Some(main) = sizes
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&l, _)| l)
    else {
        return Vec::new();
    };
    let clear = clearance_field(world);
    (0..world.len())
        .filter(|&c| world.is_free(c) && labels[c] == main && clear[c] >= clearance)
        .collect()
}

/// Chamfer distance from each cell center to the nearest blocked cell
/// center, with the grid border counting as blocked.
fn clearance_field(world: &GridWorld) -> Vec<f64> {
    let h = world.resolution();
    let (w, ht) = (world.width() as i64, world.height() as i64);
    let mut dist = vec![f64::INFINITY; world.len()];
    let mut heap = BinaryHeap::new();
    for c in 0..world.len() {
        let (i, j) = world.coords(c);
        let (i, j) = (i as i64, j as i64);
        let seed = if !world.is_free(c) {
            Some(0.0)
        } else {
            let edge = i.min(j).min(w - 1 - i).min(ht - 1 - j);
            (edge == 0).then_some(h)
        };
        if let Some(d) = seed {
            dist[c] = d;
            heap.push(MinItem { key: d, id: c });
        }
    }
    while let Some(MinItem { key, id }) = heap.pop() {
        if key > dist[id] {
            continue;
        }
        let (i, j) = world.coords(id);
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                let Some(n) = world.checked_index(i as i64 + di, j as i64 + dj) else {
                    continue;
                };
                let step = if di != 0 && dj != 0 { h * std::f64::consts::SQRT_2 } else { h };
                if key + step < dist[n] {
                    dist[n] = key + step;
                    heap.push(MinItem { key: key + step, id: n });
                }
            }
        }
    }
    dist
}

fn poisson_disc(world: &GridWorld, eligible: &[usize], radius: f64, rng: &mut ChaCha8Rng) -> Vec<Point3> {
    let mut order = eligible.to_vec();
    order.shuffle(rng);
    let bucket = |p: Point2| ((p.x / radius).floor() as i64, (p.y / radius).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<Point2>> = HashMap::new();
    let mut nodes = Vec::new();
    for c in order {
        let p = world.cell_center(c);
        let (bx, by) = bucket(p);
        let crowded = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                grid.get(&(bx + dx, by + dy))
                    .is_some_and(|v| v.iter().any(|q| q.dist(&p) < radius))
            })
        });
        if !crowded {
            grid.entry((bx, by)).or_default().push(p);
            // snapped to the file precision so a saved graph reloads equal
            let q = world.cell_point(c);
            let snap = |v: f64| (v * 1e6).round() / 1e6;
            nodes.push(Point3::new(snap(q.x), snap(q.y), snap(q.z)));
        }
    }
    // id order follows space, not sampling order
    nodes.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    nodes
}

fn connect(world: &GridWorld, nodes: Vec<Point3>, max_len: f64) -> Result<NavGraph> {
    let n = nodes.len();
    let mut cand: HashMap<(usize, usize), f64> = HashMap::new();
    let mut near: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            let d = nodes[a].dist(&nodes[b]);
            if d <= max_len && world.sweep(nodes[a].planar(), nodes[b].planar()).is_some() {
                cand.insert((a, b), d);
                near[a].push(b);
                near[b].push(a);
            }
        }
    }
    let len = |a: usize, b: usize| cand.get(&(a.min(b), a.max(b))).copied();
    let mut edges: Vec<(usize, usize)> = cand
        .iter()
        .filter(|&(&(a, b), &d)| {
            !near[a]
                .iter()
                .any(|&c| c != b && len(c, b).is_some_and(|cb| cb.max(len(a, c).unwrap()) < d))
        })
        .map(|(&e, _)| e)
        .collect();
    edges.sort_unstable();

    // bridge remaining components through their geodesically closest pair
    loop {
        let comp = components(n, &edges);
        let count = comp.iter().max().map_or(0, |m| m + 1);
        if count <= 1 {
            break;
        }
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let small = (0..count).min_by_key(|&c| (sizes[c], c)).unwrap();
        let mut bridge: Option<(f64, usize, usize)> = None;
        for a in (0..n).filter(|&a| comp[a] == small) {
            let field = world.distance_field(nodes[a].planar())?;
            for b in (0..n).filter(|&b| comp[b] != small) {
                if let Some(d) = field.to(world, nodes[b].planar()) {
                    if bridge.is_none_or(|(bd, _, _)| d < bd) {
                        bridge = Some((d, a, b));
                    }
                }
            }
        }
        let (_, a, b) = bridge.ok_or(Error::Unreachable)?;
        edges.push((a.min(b), a.max(b)));
    }
    NavGraph::new(nodes, edges)
}

fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}
