//! Independent reference implementations and fixtures shared by the
//! integration tests.
#![allow(dead_code)]

use navtransfer::eval::{make_episodes, Episode};
use navtransfer::geometry::{Point2, Point3};
use navtransfer::navgraph::{build_graph, GraphBuildConfig, NavGraph};
use navtransfer::planners::heading_slot;
use navtransfer::world::{generate_scene, Action, GridWorld, Pose, SceneSpec, POSITION_QUANTUM};
use rand::Rng;
use std::collections::{HashMap, HashSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bfs {
    Found(usize),
    /// Search space exhausted without reaching the goal.
    NoPlan,
    /// Gave up after visiting `state_cap` poses.
    Inconclusive,
}

/// Fewest actions from `start` to any pose within `r` (3-D) of the target
/// with line of sight to it, by breadth-first search over exact poses. Plans
/// longer than `max_depth` are not explored.
pub fn bfs_action_count(world: &GridWorld, start: Pose, target: Point2, r: f64, max_depth: usize, state_cap: usize) -> Bfs {
    let Some(z) = world.elevation_at(target) else {
        return Bfs::NoPlan;
    };
    let goal = Point3::new(target.x, target.y, z);
    let key = |p: &Pose| {
        (
            (p.x / POSITION_QUANTUM).round() as i64,
            (p.y / POSITION_QUANTUM).round() as i64,
            heading_slot(p.heading),
        )
    };
    let mut seen = HashSet::from([key(&start)]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((p, d)) = queue.pop_front() {
        if p.position().dist(&goal) <= r && world.line_of_sight(p.planar(), target) {
            return Bfs::Found(d);
        }
        if d == max_depth {
            continue;
        }
        for a in [Action::Forward, Action::TurnLeft, Action::TurnRight] {
            let (n, collided) = world.step_action(&p, a);
            if !collided && seen.insert(key(&n)) {
                if seen.len() > state_cap {
                    return Bfs::Inconclusive;
                }
                queue.push_back((n, d + 1));
            }
        }
    }
    Bfs::NoPlan
}

/// Minimum-cost perfect assignment on an n×n row-major cost matrix
/// (Hungarian method with potentials).
pub fn hungarian(n: usize, cost: &[f64]) -> f64 {
    let inf = f64::INFINITY;
    let (mut u, mut v) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let (mut p, mut way) = (vec![0usize; n + 1], vec![0usize; n + 1]);
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let (mut delta, mut j1) = (inf, 0);
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        while j0 != 0 {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        }
    }
    (1..=n).map(|j| cost[(p[j] - 1) * n + j - 1]).sum()
}

/// Exact 8-connected shortest distances by Floyd-Warshall over free cells.
/// Diagonals need both side cells free. Rows run top to bottom, so cell
/// `(i, j)` is character `i` of row `height - 1 - j`.
pub fn floyd_8(rows: &[String], h: f64) -> (Vec<usize>, Vec<Vec<f64>>) {
    let height = rows.len();
    let width = rows[0].len();
    let free = |i: i64, j: i64| {
        i >= 0 && j >= 0 && (i as usize) < width && (j as usize) < height && rows[height - 1 - j as usize].as_bytes()[i as usize] != b'#'
    };
    let mut cells = Vec::new();
    let mut id = HashMap::new();
    for j in 0..height as i64 {
        for i in 0..width as i64 {
            if free(i, j) {
                id.insert((i, j), cells.len());
                cells.push((j as usize) * width + i as usize);
            }
        }
    }
    let n = cells.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (&(i, j), &a) in &id {
        d[a][a] = 0.0;
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)] {
            if !free(i + di, j + dj) {
                continue;
            }
            let diagonal = di != 0 && dj != 0;
            if diagonal && !(free(i + di, j) && free(i, j + dj)) {
                continue;
            }
            let b = id[&(i + di, j + dj)];
            d[a][b] = if diagonal { h * std::f64::consts::SQRT_2 } else { h };
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                let via = d[a][k] + d[k][b];
                if via < d[a][b] {
                    d[a][b] = via;
                }
            }
        }
    }
    (cells, d)
}

/// Single-source 8-connected shortest distances on an ASCII grid, by a
/// plain O(n^2) Dijkstra. Same conventions as [`floyd_8`].
pub fn dijkstra_8(rows: &[String], h: f64, source: usize) -> Vec<f64> {
    let height = rows.len();
    let width = rows[0].len();
    let free = |i: i64, j: i64| {
        i >= 0 && j >= 0 && (i as usize) < width && (j as usize) < height && rows[height - 1 - j as usize].as_bytes()[i as usize] != b'#'
    };
    let n = width * height;
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    loop {
        let Some(a) = (0..n).filter(|&c| !done[c] && dist[c].is_finite()).min_by(|&x, &y| dist[x].total_cmp(&dist[y])) else {
            break;
        };
        done[a] = true;
        let (i, j) = ((a % width) as i64, (a / width) as i64);
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)] {
            if !free(i + di, j + dj) {
                continue;
            }
            let diagonal = di != 0 && dj != 0;
            if diagonal && !(free(i + di, j) && free(i, j + dj)) {
                continue;
            }
            let b = ((j + dj) as usize) * width + (i + di) as usize;
            let w = if diagonal { h * std::f64::consts::SQRT_2 } else { h };
            if dist[a] + w < dist[b] {
                dist[b] = dist[a] + w;
            }
        }
    }
    dist
}

pub fn random_rows(rng: &mut impl Rng, width: usize, height: usize, blocked: f64) -> Vec<String> {
    (0..height)
        .map(|_| (0..width).map(|_| if rng.gen_bool(blocked) { '#' } else { '.' }).collect())
        .collect()
}

/// A free cell center in the world's largest component, at a random
/// heading on the turn lattice.
pub fn random_pose(world: &GridWorld, rng: &mut impl Rng) -> Pose {
    let comps = world.components();
    let mut size: HashMap<u32, usize> = HashMap::new();
    for &c in comps.iter().filter(|&&c| c != u32::MAX) {
        *size.entry(c).or_default() += 1;
    }
    let big = size.iter().max_by_key(|(k, v)| (**v, std::cmp::Reverse(**k))).map(|(k, _)| *k).unwrap();
    loop {
        let c = rng.gen_range(0..world.len());
        if world.is_free(c) && comps[c] == big {
            let p = world.cell_center(c);
            return world.pose(p.x, p.y, 15.0 * rng.gen_range(0..24) as f64).unwrap();
        }
    }
}

pub struct SceneSet {
    pub world: GridWorld,
    pub graph: NavGraph,
    pub episodes: Vec<Episode>,
}

/// One scene per seed with its graph and `per_scene` episodes; episode ids
/// are unique across the returned sets.
pub fn scene_sets(seeds: std::ops::Range<u64>, clutter: usize, stairs: usize, per_scene: usize) -> Vec<SceneSet> {
    let mut next_id = 0;
    seeds
        .map(|seed| {
            let world = generate_scene(&SceneSpec {
                seed,
                clutter,
                stairs,
                ..SceneSpec::default()
            })
            .unwrap();
            let graph = build_graph(&world, seed, &GraphBuildConfig::default()).unwrap();
            let mut episodes = make_episodes(&world, &graph, seed, per_scene).unwrap();
            for e in &mut episodes {
                e.id += next_id;
            }
            next_id += episodes.len();
            SceneSet { world, graph, episodes }
        })
        .collect()
}
