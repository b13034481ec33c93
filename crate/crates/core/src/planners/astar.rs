//! A* over the heading lattice with exact-pose states; the transition model
//! is the world's own `step_action`.

use crate::error::{Error, Result};
use crate::geometry::{MinItem, Point2, Point3};
use std::f64::consts::SQRT_2;
use crate::world::{Action, GridWorld, Pose, FORWARD_STEP, POSITION_QUANTUM, TURN_INCREMENT};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

pub const DEFAULT_STOP_RADIUS: f64 = 0.15;
pub const HEADING_SLOTS: usize = 24;
/// Expansion budget of the exact search.
pub const EXACT_EXPANSIONS: usize = 100_000;
/// Expansion budget of the merged-state search.
pub const MAX_EXPANSIONS: usize = 2_000_000;


/// Search state: the agent's cell, heading slot and exact position. Two
/// poses are the same state when they agree to [`POSITION_QUANTUM`], so the
/// successor set of a state is well defined. The merged search zeroes the
/// position fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeState {
    pub cell: usize,
    pub slot: u8,
    pub qx: i64,
    pub qy: i64,
}

impl LatticeState {
    pub fn of(world: &GridWorld, pose: &Pose) -> Option<Self> {
        let cell = world.cell_at(pose.planar())?;
        Some(Self {
            cell,
            slot: heading_slot(pose.heading),
            qx: (pose.x / POSITION_QUANTUM).round() as i64,
            qy: (pose.y / POSITION_QUANTUM).round() as i64,
        })
    }
}

pub fn heading_slot(heading: f64) -> u8 {
    ((heading / TURN_INCREMENT).round() as i64).rem_euclid(HEADING_SLOTS as i64) as u8
}

/// Admissible: every action moves the agent at most one forward step.
pub fn heuristic(p: Point2, target: Point2, stop_radius: f64) -> u32 {
    let d = (p.dist(&target) - stop_radius).max(0.0);
    (d / FORWARD_STEP - 1e-9).ceil().max(0.0) as u32
}

pub const EXPANSION_ORDER: [Action; 3] = [Action::Forward, Action::TurnLeft, Action::TurnRight];

struct Node {
    pose: Pose,
    g: u32,
    parent: Option<(usize, Action)>,
}

#[derive(PartialEq, Eq)]
struct OpenItem {
    f: u32,
    seq: u64,
    node: usize,
}

impl Ord for OpenItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.cmp(&self.f).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for OpenItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest FORWARD/TURN sequence after which the target is in sight and
/// within `stop_radius` in 3-D (against the target's floor elevation).
/// Among shortest plans the one ending nearest the target wins, then the
/// first found: ties on `f` pop in generation order and successors are
/// generated FORWARD, LEFT, RIGHT.
///
/// The search first keys states by exact pose, which is optimal. If that
/// exceeds [`EXACT_EXPANSIONS`], it reruns with states merged per
/// `(cell, heading slot)`: plans stay executable and collision-free but may
/// be a few actions longer than optimal.
pub fn astar_plan(world: &GridWorld, start: &Pose, target: Point2, stop_radius: f64) -> Result<Vec<Action>> {
    let target_cell = world
        .cell_at(target)
        .filter(|&c| world.is_free(c))
        .ok_or(Error::NotNavigable {
            x: target.x,
            y: target.y,
        })?;
    let start_cell = world
        .cell_at(start.planar())
        .filter(|&c| world.is_free(c))
        .ok_or(Error::NotNavigable {
            x: start.x,
            y: start.y,
        })?;
    let goal = Point3::new(target.x, target.y, world.cell_elevation(target_cell));
    let search = Search {
        world,
        target,
        stop_radius,
        goal,
        bound: GeodesicBound::new(world, target_cell, start_cell),
    };
    if search.arrived(start) {
        return Ok(Vec::new());
    }
    // arrival needs a clear line to the target, so it shares our component
    if !world.connected_cells(start_cell, target_cell) {
        return Err(Error::Unreachable);
    }
    match search.run(start, false, EXACT_EXPANSIONS) {
        Outcome::Found(plan) => Ok(plan),
        Outcome::Exhausted => Err(Error::Unreachable),
        Outcome::OverBudget => match search.run(start, true, MAX_EXPANSIONS) {
            Outcome::Found(plan) => Ok(plan),
            _ => Err(Error::Unreachable),
        },
    }
}

enum Outcome {
    Found(Vec<Action>),
    Exhausted,
    OverBudget,
}

struct Search<'a> {
    world: &'a GridWorld,
    target: Point2,
    stop_radius: f64,
    goal: Point3,
    bound: GeodesicBound,
}

impl Search<'_> {
    fn arrived(&self, p: &Pose) -> bool {
        p.position().dist(&self.goal) <= self.stop_radius && self.world.line_of_sight(p.planar(), self.target)
    }

    fn h(&self, p: &Pose, cell: usize) -> u32 {
        heuristic(p.planar(), self.target, self.stop_radius).max(self.bound.actions(cell, self.stop_radius))
    }

    fn key(&self, p: &Pose, merged: bool) -> Option<LatticeState> {
        let mut k = LatticeState::of(self.world, p)?;
        if merged {
            k.qx = 0;
            k.qy = 0;
        }
        Some(k)
    }

    fn run(&self, start: &Pose, merged: bool, budget: usize) -> Outcome {
        let world = self.world;
        let Some(start_key) = self.key(start, merged) else {
            return Outcome::Exhausted;
        };
        let mut nodes = vec![Node {
            pose: *start,
            g: 0,
            parent: None,
        }];
        let mut best: HashMap<LatticeState, usize> = HashMap::new();
        best.insert(start_key, 0);
        let mut closed = vec![false];
        let mut open = BinaryHeap::new();
        let mut seq = 0u64;
        open.push(OpenItem {
            f: self.h(start, start_key.cell),
            seq,
            node: 0,
        });
        let mut expansions = 0usize;
        // best arrival so far: (plan length, 3-D miss distance, node)
        let mut found: Option<(u32, f64, usize)> = None;

        while let Some(OpenItem { f, node, .. }) = open.pop() {
            if closed[node] {
                continue;
            }
            if let Some((len, _, _)) = found {
                if f > len {
                    break;
                }
            }
            closed[node] = true;
            let Node { pose, g, .. } = nodes[node];
            if self.arrived(&pose) {
                let miss = pose.position().dist(&self.goal);
                if found.is_none_or(|(_, m, _)| miss < m) {
                    found = Some((g, miss, node));
                }
                continue;
            }
            expansions += 1;
            if expansions > budget {
                break;
            }
            if found.is_some_and(|(len, _, _)| g >= len) {
                continue;
            }
            for action in EXPANSION_ORDER {
                let (next, collided) = world.step_action(&pose, action);
                if collided {
                    continue;
                }
                let Some(key) = self.key(&next, merged) else {
                    continue;
                };
                let ng = g + 1;
                if let Some(&existing) = best.get(&key) {
                    if closed[existing] || nodes[existing].g <= ng {
                        continue;
                    }
                    // superseded entry stays in the heap and is skipped on pop
                    closed[existing] = true;
                }
                let id = nodes.len();
                nodes.push(Node {
                    pose: next,
                    g: ng,
                    parent: Some((node, action)),
                });
                closed.push(false);
                best.insert(key, id);
                seq += 1;
                open.push(OpenItem {
                    f: ng + self.h(&next, key.cell),
                    seq,
                    node: id,
                });
            }
        }
        match found {
            Some((_, _, node)) => Outcome::Found(unwind(&nodes, node)),
            None if expansions > budget => Outcome::OverBudget,
            None => Outcome::Exhausted,
        }
    }
}

/// Lower bound on the planar path length from any point of a cell to the
/// target point, from a relaxed 8-connected search: a diagonal move needs
/// only one open corner. The cell-path length can exceed a continuous path
/// by the octile factor plus a constant of a few cells, which is divided
/// out and subtracted.
struct GeodesicBound {
    dist: Vec<f64>,
    slack: f64,
}

const OCTILE_FACTOR: f64 = 1.082_392_200_292_394; // 1 / cos(22.5 deg)

impl GeodesicBound {
    fn new(world: &GridWorld, target_cell: usize, start_cell: usize) -> Self {
        let h = world.resolution();
        let mut dist = vec![f64::INFINITY; world.len()];
        let mut heap = BinaryHeap::new();
        dist[target_cell] = 0.0;
        heap.push(MinItem { key: 0.0, id: target_cell });
        let mut settled = vec![false; world.len()];
        let mut limit = f64::INFINITY;
        while let Some(MinItem { key, id }) = heap.pop() {
            if key > dist[id] {
                continue;
            }
            if key > limit {
                break;
            }
            settled[id] = true;
            if id == start_cell {
                limit = key * 1.5 + 2.0;
            }
            let (i, j) = world.coords(id);
            let (i, j) = (i as i64, j as i64);
            for (di, dj) in NEIGHBORS_8 {
                let Some(n) = world.checked_index(i + di, j + dj) else {
                    continue;
                };
                let ok = if di != 0 && dj != 0 {
                    let via = |c: Option<usize>| c.is_some_and(|c| world.step_ok(id, c) && world.step_ok(c, n));
                    via(world.checked_index(i + di, j)) || via(world.checked_index(i, j + dj))
                } else {
                    world.step_ok(id, n)
                };
                if !ok {
                    continue;
                }
                let nd = key + if di != 0 && dj != 0 { h * SQRT_2 } else { h };
                if nd < dist[n] {
                    dist[n] = nd;
                    heap.push(MinItem { key: nd, id: n });
                }
            }
        }
        // tentative values are upper bounds, not lower ones
        for (d, &done) in dist.iter_mut().zip(&settled) {
            if !done {
                *d = f64::INFINITY;
            }
        }
        Self { dist, slack: 3.0 * h }
    }

    fn actions(&self, cell: usize, stop_radius: f64) -> u32 {
        let d = self.dist[cell];
        if !d.is_finite() {
            return 0;
        }
        let lb = ((d - self.slack) / OCTILE_FACTOR - stop_radius).max(0.0);
        (lb / FORWARD_STEP - 1e-9).ceil().max(0.0) as u32
    }
}

const NEIGHBORS_8: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];

fn unwind(nodes: &[Node], mut node: usize) -> Vec<Action> {
    let mut plan = Vec::new();
    while let Some((parent, action)) = nodes[node].parent {
        plan.push(action);
        node = parent;
    }
    plan.reverse();
    plan
}
