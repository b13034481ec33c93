//! Sensing-only navigation: fuse range scans into a fresh occupancy map,
//! march a time field from the target and decode actions greedily.

use super::{project_target, NavOutcome};
use crate::error::{Error, Result};
use crate::geometry::{bearing_deg, signed_deg, Point2};
use crate::planners::{extract_waypoint, fmm_field_until, CellState, OccupancyGrid, DEFAULT_STOP_RADIUS};
use crate::world::{cast_ray, ray, Action, GridWorld, Pose, FORWARD_STEP, SCAN_HEIGHT, TURN_INCREMENT};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalPolicyConfig {
    /// Action budget per call.
    pub budget: usize,
    pub stop_radius: f64,
    /// Side of the square map centered on the start pose, meters.
    pub map_extent: f64,
    /// Arc length along the descent path to the next waypoint.
    pub waypoint_stride: f64,
    /// Rays per scan, evenly spaced over the full circle.
    pub rays: usize,
    pub sensor_range: f64,
    /// Occupied cells are grown by this radius for planning only.
    pub inflation: f64,
}

impl Default for LocalPolicyConfig {
    fn default() -> Self {
        Self {
            budget: 40,
            stop_radius: DEFAULT_STOP_RADIUS,
            map_extent: 16.0,
            waypoint_stride: 0.25,
            rays: 180,
            sensor_range: 6.0,
            inflation: 0.1,
        }
    }
}

impl LocalPolicyConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.budget > 0
            && self.stop_radius > 0.0
            && self.map_extent > 0.0
            && self.waypoint_stride > 0.0
            && self.rays > 0
            && self.sensor_range > 0.0
            && self.inflation >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("local policy parameters must be positive".into()))
        }
    }
}

/// Map aligned with the world grid so cells correspond one to one.
struct LocalMap {
    grid: OccupancyGrid,
    /// World cell coordinates of local cell `(0, 0)`.
    offset: (i64, i64),
}

impl LocalMap {
    fn new(world: &GridWorld, center: Point2, extent: f64) -> Self {
        let h = world.resolution();
        let n = (extent / h).ceil().max(1.0) as usize;
        let oi = (center.x / h).floor() as i64 - (n / 2) as i64;
        let oj = (center.y / h).floor() as i64 - (n / 2) as i64;
        let origin = Point2::new(oi as f64 * h, oj as f64 * h);
        Self {
            grid: OccupancyGrid::new(h, n, n, origin),
            offset: (oi, oj),
        }
    }

    fn local(&self, cell: (i64, i64)) -> Option<usize> {
        self.grid.checked_index(cell.0 - self.offset.0, cell.1 - self.offset.1)
    }

    fn local_of(&self, world: &GridWorld, idx: usize) -> Option<usize> {
        let (i, j) = world.coords(idx);
        self.local((i as i64, j as i64))
    }

    /// Fuses one scan. Within a scan an occupied mark wins over a free one;
    /// occupied marks persist across scans.
    fn fuse(&mut self, world: &GridWorld, pose: &Pose, cfg: &LocalPolicyConfig) {
        let scan_z = pose.z + SCAN_HEIGHT;
        let mut hits = Vec::new();
        for k in 0..cfg.rays {
            let angle = pose.heading + 360.0 * k as f64 / cfg.rays as f64;
            let ray = cast_ray(world, pose.planar(), angle, cfg.sensor_range, scan_z);
            for &c in &ray.free_cells {
                if let Some(l) = self.local_of(world, c) {
                    if self.grid.get(l) == CellState::Unknown {
                        self.grid.set(l, CellState::Free);
                    }
                }
            }
            if let Some(c) = ray.cell {
                hits.extend(self.local_of(world, c));
            }
        }
        for l in hits {
            self.grid.set(l, CellState::Occupied);
        }
    }

    /// Marks the first cell that stopped a FORWARD motion.
    fn bump(&mut self, world: &GridWorld, pose: &Pose) {
        let to = pose.planar().offset(FORWARD_STEP, pose.heading);
        let steps = ray::traverse(world.resolution(), pose.planar(), to);
        let Some(mut prev) = world.checked_index(steps[0].cell.0, steps[0].cell.1) else {
            return;
        };
        for s in &steps[1..] {
            let mut path: Vec<(i64, i64)> = s.corner.map(|c| c.to_vec()).unwrap_or_default();
            path.push(s.cell);
            for cell in path {
                let next = world.checked_index(cell.0, cell.1);
                match next {
                    Some(n) if world.step_ok(prev, n) => {
                        if cell == s.cell {
                            prev = n;
                        }
                    }
                    _ => {
                        if let Some(l) = self.local(cell) {
                            self.grid.set(l, CellState::Occupied);
                        }
                        return;
                    }
                }
            }
        }
    }

    /// Planning view: occupied cells grown by `radius`, except near the
    /// agent and target cells, which are kept open.
    fn inflated(&self, radius: f64, keep: [usize; 2]) -> OccupancyGrid {
        let mut out = self.grid.clone();
        let h = self.grid.resolution();
        let k = (radius / h).round() as i64;
        if k > 0 {
            for idx in 0..self.grid.len() {
                if !self.grid.is_blocked(idx) {
                    continue;
                }
                let (i, j) = self.grid.coords(idx);
                for dj in -k..=k {
                    for di in -k..=k {
                        if di * di + dj * dj > k * k {
                            continue;
                        }
                        if let Some(n) = self.grid.checked_index(i as i64 + di, j as i64 + dj) {
                            out.set(n, CellState::Occupied);
                        }
                    }
                }
            }
        }
        // around the agent and the target only raw marks count, so neither
        // gets sealed in by the growth
        for c in keep {
            let (i, j) = self.grid.coords(c);
            for dj in -(k + 1)..=k + 1 {
                for di in -(k + 1)..=k + 1 {
                    if let Some(n) = self.grid.checked_index(i as i64 + di, j as i64 + dj) {
                        out.set(n, self.grid.get(n));
                    }
                }
            }
            out.set(c, CellState::Free);
        }
        out
    }

    /// Whether the forward motion crosses a cell known to be occupied.
    fn forward_blocked(&self, world: &GridWorld, pose: &Pose) -> bool {
        let to = pose.planar().offset(FORWARD_STEP, pose.heading);
        ray::traverse(world.resolution(), pose.planar(), to).iter().any(|s| {
            s.corner
                .iter()
                .flatten()
                .chain(std::iter::once(&s.cell))
                .any(|&c| self.local(c).is_none_or(|l| self.grid.is_blocked(l)))
        })
    }
}

/// Drives toward the point `(r, theta)` from `pose` using only range scans
/// of the surroundings. The target is fixed at call time; the map starts
/// empty on every call.
pub fn local_navigate(world: &GridWorld, pose: &Pose, r: f64, theta: f64, cfg: &LocalPolicyConfig) -> Result<NavOutcome> {
    cfg.validate()?;
    let target = project_target(world, pose, r, theta)?;
    Ok(drive(world, pose, target, cfg))
}

/// Local-policy control loop toward a fixed planar target.
pub(crate) fn drive(world: &GridWorld, start: &Pose, target: Point2, cfg: &LocalPolicyConfig) -> NavOutcome {
    let mut map = LocalMap::new(world, start.planar(), cfg.map_extent);
    let mut pose = *start;
    let mut actions = Vec::new();
    let mut last_turn = None;
    let target_local = world.cell_at(target).and_then(|c| map.local_of(world, c));
    let margin = 2.0 * cfg.waypoint_stride;

    while pose.planar().dist(&target) > cfg.stop_radius {
        if actions.len() >= cfg.budget {
            let mut out = NavOutcome::finish(world, pose, target, actions, cfg.stop_radius);
            out.budget_exhausted = true;
            return out;
        }
        let Some(tl) = target_local else { break };
        map.fuse(world, &pose, cfg);
        map.grid.set(tl, CellState::Free);
        let Some(here) = world.cell_at(pose.planar()).and_then(|c| map.local_of(world, c)) else {
            break;
        };
        map.grid.set(here, CellState::Free);
        let plan = map.inflated(cfg.inflation, [here, tl]);
        let Ok(field) = fmm_field_until(&plan, target, Some((here, margin))) else {
            break;
        };
        let Ok(waypoint) = extract_waypoint(&field, &plan, pose.planar(), cfg.waypoint_stride) else {
            break;
        };
        if waypoint.dist(&pose.planar()) < 1e-9 {
            break;
        }
        let turn = signed_deg(bearing_deg(pose.planar(), waypoint) - pose.heading);
        let action = if turn.abs() <= TURN_INCREMENT / 2.0 {
            if map.forward_blocked(world, &pose) {
                // keep sweeping the same way instead of dithering
                last_turn.unwrap_or(if turn >= 0.0 { Action::TurnLeft } else { Action::TurnRight })
            } else {
                Action::Forward
            }
        } else if turn > 0.0 {
            Action::TurnLeft
        } else {
            Action::TurnRight
        };
        if action != Action::Forward {
            last_turn = Some(action);
        }
        let (next, collided) = world.step_action(&pose, action);
        if collided {
            map.bump(world, &pose);
        }
        pose = next;
        actions.push(action);
    }
    NavOutcome::finish(world, pose, target, actions, cfg.stop_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::navigators::oracle_navigate;

    #[test]
    fn open_target_matches_oracle() {
        let w = GridWorld::open("open", 0.05, 120, 120);
        let pose = w.pose(1.0, 1.0, 0.0).unwrap();
        let cfg = LocalPolicyConfig::default();
        let local = local_navigate(&w, &pose, 2.0, 30.0, &cfg).unwrap();
        let oracle = oracle_navigate(&w, &pose, local.target, cfg.stop_radius).unwrap();
        assert!(local.reached && oracle.reached);
        assert!(local.pose.planar().dist(&oracle.pose.planar()) <= 0.15 + 1e-9);
    }

    fn wall_world() -> GridWorld {
        // 0.1 m thick wall across x = 2 with a gap near the top
        let (wd, ht) = (80, 60);
        let mut occ = vec![false; wd * ht];
        for j in 0..ht {
            for i in 0..wd {
                let border = i == 0 || j == 0 || i == wd - 1 || j == ht - 1;
                let wall = (40..42).contains(&i) && j < 44;
                occ[j * wd + i] = border || wall;
            }
        }
        GridWorld::new("wall", 0.05, wd, ht, 0.15, occ, vec![0.0; wd * ht]).unwrap()
    }

    #[test]
    fn goes_around_thin_wall() {
        let w = wall_world();
        let pose = w.pose(1.5, 1.0, 0.0).unwrap();
        let out = local_navigate(&w, &pose, 1.0, 0.0, &LocalPolicyConfig::default()).unwrap();
        assert!(out.reached, "{out:?}");
        assert!(out.actions.len() <= 40);
        // the straight line is blocked, so the path must have turned
        assert!(out.actions.iter().any(|&a| a != Action::Forward));
    }

    #[test]
    fn long_detour_exhausts_budget() {
        let w = wall_world();
        let pose = w.pose(1.5, 1.0, 0.0).unwrap();
        let cfg = LocalPolicyConfig {
            budget: 6,
            ..LocalPolicyConfig::default()
        };
        let out = local_navigate(&w, &pose, 1.0, 0.0, &cfg).unwrap();
        assert!(out.budget_exhausted && !out.reached);
        assert_eq!(out.actions.len(), 6);
    }

    #[test]
    fn deterministic() {
        let w = wall_world();
        let pose = w.pose(1.5, 1.0, 10.0).unwrap();
        let cfg = LocalPolicyConfig::default();
        let a = local_navigate(&w, &pose, 1.2, -20.0, &cfg).unwrap();
        let b = local_navigate(&w, &pose, 1.2, -20.0, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
