//! Conveyance from one subgoal to the next: teleportation, the privileged
//! oracle planner and the sensing-only local policy.

pub(crate) mod local;

pub use local::{local_navigate, LocalPolicyConfig};

use crate::error::{Error, Result};
use crate::geometry::{bearing_deg, snap_heading, Point2};
use crate::planners::astar_plan;
use crate::world::{Action, GridWorld, Pose};
use serde::{Deserialize, Serialize};

/// Search radius for snapping a projected target onto navigable space.
pub const SNAP_RADIUS: f64 = 1.0;
/// Teleported agents face away from where they came from, on this grid.
pub const TELEPORT_HEADING_INCREMENT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NavigatorKind {
    Teleport,
    Oracle,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavOutcome {
    pub pose: Pose,
    /// Planar point the navigator was sent to.
    pub target: Point2,
    pub actions: Vec<Action>,
    /// Geodesic distance from the terminal pose to the target; infinite
    /// (null on disk) when they are disconnected.
    #[serde(with = "inf_as_null")]
    pub nav_error: f64,
    pub reached: bool,
    pub budget_exhausted: bool,
    /// Whether the agent was placed rather than driven.
    pub teleported: bool,
}

impl NavOutcome {
    /// The target could not be placed on navigable space; nothing moved.
    pub fn stalled(pose: Pose, target: Point2) -> Self {
        Self {
            pose,
            target,
            actions: Vec::new(),
            nav_error: f64::INFINITY,
            reached: false,
            budget_exhausted: false,
            teleported: false,
        }
    }

    fn finish(world: &GridWorld, pose: Pose, target: Point2, actions: Vec<Action>, stop_radius: f64) -> Self {
        let nav_error = world
            .geodesic_distance(pose.planar(), target)
            .ok()
            .flatten()
            .unwrap_or(f64::INFINITY);
        Self {
            pose,
            target,
            actions,
            nav_error,
            reached: nav_error <= stop_radius,
            budget_exhausted: false,
            teleported: false,
        }
    }
}

pub(crate) mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Projects `(r, theta)` from `pose` onto the plane and snaps it to the
/// center of the nearest free cell reachable from the agent. Ties go to the
/// lowest cell index.
pub fn project_target(world: &GridWorld, pose: &Pose, r: f64, theta: f64) -> Result<Point2> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!("projection range must be >= 0, got {r}")));
    }
    let here = world
        .cell_at(pose.planar())
        .filter(|&c| world.is_free(c))
        .ok_or(Error::NotNavigable { x: pose.x, y: pose.y })?;
    let p = pose.planar().offset(r, pose.heading + theta);
    let h = world.resolution();
    let reach = (SNAP_RADIUS / h).ceil() as i64 + 1;
    let (ci, cj) = ((p.x / h).floor() as i64, (p.y / h).floor() as i64);
    let mut best: Option<(f64, usize)> = None;
    for j in cj - reach..=cj + reach {
        for i in ci - reach..=ci + reach {
            let Some(c) = world.checked_index(i, j) else {
                continue;
            };
            if !world.connected_cells(here, c) {
                continue;
            }
            let d = world.cell_center(c).dist(&p);
            if d > SNAP_RADIUS {
                continue;
            }
            if best.is_none_or(|(bd, bc)| d < bd || (d == bd && c < bc)) {
                best = Some((d, c));
            }
        }
    }
    best.map(|(_, c)| world.cell_center(c))
        .ok_or(Error::NoSnap { radius: SNAP_RADIUS })
}

/// Places the agent on `target`, facing away from `prev`.
pub fn teleport(world: &GridWorld, pose: &Pose, prev: Point2, target: Point2) -> Result<NavOutcome> {
    let bearing = if prev.dist(&target) > 0.0 {
        bearing_deg(prev, target)
    } else {
        pose.heading
    };
    let placed = world.pose(target.x, target.y, snap_heading(bearing, TELEPORT_HEADING_INCREMENT))?;
    Ok(NavOutcome {
        pose: placed,
        target,
        actions: Vec::new(),
        nav_error: 0.0,
        reached: true,
        budget_exhausted: false,
        teleported: true,
    })
}

/// Executes the shortest action plan to `target`. An unreachable target
/// leaves the agent in place.
pub fn oracle_navigate(world: &GridWorld, pose: &Pose, target: Point2, stop_radius: f64) -> Result<NavOutcome> {
    let plan = match astar_plan(world, pose, target, stop_radius) {
        Ok(plan) => plan,
        Err(Error::Unreachable) => {
            let mut out = NavOutcome::finish(world, *pose, target, Vec::new(), stop_radius);
            out.reached = false;
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let mut cur = *pose;
    for &a in &plan {
        cur = world.step_action(&cur, a).0;
    }
    Ok(NavOutcome::finish(world, cur, target, plan, stop_radius))
}
