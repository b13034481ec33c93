//! Simulated planar laser scanning and the privileged elevation probe.

use super::{ray, GridWorld, Pose};
use crate::geometry::{signed_deg, Point2};
use crate::subgoal::radial::{
    heading_center, range_bin, RadialKind, RadialMap, HEADING_BINS, MAX_RANGE, RANGE_BINS,
};
use serde::{Deserialize, Serialize};

/// Scanner mounting height above the floor, meters.
pub const SCAN_HEIGHT: f64 = 0.24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Field of view centered on the agent heading, degrees. Bins outside
    /// it are reported blocked.
    pub fov_deg: f64,
    pub height: f64,
    pub max_range: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            fov_deg: 360.0,
            height: SCAN_HEIGHT,
            max_range: MAX_RANGE,
        }
    }
}

/// Result of casting one ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RayHit {
    /// Distance to the first blocking cell boundary, if any within range.
    pub distance: Option<f64>,
    /// The blocking cell, when it lies inside the grid.
    pub cell: Option<usize>,
    /// Cells traversed before the hit.
    pub free_cells: Vec<usize>,
}

/// Casts one ray at global angle `angle` from `origin`. A cell blocks when
/// it is occupied, outside the grid, or its floor rises above `scan_z`.
pub fn cast_ray(
    world: &GridWorld,
    origin: Point2,
    angle: f64,
    max_range: f64,
    scan_z: f64,
) -> RayHit {
    let end = origin.offset(max_range, angle);
    let mut free_cells = Vec::new();
    for step in ray::traverse(world.resolution(), origin, end) {
        let mut cells = Vec::with_capacity(3);
        if let Some(corner) = step.corner {
            cells.extend(corner);
        }
        cells.push(step.cell);
        for (i, j) in cells {
            match world.checked_index(i, j) {
                None => {
                    return RayHit {
                        distance: Some(step.t),
                        cell: None,
                        free_cells,
                    }
                }
                Some(c) if !world.is_free(c) || world.cell_elevation(c) > scan_z => {
                    return RayHit {
                        distance: Some(step.t),
                        cell: Some(c),
                        free_cells,
                    }
                }
                Some(c) => {
                    if free_cells.last() != Some(&c) {
                        free_cells.push(c)
                    }
                }
            }
        }
    }
    RayHit {
        distance: None,
        cell: None,
        free_cells,
    }
}

pub fn laser_scan(world: &GridWorld, pose: &Pose) -> RadialMap {
    laser_scan_with(world, pose, &ScanConfig::default())
}

/// 24x48 obstacle map: one ray per heading bin through the bin center;
/// the hit's range bin and everything beyond it are blocked.
pub fn laser_scan_with(world: &GridWorld, pose: &Pose, cfg: &ScanConfig) -> RadialMap {
    let mut map = RadialMap::zeros(RadialKind::Obstacle);
    let scan_z = pose.z + cfg.height;
    for h in 0..HEADING_BINS {
        let rel = heading_center(h);
        let first = if signed_deg(rel).abs() > cfg.fov_deg / 2.0 {
            0
        } else {
            let hit = cast_ray(world, pose.planar(), pose.heading + rel, cfg.max_range, scan_z);
            match hit.distance {
                Some(d) if d < MAX_RANGE => range_bin(d).0,
                _ => RANGE_BINS,
            }
        };
        for r in first..RANGE_BINS {
            map.set(r, h, 1.0);
        }
    }
    map
}

/// A climbable rise hidden from the planar scanner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampReading {
    /// Range where the scanner ray is blocked by the rising floor.
    pub entry_range: f64,
    /// Range where the climb levels off (or the traversable stretch ends),
    /// plus a short landing margin.
    pub exit_range: f64,
    /// Elevation gained at the exit relative to the agent.
    pub rise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElevationProbe {
    /// One optional reading per heading bin.
    pub readings: Vec<Option<RampReading>>,
}

const LANDING_MARGIN: f64 = 0.4;

/// Reads the world's elevation field along each heading-bin ray and reports
/// rises that block the scanner yet remain climbable cell to cell.
pub fn elevation_probe(world: &GridWorld, pose: &Pose) -> ElevationProbe {
    let scan_z = pose.z + SCAN_HEIGHT;
    let readings = (0..HEADING_BINS)
        .map(|h| {
            let angle = pose.heading + heading_center(h);
            let end = pose.planar().offset(MAX_RANGE, angle);
            let steps = ray::traverse(world.resolution(), pose.planar(), end);
            let mut prev = world.cell_at(pose.planar())?;
            let mut entry = None;
            let mut stretch: Vec<(f64, f64)> = Vec::new();
            for s in &steps[1..] {
                let next = world.checked_index(s.cell.0, s.cell.1)?;
                let passable = match s.corner {
                    Some(corner) => corner.iter().all(|&(i, j)| {
                        world
                            .checked_index(i, j)
                            .is_some_and(|m| world.step_ok(prev, m) && world.step_ok(m, next))
                    }),
                    None => world.step_ok(prev, next),
                };
                if entry.is_none() {
                    let blocks = !world.is_free(next) || world.cell_elevation(next) > scan_z;
                    if blocks {
                        if !passable || world.cell_elevation(next) <= scan_z {
                            return None;
                        }
                        entry = Some(s.t);
                    }
                } else if !passable {
                    break;
                }
                if entry.is_some() {
                    stretch.push((s.t, world.cell_elevation(next)));
                }
                prev = next;
            }
            let entry_range = entry?;
            let top = stretch.iter().map(|&(_, z)| z).fold(f64::MIN, f64::max);
            let exit_t = stretch
                .iter()
                .find(|&&(_, z)| z >= top - 0.02)
                .map(|&(t, _)| t)?;
            let last_t = stretch.last().map(|&(t, _)| t)?;
            Some(RampReading {
                entry_range,
                exit_range: (exit_t + LANDING_MARGIN).min(last_t).min(MAX_RANGE - 1e-6),
                rise: top - pose.z,
            })
        })
        .collect();
    ElevationProbe { readings }
}
