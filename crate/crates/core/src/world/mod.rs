//! Continuous 2.5-D worlds backed by an occupancy + elevation grid.
//!
//! Cell `(i, j)` covers `[i*res, (i+1)*res) x [j*res, (j+1)*res)` and is stored
//! row-major at `j * width + i`. Agents live at continuous planar coordinates;
//! their elevation is that of the cell they occupy.

pub(crate) mod io;
pub mod ray;
mod scan;
mod scene;

pub use io::{load_world, save_world};
pub use scan::{
    cast_ray, elevation_probe, laser_scan, laser_scan_with, ElevationProbe, RampReading, RayHit,
    ScanConfig, SCAN_HEIGHT,
};
pub use scene::{generate_scene, SceneSpec};

use crate::error::{Error, Result};
use crate::geometry::{wrap_deg, MinItem, Point2, Point3};
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Displacement of one FORWARD action.
pub const FORWARD_STEP: f64 = 0.25;
/// Rotation of one TURN action, degrees.
pub const TURN_INCREMENT: f64 = 15.0;
pub const DEFAULT_MAX_STEP: f64 = 0.15;
pub const DEFAULT_RESOLUTION: f64 = 0.05;
/// Agent positions are kept on this binary grid (about 1e-6 m), so two
/// poses that agree on it behave identically under every action.
pub const POSITION_QUANTUM: f64 = 1.0 / 1_048_576.0;

fn quantize(v: f64) -> f64 {
    (v / POSITION_QUANTUM).round() * POSITION_QUANTUM
}

const NO_COMPONENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Action {
    Forward,
    TurnLeft,
    TurnRight,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Degrees in `[0, 360)`, counterclockwise from +x.
    pub heading: f64,
    pub z: f64,
}

impl Pose {
    pub fn planar(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn position(&self) -> Point3 {
        Point3::new(self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone)]
pub struct GridWorld {
    name: String,
    resolution: f64,
    width: usize,
    height: usize,
    max_step: f64,
    occupancy: Vec<bool>,
    elevation: Vec<f64>,
    components: OnceLock<Vec<u32>>,
}

impl PartialEq for GridWorld {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.resolution == other.resolution
            && self.width == other.width
            && self.height == other.height
            && self.max_step == other.max_step
            && self.occupancy == other.occupancy
            && self
                .elevation
                .iter()
                .zip(&other.elevation)
                .all(|(a, b)| a == b || (a.is_nan() && b.is_nan()))
    }
}

impl GridWorld {
    /// Builds a world, checking every type invariant. Elevations of occupied
    /// cells are ignored and may be NaN.
    pub fn new(
        name: impl Into<String>,
        resolution: f64,
        width: usize,
        height: usize,
        max_step: f64,
        occupancy: Vec<bool>,
        elevation: Vec<f64>,
    ) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if !(max_step >= 0.0 && max_step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "max_step must be non-negative, got {max_step}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("world must have at least one cell".into()));
        }
        let n = width * height;
        if occupancy.len() != n {
            return Err(Error::DimensionMismatch {
                field: "occupancy",
                expected: n,
                got: occupancy.len(),
            });
        }
        if elevation.len() != n {
            return Err(Error::DimensionMismatch {
                field: "elevation",
                expected: n,
                got: elevation.len(),
            });
        }
        for (idx, (&occ, &z)) in occupancy.iter().zip(&elevation).enumerate() {
            if !occ && !z.is_finite() {
                return Err(Error::NonFiniteElevation {
                    x: idx % width,
                    y: idx / width,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            resolution,
            width,
            height,
            max_step,
            occupancy,
            elevation,
            components: OnceLock::new(),
        })
    }

    /// A flat world with every cell free.
    pub fn open(name: &str, resolution: f64, width: usize, height: usize) -> Self {
        Self::new(
            name,
            resolution,
            width,
            height,
            DEFAULT_MAX_STEP,
            vec![false; width * height],
            vec![0.0; width * height],
        )
        .expect("valid open world")
    }

    /// Flat world from an ASCII picture: `#` is occupied, anything else free.
    /// The first line is the top row (largest y).
    pub fn from_ascii(name: &str, resolution: f64, rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut occupancy = vec![false; width * height];
        for (r, line) in rows.iter().enumerate() {
            if line.len() != width {
                return Err(Error::Malformed("ragged ascii map".into()));
            }
            let j = height - 1 - r;
            for (i, ch) in line.bytes().enumerate() {
                occupancy[j * width + i] = ch == b'#';
            }
        }
        let elevation = occupancy
            .iter()
            .map(|&o| if o { f64::NAN } else { 0.0 })
            .collect();
        Self::new(name, resolution, width, height, DEFAULT_MAX_STEP, occupancy, elevation)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn resolution(&self) -> f64 {
        self.resolution
    }
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn max_step(&self) -> f64 {
        self.max_step
    }
    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }
    pub fn elevation(&self) -> &[f64] {
        &self.elevation
    }
    pub fn len(&self) -> usize {
        self.width * self.height
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    /// Index of the cell at signed grid coordinates, if inside the grid.
    pub fn checked_index(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.height {
            None
        } else {
            Some(self.index(i as usize, j as usize))
        }
    }

    pub fn cell_at(&self, p: Point2) -> Option<usize> {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return None;
        }
        self.checked_index(
            (p.x / self.resolution).floor() as i64,
            (p.y / self.resolution).floor() as i64,
        )
    }

    pub fn cell_center(&self, idx: usize) -> Point2 {
        let (i, j) = self.coords(idx);
        Point2::new(
            (i as f64 + 0.5) * self.resolution,
            (j as f64 + 0.5) * self.resolution,
        )
    }

    /// Cell center lifted to the cell's elevation.
    pub fn cell_point(&self, idx: usize) -> Point3 {
        let c = self.cell_center(idx);
        Point3::new(c.x, c.y, self.elevation[idx])
    }

    pub fn is_free(&self, idx: usize) -> bool {
        !self.occupancy[idx]
    }

    pub fn cell_elevation(&self, idx: usize) -> f64 {
        self.elevation[idx]
    }

    pub fn is_navigable(&self, p: Point2) -> bool {
        self.cell_at(p).is_some_and(|c| self.is_free(c))
    }

    pub fn elevation_at(&self, p: Point2) -> Option<f64> {
        self.cell_at(p).filter(|&c| self.is_free(c)).map(|c| self.elevation[c])
    }

    /// Lifts a planar point onto the navigable surface.
    pub fn lift(&self, p: Point2) -> Result<Point3> {
        self.elevation_at(p)
            .map(|z| Point3::new(p.x, p.y, z))
            .ok_or(Error::NotNavigable { x: p.x, y: p.y })
    }

    /// Pose at `(x, y)` snapped to [`POSITION_QUANTUM`].
    pub fn pose(&self, x: f64, y: f64, heading: f64) -> Result<Pose> {
        let (x, y) = (quantize(x), quantize(y));
        let z = self
            .elevation_at(Point2::new(x, y))
            .ok_or(Error::NotNavigable { x, y })?;
        Ok(Pose {
            x,
            y,
            heading: wrap_deg(heading),
            z,
        })
    }

    /// Whether an agent may move between two 4-adjacent cells.
    pub fn step_ok(&self, a: usize, b: usize) -> bool {
        self.is_free(a)
            && self.is_free(b)
            && (self.elevation[a] - self.elevation[b]).abs() <= self.max_step + 1e-9
    }

    /// 8-connected moves out of `idx` with their 3-D lengths. A diagonal move
    /// also requires both orthogonal corner cells to be traversable.
    pub fn moves(&self, idx: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (i, j) = self.coords(idx);
        let (i, j) = (i as i64, j as i64);
        const OFFSETS: [(i64, i64); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        let res = self.resolution;
        OFFSETS.iter().filter_map(move |&(di, dj)| {
            let b = self.checked_index(i + di, j + dj)?;
            if !self.step_ok(idx, b) {
                return None;
            }
            let horizontal = if di != 0 && dj != 0 {
                let o1 = self.checked_index(i + di, j)?;
                let o2 = self.checked_index(i, j + dj)?;
                if !(self.step_ok(idx, o1)
                    && self.step_ok(o1, b)
                    && self.step_ok(idx, o2)
                    && self.step_ok(o2, b))
                {
                    return None;
                }
                res * std::f64::consts::SQRT_2
            } else {
                res
            };
            let dz = self.elevation[b] - self.elevation[idx];
            Some((b, (horizontal * horizontal + dz * dz).sqrt()))
        })
    }

    /// Connected-component label per cell (`u32::MAX` for occupied cells).
    pub fn components(&self) -> &[u32] {
        self.components.get_or_init(|| {
            let mut label = vec![NO_COMPONENT; self.len()];
            let mut next = 0u32;
            let mut stack = Vec::new();
            for start in 0..self.len() {
                if !self.is_free(start) || label[start] != NO_COMPONENT {
                    continue;
                }
                label[start] = next;
                stack.push(start);
                while let Some(c) = stack.pop() {
                    for (n, _) in self.moves(c) {
                        if label[n] == NO_COMPONENT {
                            label[n] = next;
                            stack.push(n);
                        }
                    }
                }
                next += 1;
            }
            label
        })
    }

    pub fn component_count(&self) -> usize {
        self.components()
            .iter()
            .filter(|&&c| c != NO_COMPONENT)
            .max()
            .map_or(0, |&m| m as usize + 1)
    }

    /// Whether two cells are mutually reachable.
    pub fn connected_cells(&self, a: usize, b: usize) -> bool {
        let labels = self.components();
        labels[a] != NO_COMPONENT && labels[a] == labels[b]
    }

    /// Applies one low-level action. Blocked FORWARD motion leaves the pose
    /// unchanged and reports a collision.
    pub fn step_action(&self, pose: &Pose, action: Action) -> (Pose, bool) {
        match action {
            Action::Stop => (*pose, false),
            Action::TurnLeft => (
                Pose {
                    heading: wrap_deg(pose.heading + TURN_INCREMENT),
                    ..*pose
                },
                false,
            ),
            Action::TurnRight => (
                Pose {
                    heading: wrap_deg(pose.heading - TURN_INCREMENT),
                    ..*pose
                },
                false,
            ),
            Action::Forward => {
                let ahead = pose.planar().offset(FORWARD_STEP, pose.heading);
                let to = Point2::new(quantize(ahead.x), quantize(ahead.y));
                match self.sweep(pose.planar(), to) {
                    Some(end) => (
                        Pose {
                            x: to.x,
                            y: to.y,
                            heading: pose.heading,
                            z: self.elevation[end],
                        },
                        false,
                    ),
                    None => (*pose, true),
                }
            }
        }
    }

    /// Checks that the straight motion `from -> to` crosses only traversable
    /// cell transitions. Returns the final cell on success.
    pub fn sweep(&self, from: Point2, to: Point2) -> Option<usize> {
        let steps = ray::traverse(self.resolution, from, to);
        let mut prev = self.checked_index(steps[0].cell.0, steps[0].cell.1)?;
        if !self.is_free(prev) {
            return None;
        }
        for s in &steps[1..] {
            let next = self.checked_index(s.cell.0, s.cell.1)?;
            if let Some(corner) = s.corner {
                for c in corner {
                    let mid = self.checked_index(c.0, c.1)?;
                    if !(self.step_ok(prev, mid) && self.step_ok(mid, next)) {
                        return None;
                    }
                }
            } else if !self.step_ok(prev, next) {
                return None;
            }
            prev = next;
        }
        Some(prev)
    }

    fn navigable_cell(&self, p: Point2) -> Result<usize> {
        self.cell_at(p)
            .filter(|&c| self.is_free(c))
            .ok_or(Error::NotNavigable { x: p.x, y: p.y })
    }

    /// Single-source shortest path lengths over the 8-connected cell graph.
    /// The search halts once `stop` is settled or distances exceed `limit`.
    pub(crate) fn dijkstra(&self, source: usize, stop: Option<usize>, limit: f64) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(MinItem { key: 0.0, id: source });
        while let Some(MinItem { key, id }) = heap.pop() {
            if key > dist[id] {
                continue;
            }
            if Some(id) == stop || key > limit {
                break;
            }
            for (n, w) in self.moves(id) {
                let nd = key + w;
                if nd < dist[n] {
                    dist[n] = nd;
                    heap.push(MinItem { key: nd, id: n });
                }
            }
        }
        dist
    }

    /// Shortest navigable path length between two points, or `None` when
    /// they lie in different components. Equals the straight-line 3-D
    /// distance when the straight motion is traversable, otherwise the
    /// cell-graph distance floored by it.
    pub fn geodesic_distance(&self, a: Point2, b: Point2) -> Result<Option<f64>> {
        let ca = self.navigable_cell(a)?;
        let cb = self.navigable_cell(b)?;
        if !self.connected_cells(ca, cb) {
            return Ok(None);
        }
        let pa = Point3::new(a.x, a.y, self.elevation[ca]);
        let pb = Point3::new(b.x, b.y, self.elevation[cb]);
        let straight = pa.dist(&pb);
        if ca == cb || self.line_of_sight(a, b) {
            return Ok(Some(straight));
        }
        Ok(Some(self.dijkstra(ca, Some(cb), f64::INFINITY)[cb].max(straight)))
    }

    /// Whether the straight motion between `a` and `b` is traversable.
    /// Symmetric: the sweep always runs from the lexicographically smaller
    /// endpoint.
    pub fn line_of_sight(&self, a: Point2, b: Point2) -> bool {
        let (from, to) = if (a.x, a.y) <= (b.x, b.y) { (a, b) } else { (b, a) };
        self.sweep(from, to).is_some()
    }

    /// Cell-graph part of the geodesic: 8-connected shortest path length
    /// between the cells containing `a` and `b`.
    pub fn cell_graph_distance(&self, a: Point2, b: Point2) -> Result<Option<f64>> {
        let ca = self.navigable_cell(a)?;
        let cb = self.navigable_cell(b)?;
        if !self.connected_cells(ca, cb) {
            return Ok(None);
        }
        Ok(Some(self.dijkstra(ca, Some(cb), f64::INFINITY)[cb]))
    }

    /// Geodesic distances from `source` to every cell, for repeated queries
    /// against a fixed endpoint.
    pub fn distance_field(&self, source: Point2) -> Result<DistanceField> {
        let c = self.navigable_cell(source)?;
        Ok(DistanceField {
            source: Point3::new(source.x, source.y, self.elevation[c]),
            dist: self.dijkstra(c, None, f64::INFINITY),
        })
    }
}

/// Geodesic distances from one fixed point.
#[derive(Debug, Clone)]
pub struct DistanceField {
    source: Point3,
    dist: Vec<f64>,
}

impl DistanceField {
    pub fn source(&self) -> Point3 {
        self.source
    }

    /// Distance from the source to `p`, or `None` if `p` is not navigable or
    /// not reachable. Consistent with [`GridWorld::geodesic_distance`].
    pub fn to(&self, world: &GridWorld, p: Point2) -> Option<f64> {
        let c = world.cell_at(p).filter(|&c| world.is_free(c))?;
        let d = self.dist[c];
        if !d.is_finite() {
            return None;
        }
        let q = Point3::new(p.x, p.y, world.cell_elevation(c));
        let straight = self.source.dist(&q);
        if d == 0.0 || world.line_of_sight(self.source.planar(), p) {
            return Some(straight);
        }
        Some(d.max(straight))
    }

    pub fn cell(&self, idx: usize) -> f64 {
        self.dist[idx]
    }
}
