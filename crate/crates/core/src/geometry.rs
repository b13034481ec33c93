//! Planar/3-D points and heading arithmetic shared across modules.
//!
//! Headings are degrees in the global frame, measured counterclockwise from +x.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Point reached by moving `r` meters along global heading `deg`.
    pub fn offset(&self, r: f64, deg: f64) -> Point2 {
        let (s, c) = unit_sin_cos(deg);
        Point2::new(self.x + r * c, self.y + r * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn planar(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn dist(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Wraps an angle into `[0, 360)`.
pub fn wrap_deg(a: f64) -> f64 {
    let w = a.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `(-180, 180]`.
pub fn signed_deg(a: f64) -> f64 {
    let w = wrap_deg(a);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Global bearing from `from` to `to` in `[0, 360)`.
pub fn bearing_deg(from: Point2, to: Point2) -> f64 {
    wrap_deg((to.y - from.y).atan2(to.x - from.x).to_degrees())
}

/// Rounds `deg` to the nearest multiple of `increment`, ties rounding down,
/// and wraps the result into `[0, 360)`.
pub fn snap_heading(deg: f64, increment: f64) -> f64 {
    let q = deg / increment;
    // ceil(q - 0.5) sends exact halves down.
    let k = (q - 0.5 - 1e-9).ceil();
    wrap_deg(k * increment)
}

/// `(sin, cos)` of a heading in degrees, exact on multiples of 90°.
pub fn unit_sin_cos(deg: f64) -> (f64, f64) {
    let w = wrap_deg(deg);
    let quarter = w / 90.0;
    if (quarter - quarter.round()).abs() < 1e-12 {
        match (quarter.round() as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        w.to_radians().sin_cos()
    }
}

/// Min-heap entry ordered by `(key, id)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MinItem {
    pub key: f64,
    pub id: usize,
}

impl PartialEq for MinItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MinItem {}

impl PartialOrd for MinItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed so BinaryHeap pops the smallest
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.id.cmp(&self.id))
    }
}
