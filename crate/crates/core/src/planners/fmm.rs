//! First-order Fast Marching solve of `|grad T| = 1` and steepest-descent
//! waypoint extraction over the resulting field.
//!
//! Each cell takes the smaller of the axis-stencil update and the same update
//! on the 45° rotated stencil (arm `h√2`). The rotated stencil keeps
//! `T <= Dijkstra-8` and removes the diagonal drift of the axis scheme.

use super::grid::OccupancyGrid;
use crate::error::{Error, Result};
use crate::geometry::{MinItem, Point2};
use crate::world::io as io_fmt;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

/// Arrival values of a march toward `target`. Unreached cells hold infinity.
#[derive(Debug, Clone)]
pub struct TimeField {
    resolution: f64,
    width: usize,
    height: usize,
    origin: Point2,
    values: Vec<f64>,
    target_cell: usize,
    target: Point2,
    order: Vec<usize>,
}

impl TimeField {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn target_cell(&self) -> usize {
        self.target_cell
    }

    pub fn target(&self) -> Point2 {
        self.target
    }

    /// Cells in the order the march accepted them.
    pub fn accept_order(&self) -> &[usize] {
        &self.order
    }

    fn cell_at(&self, p: Point2) -> Option<usize> {
        let i = ((p.x - self.origin.x) / self.resolution).floor() as i64;
        let j = ((p.y - self.origin.y) / self.resolution).floor() as i64;
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.height {
            None
        } else {
            Some(j as usize * self.width + i as usize)
        }
    }

    fn at(&self, i: i64, j: i64) -> f64 {
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.height {
            f64::INFINITY
        } else {
            self.values[j as usize * self.width + i as usize]
        }
    }

    /// Value of the cell containing `p`.
    pub fn at_point(&self, p: Point2) -> f64 {
        self.cell_at(p).map_or(f64::INFINITY, |c| self.values[c])
    }

    /// Bilinear interpolation between cell centers; infinite when any of the
    /// four supporting cells is unreached.
    pub fn interpolate(&self, p: Point2) -> f64 {
        let (i0, j0, fx, fy) = self.stencil(p);
        let t00 = self.at(i0, j0);
        let t10 = self.at(i0 + 1, j0);
        let t01 = self.at(i0, j0 + 1);
        let t11 = self.at(i0 + 1, j0 + 1);
        (t00 * (1.0 - fx) + t10 * fx) * (1.0 - fy) + (t01 * (1.0 - fx) + t11 * fx) * fy
    }

    fn stencil(&self, p: Point2) -> (i64, i64, f64, f64) {
        let u = (p.x - self.origin.x) / self.resolution - 0.5;
        let v = (p.y - self.origin.y) / self.resolution - 0.5;
        let (i0, j0) = (u.floor(), v.floor());
        (i0 as i64, j0 as i64, u - i0, v - j0)
    }

    /// Descent direction `-grad T / |grad T|` from the bilinear patch.
    fn descent(&self, p: Point2) -> Option<(f64, f64)> {
        let (i0, j0, fx, fy) = self.stencil(p);
        let t00 = self.at(i0, j0);
        let t10 = self.at(i0 + 1, j0);
        let t01 = self.at(i0, j0 + 1);
        let t11 = self.at(i0 + 1, j0 + 1);
        if !(t00.is_finite() && t10.is_finite() && t01.is_finite() && t11.is_finite()) {
            return None;
        }
        let gx = (t10 - t00) * (1.0 - fy) + (t11 - t01) * fy;
        let gy = (t01 - t00) * (1.0 - fx) + (t11 - t10) * fx;
        let n = gx.hypot(gy);
        (n > 1e-12).then(|| (-gx / n, -gy / n))
    }

    /// Same row-major array layout as the world file, `null` for unreached.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{{\n\"height\":{},\n\"resolution\":", self.height));
        io_fmt::fmt_f64(&mut out, self.resolution);
        out.push_str(",\n\"values\":");
        io_fmt::write_f64_array(&mut out, &self.values);
        out.push_str(&format!(",\n\"width\":{}\n}}\n", self.width));
        out
    }
}

pub fn fmm_field(grid: &OccupancyGrid, target: Point2) -> Result<TimeField> {
    fmm_field_until(grid, target, None)
}

/// Marches outward from `target`. With `stop = Some((cell, margin))` the
/// march halts once `cell` is accepted and the front has advanced `margin`
/// beyond it, which is enough to trace descent paths from that cell.
pub fn fmm_field_until(
    grid: &OccupancyGrid,
    target: Point2,
    stop: Option<(usize, f64)>,
) -> Result<TimeField> {
    let target_cell = grid
        .cell_at(target)
        .filter(|&c| !grid.is_blocked(c))
        .ok_or(Error::NotNavigable {
            x: target.x,
            y: target.y,
        })?;
    let h = grid.resolution();
    let n = grid.len();
    let mut values = vec![f64::INFINITY; n];
    let mut known = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    values[target_cell] = 0.0;
    heap.push(MinItem {
        key: 0.0,
        id: target_cell,
    });
    let mut stop_value = f64::INFINITY;

    let open = |i: i64, j: i64| grid.checked_index(i, j).filter(|&c| !grid.is_blocked(c));

    while let Some(MinItem { key, id }) = heap.pop() {
        if known[id] {
            continue;
        }
        if let Some((_, margin)) = stop {
            if key > stop_value + margin {
                break;
            }
        }
        known[id] = true;
        order.push(id);
        if let Some((cell, _)) = stop {
            if id == cell {
                stop_value = key;
            }
        }
        let (ci, cj) = grid.coords(id);
        for (di, dj) in NEIGHBORS_8 {
            let (i, j) = (ci as i64 + di, cj as i64 + dj);
            let Some(nb) = open(i, j) else {
                continue;
            };
            if known[nb] {
                continue;
            }
            let frozen = |c: Option<usize>| c.filter(|&c| known[c]).map_or(f64::INFINITY, |c| values[c]);
            // diagonal support only through open corners
            let diag = |a: i64, b: i64| {
                if open(a, j).is_some() && open(i, b).is_some() {
                    frozen(open(a, b))
                } else {
                    f64::INFINITY
                }
            };
            let a = frozen(open(i - 1, j)).min(frozen(open(i + 1, j)));
            let b = frozen(open(i, j - 1)).min(frozen(open(i, j + 1)));
            let c = diag(i - 1, j - 1).min(diag(i + 1, j + 1));
            let d = diag(i - 1, j + 1).min(diag(i + 1, j - 1));
            let t = upwind(a, b, h).min(upwind(c, d, h * SQRT_2));
            if t < values[nb] {
                values[nb] = t;
                heap.push(MinItem { key: t, id: nb });
            }
        }
    }
    // Tentative values beyond the accepted front are not part of the field.
    for (v, &k) in values.iter_mut().zip(&known) {
        if !k {
            *v = f64::INFINITY;
        }
    }

    Ok(TimeField {
        resolution: h,
        width: grid.width(),
        height: grid.height(),
        origin: grid.origin(),
        values,
        target_cell,
        target,
        order,
    })
}

/// Two-sided update of a stencil with arm length `s` from the arm minima
/// `a` and `b`, one-sided when they differ by `s` or more.
fn upwind(a: f64, b: f64, s: f64) -> f64 {
    if (a - b).abs() < s {
        (a + b + (2.0 * s * s - (a - b) * (a - b)).sqrt()) / 2.0
    } else {
        a.min(b) + s
    }
}

const NEIGHBORS_8: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)];

/// Follows steepest descent of `field` from `from` and returns the point at
/// arc length `stride` along that path, or the target if it is nearer.
pub fn extract_waypoint(
    field: &TimeField,
    grid: &OccupancyGrid,
    from: Point2,
    stride: f64,
) -> Result<Point2> {
    let start_cell = grid
        .cell_at(from)
        .filter(|&c| field.values[c].is_finite())
        .ok_or(Error::Unreachable)?;
    let target = field.target;
    let h = grid.resolution();
    let mut cur = from;
    let mut cell = start_cell;
    let mut remaining = stride;

    for _ in 0..100_000 {
        if cur.dist(&target) <= remaining || cell == field.target_cell {
            return Ok(if cur.dist(&target) <= remaining {
                target
            } else {
                let d = cur.dist(&target);
                Point2::new(
                    cur.x + (target.x - cur.x) * remaining / d,
                    cur.y + (target.y - cur.y) * remaining / d,
                )
            });
        }
        let step = remaining.min(h / 2.0);
        let by_gradient = field.descent(cur).and_then(|(dx, dy)| {
            let next = Point2::new(cur.x + dx * step, cur.y + dy * step);
            let nc = grid.cell_at(next)?;
            let ok = field.values[nc].is_finite()
                && !grid.is_blocked(nc)
                && field.values[nc] <= field.values[cell] + 1e-12
                && adjacent_open(grid, cell, nc);
            ok.then_some((next, nc))
        });
        let (next, nc) = match by_gradient {
            Some(v) => v,
            None => {
                let Some(best) = lowest_neighbor(field, grid, cell) else {
                    // local minimum of the discrete field: the target cell
                    return Ok(target);
                };
                let c = grid.cell_center(best);
                let d = cur.dist(&c);
                let s = step.min(d);
                let next = Point2::new(cur.x + (c.x - cur.x) * s / d, cur.y + (c.y - cur.y) * s / d);
                let nc = grid.cell_at(next).unwrap_or(best);
                (next, nc)
            }
        };
        remaining -= cur.dist(&next);
        cur = next;
        cell = nc;
        if remaining <= 1e-12 {
            return Ok(cur);
        }
    }
    Ok(cur)
}

fn adjacent_open(grid: &OccupancyGrid, a: usize, b: usize) -> bool {
    if a == b {
        return true;
    }
    let (ai, aj) = grid.coords(a);
    let (bi, bj) = grid.coords(b);
    let (di, dj) = (bi as i64 - ai as i64, bj as i64 - aj as i64);
    if di.abs() > 1 || dj.abs() > 1 {
        return false;
    }
    if di != 0 && dj != 0 {
        let c1 = grid.checked_index(ai as i64 + di, aj as i64);
        let c2 = grid.checked_index(ai as i64, aj as i64 + dj);
        return c1.is_some_and(|c| !grid.is_blocked(c)) && c2.is_some_and(|c| !grid.is_blocked(c));
    }
    true
}

fn lowest_neighbor(field: &TimeField, grid: &OccupancyGrid, cell: usize) -> Option<usize> {
    let (i, j) = grid.coords(cell);
    let mut best: Option<(f64, usize)> = None;
    for di in -1i64..=1 {
        for dj in -1i64..=1 {
            if di == 0 && dj == 0 {
                continue;
            }
            let Some(n) = grid.checked_index(i as i64 + di, j as i64 + dj) else {
                continue;
            };
            if grid.is_blocked(n) || !adjacent_open(grid, cell, n) {
                continue;
            }
            let v = field.values[n];
            if v < field.values[cell] && best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, n));
            }
        }
    }
    best.map(|(_, n)| n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_is_zero_and_corridor_is_exact() {
        let row = ".".repeat(80);
        let g = OccupancyGrid::from_ascii(0.05, &[&row, &row, &row]);
        let target = g.cell_center(g.index(0, 1));
        let f = fmm_field(&g, target).unwrap();
        assert_eq!(f.value(f.target_cell()), 0.0);
        for i in 0..80 {
            let d = i as f64 * 0.05;
            let t = f.value(g.index(i, 1));
            assert!((t - d).abs() <= 0.05 + 1e-12, "cell {i}: {t} vs {d}");
        }
    }

    #[test]
    fn occupied_target_is_an_error() {
        let g = OccupancyGrid::from_ascii(1.0, &["#."]);
        assert!(fmm_field(&g, Point2::new(0.5, 0.5)).is_err());
    }

    #[test]
    fn accept_order_is_monotone() {
        let g = OccupancyGrid::from_ascii(
            0.1,
            &["..........", "...####...", "......#...", "..?...#...", ".........."],
        );
        let f = fmm_field(&g, Point2::new(0.05, 0.05)).unwrap();
        let vals: Vec<f64> = f.accept_order().iter().map(|&c| f.value(c)).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn near_target_returns_target() {
        let row = ".".repeat(40);
        let g = OccupancyGrid::from_ascii(0.05, &[&row, &row]);
        let target = Point2::new(0.525, 0.025);
        let f = fmm_field(&g, target).unwrap();
        let w = extract_waypoint(&f, &g, Point2::new(0.425, 0.025), 0.25).unwrap();
        assert_eq!(w, target);
    }

    #[test]
    fn corridor_waypoint_is_a_quarter_meter_along_axis() {
        let row = ".".repeat(80);
        let g = OccupancyGrid::from_ascii(0.05, &[&row, &row, &row]);
        let target = g.cell_center(g.index(79, 1));
        let f = fmm_field(&g, target).unwrap();
        let from = g.cell_center(g.index(10, 1));
        let w = extract_waypoint(&f, &g, from, 0.25).unwrap();
        assert!((w.x - (from.x + 0.25)).abs() < 1e-3, "{w:?}");
        assert!((w.y - from.y).abs() < 1e-3);
    }

    #[test]
    fn unreachable_start_is_an_error() {
        let g = OccupancyGrid::from_ascii(1.0, &[".#."]);
        let f = fmm_field(&g, Point2::new(0.5, 0.5)).unwrap();
        assert!(matches!(
            extract_waypoint(&f, &g, Point2::new(2.5, 0.5), 0.25),
            Err(Error::Unreachable)
        ));
    }

    #[test]
    fn dump_uses_null_for_unreached() {
        let g = OccupancyGrid::from_ascii(1.0, &[".#."]);
        let f = fmm_field(&g, Point2::new(0.5, 0.5)).unwrap();
        assert!(f.dump().contains("[0.000000,null,null]"));
    }
}
