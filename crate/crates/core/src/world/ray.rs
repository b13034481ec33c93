//! Supercover traversal of a segment over a square cell grid.

use crate::geometry::Point2;

/// One cell entered by a segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayStep {
    pub cell: (i64, i64),
    /// Distance along the segment (meters) at which the cell is entered.
    pub t: f64,
    /// When the segment passes exactly through a cell corner, the two
    /// orthogonal cells that share that corner.
    pub corner: Option<[(i64, i64); 2]>,
}

/// Visits every cell touched by the segment `from -> to` in order, starting
/// with the cell containing `from`. The first step has `t = 0`.
pub fn traverse(resolution: f64, from: Point2, to: Point2) -> Vec<RayStep> {
    let fx = from.x / resolution;
    let fy = from.y / resolution;
    let mut i = fx.floor() as i64;
    let mut j = fy.floor() as i64;
    let tx = to.x / resolution;
    let ty = to.y / resolution;
    let end_i = tx.floor() as i64;
    let end_j = ty.floor() as i64;

    let dx = tx - fx;
    let dy = ty - fy;
    let len = from.dist(&to);
    let mut out = vec![RayStep {
        cell: (i, j),
        t: 0.0,
        corner: None,
    }];
    if len == 0.0 {
        return out;
    }

    let step_i: i64 = if dx > 0.0 { 1 } else if dx < 0.0 { -1 } else { 0 };
    let step_j: i64 = if dy > 0.0 { 1 } else if dy < 0.0 { -1 } else { 0 };
    // parametric s in [0, 1]
    let (mut smax_x, sdelta_x) = if step_i > 0 {
        (((i + 1) as f64 - fx) / dx, 1.0 / dx)
    } else if step_i < 0 {
        ((i as f64 - fx) / dx, -1.0 / dx)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let (mut smax_y, sdelta_y) = if step_j > 0 {
        (((j + 1) as f64 - fy) / dy, 1.0 / dy)
    } else if step_j < 0 {
        ((j as f64 - fy) / dy, -1.0 / dy)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    const TIE: f64 = 1e-10;
    let max_steps = ((end_i - i).abs() + (end_j - j).abs()) as usize + 2;
    for _ in 0..max_steps {
        if i == end_i && j == end_j {
            break;
        }
        let s;
        let mut corner = None;
        if (smax_x - smax_y).abs() <= TIE {
            s = smax_x.min(smax_y);
            corner = Some([(i + step_i, j), (i, j + step_j)]);
            i += step_i;
            j += step_j;
            smax_x += sdelta_x;
            smax_y += sdelta_y;
        } else if smax_x < smax_y {
            s = smax_x;
            i += step_i;
            smax_x += sdelta_x;
        } else {
            s = smax_y;
            j += step_j;
            smax_y += sdelta_y;
        }
        if s > 1.0 + TIE {
            break;
        }
        out.push(RayStep {
            cell: (i, j),
            t: s.clamp(0.0, 1.0) * len,
            corner,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_segment_visits_each_cell_once() {
        let steps = traverse(0.05, Point2::new(1.01, 1.01), Point2::new(1.26, 1.01));
        let cells: Vec<_> = steps.iter().map(|s| s.cell).collect();
        assert_eq!(cells, vec![(20, 20), (21, 20), (22, 20), (23, 20), (24, 20), (25, 20)]);
    }

    #[test]
    fn diagonal_through_corners_reports_both_sides() {
        let steps = traverse(1.0, Point2::new(0.5, 0.5), Point2::new(2.5, 2.5));
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[1].cell, (1, 1));
        assert_eq!(steps[1].corner, Some([(1, 0), (0, 1)]));
    }

    #[test]
    fn consecutive_cells_are_adjacent() {
        let steps = traverse(0.1, Point2::new(0.33, 0.71), Point2::new(-0.92, 2.4));
        for w in steps.windows(2) {
            let (a, b) = (w[0].cell, w[1].cell);
            assert!((a.0 - b.0).abs() <= 1 && (a.1 - b.1).abs() <= 1);
            assert!(w[1].t >= w[0].t);
        }
        let last = steps.last().unwrap().cell;
        assert_eq!(last, ((-0.92f64 / 0.1).floor() as i64, (2.4f64 / 0.1).floor() as i64));
    }
}
