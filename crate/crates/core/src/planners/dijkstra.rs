use super::grid::OccupancyGrid;
use crate::error::{Error, Result};
use crate::geometry::{MinItem, Point2};
use std::collections::BinaryHeap;

/// Shortest-path lengths from `source` over the 8-connected graph of
/// non-occupied cells. Diagonal moves need both corner cells open.
pub fn dijkstra_field(grid: &OccupancyGrid, source: usize) -> Vec<f64> {
    let h = grid.resolution();
    let diag = h * std::f64::consts::SQRT_2;
    let mut dist = vec![f64::INFINITY; grid.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(MinItem { key: 0.0, id: source });
    while let Some(MinItem { key, id }) = heap.pop() {
        if key > dist[id] {
            continue;
        }
        let (i, j) = grid.coords(id);
        let (i, j) = (i as i64, j as i64);
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let Some(n) = grid.checked_index(i + di, j + dj) else {
                    continue;
                };
                if grid.is_blocked(n) {
                    continue;
                }
                let w = if di != 0 && dj != 0 {
                    let open = |a: i64, b: i64| grid.checked_index(a, b).is_some_and(|c| !grid.is_blocked(c));
                    if !(open(i + di, j) && open(i, j + dj)) {
                        continue;
                    }
                    diag
                } else {
                    h
                };
                let nd = key + w;
                if nd < dist[n] {
                    dist[n] = nd;
                    heap.push(MinItem { key: nd, id: n });
                }
            }
        }
    }
    dist
}

/// Exact shortest path between the cells containing `a` and `b`, or `None`
/// when disconnected.
pub fn dijkstra_distance(grid: &OccupancyGrid, a: Point2, b: Point2) -> Result<Option<f64>> {
    let open = |p: Point2| {
        grid.cell_at(p)
            .filter(|&c| !grid.is_blocked(c))
            .ok_or(Error::NotNavigable { x: p.x, y: p.y })
    };
    let (ca, cb) = (open(a)?, open(b)?);
    let d = dijkstra_field(grid, ca)[cb];
    Ok(d.is_finite().then_some(d))
}
