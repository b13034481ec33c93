use crate::geometry::Point2;
use crate::world::GridWorld;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

/// Planar occupancy grid. Planning treats `Unknown` as free.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    resolution: f64,
    width: usize,
    height: usize,
    /// World coordinates of the lower-left corner of cell `(0, 0)`.
    origin: Point2,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    pub fn new(resolution: f64, width: usize, height: usize, origin: Point2) -> Self {
        assert!(resolution > 0.0 && width > 0 && height > 0, "grid dims must be positive");
        Self {
            resolution,
            width,
            height,
            origin,
            cells: vec![CellState::Unknown; width * height],
        }
    }

    /// Fully observed planar view of a world: free cells are `Free`,
    /// everything else `Occupied`. Elevation is ignored.
    pub fn from_world(world: &GridWorld) -> Self {
        let cells = world
            .occupancy()
            .iter()
            .map(|&o| if o { CellState::Occupied } else { CellState::Free })
            .collect();
        Self {
            resolution: world.resolution(),
            width: world.width(),
            height: world.height(),
            origin: Point2::new(0.0, 0.0),
            cells,
        }
    }

    /// Builds a grid from rows of `#` (occupied), `?` (unknown) and anything
    /// else (free); the first row is the top.
    pub fn from_ascii(resolution: f64, rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows[0].len();
        let mut g = Self::new(resolution, width, height, Point2::new(0.0, 0.0));
        for (r, line) in rows.iter().enumerate() {
            let j = height - 1 - r;
            for (i, ch) in line.bytes().enumerate() {
                g.cells[j * width + i] = match ch {
                    b'#' => CellState::Occupied,
                    b'?' => CellState::Unknown,
                    _ => CellState::Free,
                };
            }
        }
        g
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
    pub fn origin(&self) -> Point2 {
        self.origin
    }
    pub fn len(&self) -> usize {
        self.cells.len()
    }
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    pub fn checked_index(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.height {
            None
        } else {
            Some(self.index(i as usize, j as usize))
        }
    }

    pub fn cell_at(&self, p: Point2) -> Option<usize> {
        self.checked_index(
            ((p.x - self.origin.x) / self.resolution).floor() as i64,
            ((p.y - self.origin.y) / self.resolution).floor() as i64,
        )
    }

    pub fn cell_center(&self, idx: usize) -> Point2 {
        let (i, j) = self.coords(idx);
        Point2::new(
            self.origin.x + (i as f64 + 0.5) * self.resolution,
            self.origin.y + (j as f64 + 0.5) * self.resolution,
        )
    }

    pub fn get(&self, idx: usize) -> CellState {
        self.cells[idx]
    }

    pub fn set(&mut self, idx: usize, state: CellState) {
        self.cells[idx] = state;
    }

    pub fn is_blocked(&self, idx: usize) -> bool {
        self.cells[idx] == CellState::Occupied
    }
}
