mod astar;
mod dijkstra;
mod fmm;
mod grid;

pub use astar::{
    astar_plan, heading_slot, heuristic, LatticeState, DEFAULT_STOP_RADIUS, EXPANSION_ORDER, HEADING_SLOTS,
    EXACT_EXPANSIONS, MAX_EXPANSIONS,
};
pub use dijkstra::{dijkstra_distance, dijkstra_field};
pub use fmm::{extract_waypoint, fmm_field, fmm_field_until, TimeField};
pub use grid::{CellState, OccupancyGrid};
