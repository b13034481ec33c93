//! Procedural indoor scenes: rooms on a slot lattice joined by straight
//! corridors, some of which climb between floor levels as stair ramps.

use super::GridWorld;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneSpec {
    pub seed: u64,
    pub rooms: usize,
    /// Meters.
    pub corridor_width: f64,
    pub stairs: usize,
    /// Elevation change across one stair, meters.
    pub stair_rise: f64,
    /// Rise over run of a stair ramp.
    pub stair_slope: f64,
    /// Grid dimensions in cells.
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub max_step: f64,
    /// Number of box obstacles scattered inside rooms.
    pub clutter: usize,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            rooms: 6,
            corridor_width: 1.2,
            stairs: 0,
            stair_rise: 1.2,
            stair_slope: 0.8,
            width: 360,
            height: 360,
            resolution: super::DEFAULT_RESOLUTION,
            max_step: super::DEFAULT_MAX_STEP,
            clutter: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Room {
    x0: usize,
    y0: usize,
    x1: usize, // exclusive
    y1: usize,
}

struct Canvas {
    width: usize,
    occ: Vec<bool>,
    elev: Vec<f64>,
}

impl Canvas {
    fn carve(&mut self, i: usize, j: usize, z: f64) {
        let k = j * self.width + i;
        self.occ[k] = false;
        self.elev[k] = z;
    }

    fn fill(&mut self, i: usize, j: usize) {
        let k = j * self.width + i;
        self.occ[k] = true;
        self.elev[k] = f64::NAN;
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let n = parent[y];
        parent[y] = r;
        y = n;
    }
    r
}

/// Generates a connected world; identical specs give identical worlds.
pub fn generate_scene(spec: &SceneSpec) -> Result<GridWorld> {
    if !(spec.resolution > 0.0) || spec.width < 3 || spec.height < 3 {
        return Err(Error::InvalidParameter(
            "scene needs positive resolution and at least 3x3 cells".into(),
        ));
    }
    if !(spec.corridor_width > 0.0 && spec.stair_rise >= 0.0 && spec.stair_slope > 0.0) {
        return Err(Error::InvalidParameter(
            "corridor width and stair slope must be positive, stair rise non-negative".into(),
        ));
    }
    let res = spec.resolution;
    let cells = |m: f64| (m / res).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut canvas = Canvas {
        width: spec.width,
        occ: vec![true; spec.width * spec.height],
        elev: vec![f64::NAN; spec.width * spec.height],
    };
    let mut rooms = Vec::new();

    if spec.rooms == 0 {
        if spec.stairs > 0 {
            return Err(Error::Infeasible("stairs need at least two rooms".into()));
        }
        for j in 1..spec.height - 1 {
            for i in 1..spec.width - 1 {
                canvas.carve(i, j, 0.0);
            }
        }
        rooms.push(Room {
            x0: 1,
            y0: 1,
            x1: spec.width - 1,
            y1: spec.height - 1,
        });
    } else {
        let n = spec.rooms;
        let cols = (n as f64).sqrt().ceil() as usize;
        let rows = n.div_ceil(cols);
        let slot_w = (spec.width - 2) / cols;
        let slot_h = (spec.height - 2) / rows;
        let band = cells(spec.corridor_width).max(1);
        let ramp_len = if spec.stairs > 0 {
            cells(spec.stair_rise / spec.stair_slope)
        } else {
            0
        };
        let gap = cells(1.5).max(ramp_len + cells(0.6));
        let min_room = cells(2.0).max(band + cells(0.6));
        if slot_w < min_room + gap || slot_h < min_room + gap {
            return Err(Error::Infeasible(format!(
                "{n} rooms do not fit in {}x{} cells",
                spec.width, spec.height
            )));
        }
        if ramp_len > 0 && spec.stair_rise / ramp_len as f64 > spec.max_step {
            return Err(Error::Infeasible(
                "stair slope exceeds the per-cell step limit".into(),
            ));
        }

        let place = |rng: &mut ChaCha8Rng, origin: usize, slot: usize| -> (usize, usize) {
            let size = rng.gen_range(min_room..=slot - gap);
            let center = origin + slot / 2;
            let half_band = band / 2 + 1;
            let lo = (origin + gap / 2).max((center + half_band).saturating_sub(size));
            let hi = (origin + slot - gap / 2 - size).min(center - half_band);
            let start = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            (start, start + size)
        };
        for s in 0..n {
            let (r, c) = (s / cols, s % cols);
            let (x0, x1) = place(&mut rng, 1 + c * slot_w, slot_w);
            let (y0, y1) = place(&mut rng, 1 + r * slot_h, slot_h);
            rooms.push(Room { x0, y0, x1, y1 });
        }

        let mut edges = Vec::new();
        for s in 0..n {
            if (s % cols) + 1 < cols && s + 1 < n {
                edges.push((s, s + 1));
            }
            if s + cols < n {
                edges.push((s, s + cols));
            }
        }
        edges.shuffle(&mut rng);
        let mut parent: Vec<usize> = (0..n).collect();
        let mut tree = Vec::new();
        let mut spare = Vec::new();
        for &(a, b) in &edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                tree.push((a, b));
            } else {
                spare.push((a, b));
            }
        }
        if spec.stairs > tree.len() {
            return Err(Error::Infeasible(format!(
                "{} stairs requested but only {} room links exist",
                spec.stairs,
                tree.len()
            )));
        }
        let mut stair_flags = vec![false; tree.len()];
        let mut order: Vec<usize> = (0..tree.len()).collect();
        order.shuffle(&mut rng);
        for &k in order.iter().take(spec.stairs) {
            stair_flags[k] = true;
        }

        let mut level: Vec<Option<f64>> = vec![None; n];
        level[0] = Some(0.0);
        let mut frontier = vec![0usize];
        while let Some(a) = frontier.pop() {
            for (k, &(u, v)) in tree.iter().enumerate() {
                let (from, to) = if u == a { (u, v) } else if v == a { (v, u) } else { continue };
                if level[to].is_some() {
                    continue;
                }
                let base = level[from].expect("assigned");
                let z = if stair_flags[k] {
                    let up = base <= 0.0 || rng.gen_bool(0.5);
                    if up {
                        base + spec.stair_rise
                    } else {
                        base - spec.stair_rise
                    }
                } else {
                    base
                };
                level[to] = Some(z);
                frontier.push(to);
            }
        }
        let level: Vec<f64> = level.into_iter().map(|l| l.expect("tree spans rooms")).collect();

        let mut links: Vec<(usize, usize)> = tree.clone();
        for &(a, b) in &spare {
            if level[a] == level[b] && rng.gen_bool(0.35) {
                links.push((a, b));
            }
        }

        for (s, room) in rooms.iter().enumerate() {
            for j in room.y0..room.y1 {
                for i in room.x0..room.x1 {
                    canvas.carve(i, j, level[s]);
                }
            }
        }
        for &(a, b) in &links {
            let (a, b) = (a.min(b), a.max(b));
            let (ra, rb) = (rooms[a], rooms[b]);
            let (za, zb) = (level[a], level[b]);
            let horizontal = b == a + 1;
            let (start, end) = if horizontal { (ra.x1, rb.x0) } else { (ra.y1, rb.y0) };
            let len = end - start;
            let ramp = if za != zb { ramp_len.min(len) } else { 0 };
            let ramp_start = (len - ramp) / 2;
            let center = if horizontal {
                1 + (a / cols) * slot_h + slot_h / 2
            } else {
                1 + (a % cols) * slot_w + slot_w / 2
            };
            let lo = center - band / 2;
            for k in 0..len {
                let z = if ramp == 0 || k < ramp_start {
                    za
                } else if k >= ramp_start + ramp {
                    zb
                } else {
                    za + (zb - za) * ((k - ramp_start) as f64 + 0.5) / ramp as f64
                };
                for w in lo..lo + band {
                    if horizontal {
                        canvas.carve(start + k, w, z);
                    } else {
                        canvas.carve(w, start + k, z);
                    }
                }
            }
        }
    }

    for z in canvas.elev.iter_mut() {
        if z.is_finite() {
            *z = (*z * 1e6).round() / 1e6;
        }
    }

    let build = |canvas: &Canvas| {
        GridWorld::new(
            format!("scene-{}", spec.seed),
            res,
            spec.width,
            spec.height,
            spec.max_step,
            canvas.occ.clone(),
            canvas.elev.clone(),
        )
    };

    let margin = cells(0.6);
    let mut placed = 0;
    let mut attempts = 0;
    while placed < spec.clutter && attempts < spec.clutter * 50 {
        attempts += 1;
        let room = rooms[rng.gen_range(0..rooms.len())];
        let bw = cells(rng.gen_range(0.3..0.9)).max(1);
        let bh = cells(rng.gen_range(0.3..0.9)).max(1);
        if room.x1 - room.x0 < 2 * margin + bw + 1 || room.y1 - room.y0 < 2 * margin + bh + 1 {
            continue;
        }
        let x = rng.gen_range(room.x0 + margin..room.x1 - margin - bw);
        let y = rng.gen_range(room.y0 + margin..room.y1 - margin - bh);
        let saved: Vec<(usize, bool, f64)> = (y..y + bh)
            .flat_map(|j| (x..x + bw).map(move |i| j * spec.width + i))
            .map(|k| (k, canvas.occ[k], canvas.elev[k]))
            .collect();
        for j in y..y + bh {
            for i in x..x + bw {
                canvas.fill(i, j);
            }
        }
        if build(&canvas)?.component_count() == 1 {
            placed += 1;
        } else {
            for (k, o, z) in saved {
                canvas.occ[k] = o;
                canvas.elev[k] = z;
            }
        }
    }

    let world = build(&canvas)?;
    if world.component_count() != 1 {
        return Err(Error::Infeasible("generated scene is not connected".into()));
    }
    Ok(world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::save_world;

    #[test]
    fn same_seed_same_world() {
        let spec = SceneSpec {
            seed: 7,
            clutter: 4,
            ..SceneSpec::default()
        };
        let a = generate_scene(&spec).unwrap();
        let b = generate_scene(&spec).unwrap();
        assert_eq!(save_world(&a), save_world(&b));
    }

    #[test]
    fn zero_rooms_is_one_open_room() {
        let spec = SceneSpec {
            rooms: 0,
            width: 10,
            height: 10,
            ..SceneSpec::default()
        };
        let w = generate_scene(&spec).unwrap();
        assert_eq!(w.component_count(), 1);
        let free = w.occupancy().iter().filter(|&&o| !o).count();
        assert_eq!(free, 64);
    }

    #[test]
    fn stairs_produce_elevation_change() {
        let spec = SceneSpec {
            seed: 3,
            rooms: 4,
            stairs: 2,
            stair_rise: 1.2,
            ..SceneSpec::default()
        };
        let w = generate_scene(&spec).unwrap();
        let zs: Vec<f64> = w
            .elevation()
            .iter()
            .zip(w.occupancy())
            .filter(|(_, &o)| !o)
            .map(|(&z, _)| z)
            .collect();
        let lo = zs.iter().cloned().fold(f64::MAX, f64::min);
        let hi = zs.iter().cloned().fold(f64::MIN, f64::max);
        assert!(hi - lo >= 1.2 - 1e-9, "{lo} {hi}");
        assert_eq!(w.component_count(), 1);
    }

    #[test]
    fn crowded_rooms_are_infeasible() {
        let spec = SceneSpec {
            rooms: 50,
            width: 100,
            height: 100,
            ..SceneSpec::default()
        };
        assert!(matches!(generate_scene(&spec), Err(Error::Infeasible(_))));
    }
}
