use super::radial::{range_center, RadialKind, RadialMap, HEADING_BINS, RANGE_BINS, RANGE_BIN_SIZE};
use crate::subgoal::radial::range_bin;
use crate::world::ElevationProbe;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProposerMode {
    Freespace,
    ElevAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProposerConfig {
    /// Range where the clearance score peaks, meters.
    pub preferred_radius: f64,
    pub radius_sigma: f64,
    /// Bins centered closer than this carry no mass.
    pub min_range: f64,
    /// Distance to the obstacle over which the score ramps up to full.
    pub wall_margin: f64,
    /// Heading bins on each side whose free range bounds a bin's clearance.
    pub lateral_bins: usize,
}

impl Default for ProposerConfig {
    fn default() -> Self {
        Self {
            preferred_radius: 2.25,
            radius_sigma: 0.75,
            min_range: 0.5,
            wall_margin: 0.4,
            lateral_bins: 2,
        }
    }
}

/// Clearance heatmap over the scan's free space, normalized to sum 1.
///
/// A bin scores only when it lies strictly before the first obstacle along
/// its heading. The score is a Gaussian in range around the preferred radius
/// times a clearance ramp against the nearest obstacle among the neighboring
/// headings. In elevation-aware mode each probed ramp also contributes a
/// unit-peak mass at its landing bin, beyond the scanner's obstacle.
pub fn propose_heatmap(
    scan: &RadialMap,
    probe: Option<&ElevationProbe>,
    mode: ProposerMode,
    cfg: &ProposerConfig,
) -> RadialMap {
    let mut out = RadialMap::zeros(RadialKind::Prob);
    let free_range: Vec<f64> = (0..HEADING_BINS)
        .map(|h| scan.first_blocked(h) as f64 * RANGE_BIN_SIZE)
        .collect();
    for h in 0..HEADING_BINS {
        let first = scan.first_blocked(h);
        let lateral = (0..=2 * cfg.lateral_bins)
            .map(|k| free_range[(h + HEADING_BINS * 2 + k - cfg.lateral_bins) % HEADING_BINS])
            .fold(f64::INFINITY, f64::min);
        for r in 0..first {
            let rc = range_center(r);
            if rc < cfg.min_range {
                continue;
            }
            let clear = ((lateral - rc) / cfg.wall_margin).clamp(0.0, 1.0);
            let z = (rc - cfg.preferred_radius) / cfg.radius_sigma;
            out.set(r, h, (-0.5 * z * z).exp() * clear);
        }
    }
    if mode == ProposerMode::ElevAware {
        if let Some(probe) = probe {
            for (h, reading) in probe.readings.iter().enumerate() {
                let Some(ramp) = reading else { continue };
                let (r, _) = range_bin(ramp.exit_range);
                if r < RANGE_BINS && out.get(r, h) < 1.0 {
                    out.set(r, h, 1.0);
                }
            }
        }
    }
    out.normalize();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgoal::radial::heading_bin;
    use crate::world::{elevation_probe, laser_scan, GridWorld};

    fn corridor() -> GridWorld {
        // 1.2 m wide corridor along +x, closed everywhere else
        let (w, h) = (200, 60);
        let mut occ = vec![true; w * h];
        for j in 18..42 {
            for i in 2..198 {
                occ[j * w + i] = false;
            }
        }
        GridWorld::new("corridor", 0.05, w, h, 0.15, occ, vec![0.0; w * h]).unwrap()
    }

    #[test]
    fn corridor_argmax_is_dead_ahead() {
        let w = corridor();
        let pose = w.pose(1.0, 1.5, 0.0).unwrap();
        let m = propose_heatmap(&laser_scan(&w, &pose), None, ProposerMode::Freespace, &ProposerConfig::default());
        assert!((m.sum() - 1.0).abs() < 1e-9);
        let (idx, _) = m
            .values()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let (_, h) = RadialMap::bins(idx);
        assert!(h == heading_bin(0.0) || h == HEADING_BINS - 1, "heading bin {h}");
    }

    #[test]
    fn no_mass_at_or_beyond_obstacles() {
        let w = corridor();
        let pose = w.pose(3.0, 1.5, 30.0).unwrap();
        let scan = laser_scan(&w, &pose);
        let m = propose_heatmap(&scan, None, ProposerMode::Freespace, &ProposerConfig::default());
        for r in 0..RANGE_BINS {
            for h in 0..HEADING_BINS {
                if scan.is_blocked(r, h) {
                    assert_eq!(m.get(r, h), 0.0);
                }
            }
        }
    }

    fn ramp_world() -> GridWorld {
        // flat floor for x < 2, ramp rising 0.8 m/m to 1.2 m, landing after
        let (w, h) = (200, 40);
        let mut elev = vec![0.0; w * h];
        for j in 0..h {
            for i in 0..w {
                let x = (i as f64 + 0.5) * 0.05;
                elev[j * w + i] = ((x - 2.0) * 0.8).clamp(0.0, 1.2);
            }
        }
        let mut occ = vec![false; w * h];
        for i in 0..w {
            occ[i] = true;
            occ[(h - 1) * w + i] = true;
        }
        GridWorld::new("ramp", 0.05, w, h, 0.15, occ, elev).unwrap()
    }

    #[test]
    fn freespace_misses_the_ramp_and_elev_aware_finds_it() {
        let w = ramp_world();
        let pose = w.pose(1.0, 1.0, 0.0).unwrap();
        let scan = laser_scan(&w, &pose);
        let probe = elevation_probe(&w, &pose);
        let cfg = ProposerConfig::default();
        let free = propose_heatmap(&scan, Some(&probe), ProposerMode::Freespace, &cfg);
        let ahead = heading_bin(0.0);
        let hit = scan.first_blocked(ahead);
        assert!(hit < RANGE_BINS);
        assert!((hit..RANGE_BINS).all(|r| free.get(r, ahead) == 0.0));
        let aware = propose_heatmap(&scan, Some(&probe), ProposerMode::ElevAware, &cfg);
        assert!((hit..RANGE_BINS).any(|r| aware.get(r, ahead) > 0.0));
        assert!((aware.sum() - 1.0).abs() < 1e-9);
    }
}
