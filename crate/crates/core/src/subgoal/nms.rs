use super::candidate::SubgoalCandidate;
use super::radial::{heading_center, range_center, RadialMap, HEADING_BINS, RANGE_BINS};

pub const DEFAULT_NMS_SIGMA: f64 = 1.5;
pub const DEFAULT_TOP_K: usize = 5;
pub const DEFAULT_NMS_EPSILON: f64 = 1e-6;

/// Greedy peak extraction with multiplicative Gaussian suppression.
///
/// Each round takes the heaviest bin (lowest index on ties), emits a
/// candidate at its center carrying the Gaussian-window sum of the current
/// map, and scales the map by `1 - G`. `G` peaks at 1 on the chosen bin and
/// wraps around in heading. Output is ordered by mass, heaviest first, ties
/// by bin index.
pub fn gaussian_nms(map: &RadialMap, sigma: f64, k: usize, epsilon: f64) -> Vec<SubgoalCandidate> {
    let mut m = map.values().to_vec();
    let mut picked: Vec<(f64, usize)> = Vec::new();
    while picked.len() < k {
        let (best, peak) = m
            .iter()
            .enumerate()
            .fold((0usize, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        if peak < epsilon {
            break;
        }
        let (pr, ph) = RadialMap::bins(best);
        let mut mass = 0.0;
        for r in 0..RANGE_BINS {
            for h in 0..HEADING_BINS {
                let dr = r as f64 - pr as f64;
                let raw = (h as i64 - ph as i64).rem_euclid(HEADING_BINS as i64) as f64;
                let dh = raw.min(HEADING_BINS as f64 - raw);
                let g = (-(dr * dr + dh * dh) / (2.0 * sigma * sigma)).exp();
                let idx = RadialMap::index(r, h);
                mass += m[idx] * g;
                m[idx] *= 1.0 - g;
            }
        }
        picked.push((mass, best));
    }
    picked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    picked
        .into_iter()
        .map(|(mass, idx)| {
            let (r, h) = RadialMap::bins(idx);
            SubgoalCandidate::new(range_center(r), heading_center(h), 0.0, mass)
        })
        .collect()
}
