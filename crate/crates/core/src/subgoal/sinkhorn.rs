//! Entropic optimal transport by log-domain Sinkhorn iteration with
//! epsilon scaling, and the debiased Sinkhorn divergence built on it.

use super::radial::{heading_center, range_center, RadialMap};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SinkhornConfig {
    /// Entropic regularization, in cost units (meters).
    pub epsilon: f64,
    /// Budget over all scaling stages.
    pub max_iters: usize,
    /// L1 row-marginal error at which the final stage stops.
    pub tol: f64,
}

impl Default for SinkhornConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            max_iters: 10_000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtSolution {
    /// Transport cost `<P, C>` of the entropic plan.
    pub cost: f64,
    /// Row-major `n x m` plan over the full (not support-restricted) inputs.
    pub plan: Vec<f64>,
    pub iterations: usize,
    pub marginal_error: f64,
}

const MASS_TOL: f64 = 1e-6;

fn check_normalized(w: &[f64]) -> Result<()> {
    let s: f64 = w.iter().sum();
    if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || (s - 1.0).abs() > MASS_TOL {
        return Err(Error::NotNormalized(s));
    }
    Ok(())
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Entropic OT between probability vectors `a` (length n) and `b` (length
/// m) under the row-major cost matrix `cost`.
pub fn entropic_ot(a: &[f64], b: &[f64], cost: &[f64], cfg: &SinkhornConfig) -> Result<OtSolution> {
    solve(a, b, cost, cfg, false)
}

/// Log-domain Sinkhorn with epsilon scaling. `averaged` replaces the
/// alternating update by a simultaneous one whose result is averaged with
/// the previous potentials.
///
/// Alternating updates stall when support clusters sit many epsilons apart
/// and carry matching mass, as in `OT(a, a)`: the offset between the
/// clusters' potentials is then an almost neutral direction and the
/// marginal error shrinks by about `1 - exp(-d/eps)` per sweep. Averaging
/// damps that mode but needs more sweeps on generic inputs, and can itself
/// stall at very small epsilon.
fn solve(a: &[f64], b: &[f64], cost: &[f64], cfg: &SinkhornConfig, averaged: bool) -> Result<OtSolution> {
    let (n, m) = (a.len(), b.len());
    if cost.len() != n * m {
        return Err(Error::DimensionMismatch {
            field: "cost matrix",
            expected: n * m,
            got: cost.len(),
        });
    }
    if !(cfg.epsilon > 0.0 && cfg.tol > 0.0 && cfg.max_iters > 0) {
        return Err(Error::InvalidParameter("sinkhorn needs epsilon, tol and max_iters > 0".into()));
    }
    check_normalized(a)?;
    check_normalized(b)?;
    let rows: Vec<usize> = (0..n).filter(|&i| a[i] > 0.0).collect();
    let cols: Vec<usize> = (0..m).filter(|&j| b[j] > 0.0).collect();
    let la: Vec<f64> = rows.iter().map(|&i| a[i].ln()).collect();
    let lb: Vec<f64> = cols.iter().map(|&j| b[j].ln()).collect();
    let c = |p: usize, q: usize| cost[rows[p] * m + cols[q]];
    let cmax = (0..rows.len())
        .flat_map(|p| (0..cols.len()).map(move |q| (p, q)))
        .map(|(p, q)| c(p, q))
        .fold(0.0, f64::max);
    let row_update = |g: &[f64], eps: f64| -> Vec<f64> {
        (0..rows.len())
            .map(|p| -eps * log_sum_exp((0..cols.len()).map(|q| lb[q] + (g[q] - c(p, q)) / eps)))
            .collect()
    };
    let col_update = |f: &[f64], eps: f64| -> Vec<f64> {
        (0..cols.len())
            .map(|q| -eps * log_sum_exp((0..rows.len()).map(|p| la[p] + (f[p] - c(p, q)) / eps)))
            .collect()
    };
    let plan_entry = |f: &[f64], g: &[f64], eps: f64, p: usize, q: usize| (la[p] + lb[q] + (f[p] + g[q] - c(p, q)) / eps).exp();

    let mut f = vec![0.0; rows.len()];
    let mut g = vec![0.0; cols.len()];
    let mut eps = cmax.max(cfg.epsilon);
    let mut iterations = 0;
    let mut err;
    loop {
        let last = eps <= cfg.epsilon;
        let stage_tol = if last { cfg.tol } else { cfg.tol.max(1e-3) };
        loop {
            if averaged {
                let (ft, gt) = (row_update(&g, eps), col_update(&f, eps));
                f.iter_mut().zip(ft).for_each(|(x, y)| *x = 0.5 * (*x + y));
                g.iter_mut().zip(gt).for_each(|(x, y)| *x = 0.5 * (*x + y));
            } else {
                f = row_update(&g, eps);
                g = col_update(&f, eps);
            }
            iterations += 1;
            err = (0..rows.len())
                .map(|p| ((0..cols.len()).map(|q| plan_entry(&f, &g, eps, p, q)).sum::<f64>() - a[rows[p]]).abs())
                .sum::<f64>();
            // alternating updates leave the columns exact
            if averaged {
                err += (0..cols.len())
                    .map(|q| ((0..rows.len()).map(|p| plan_entry(&f, &g, eps, p, q)).sum::<f64>() - b[cols[q]]).abs())
                    .sum::<f64>();
            }
            if err <= stage_tol {
                break;
            }
            if iterations >= cfg.max_iters {
                return Err(Error::NotConverged {
                    iterations,
                    marginal_error: err,
                });
            }
        }
        if last {
            break;
        }
        eps = (eps * 0.5).max(cfg.epsilon);
    }

    let mut plan = vec![0.0; n * m];
    let mut total = 0.0;
    for p in 0..rows.len() {
        for q in 0..cols.len() {
            let v = plan_entry(&f, &g, eps, p, q);
            plan[rows[p] * m + cols[q]] = v;
            total += v * c(p, q);
        }
    }
    Ok(OtSolution {
        cost: total,
        plan,
        iterations,
        marginal_error: err,
    })
}

fn point_costs(x: &[(Point2, f64)], y: &[(Point2, f64)]) -> Vec<f64> {
    x.iter().flat_map(|p| y.iter().map(move |q| p.0.dist(&q.0))).collect()
}

/// Debiased divergence `OT(a,b) - OT(a,a)/2 - OT(b,b)/2` between weighted
/// planar point sets, clamped at zero.
///
/// Identical inputs give exactly zero; the self term is still solved so
/// that invalid weights are reported. Self terms use averaged updates. The
/// cross term uses alternating ones and retries with averaged updates only
/// if those run out of budget: each scheme has inputs on which it stalls
/// and the other does not.
pub fn sinkhorn_divergence_points(a: &[(Point2, f64)], b: &[(Point2, f64)], cfg: &SinkhornConfig) -> Result<f64> {
    let weights = |x: &[(Point2, f64)]| x.iter().map(|p| p.1).collect::<Vec<f64>>();
    let (wa, wb) = (weights(a), weights(b));
    let aa = solve(&wa, &wa, &point_costs(a, a), cfg, true)?.cost;
    if a == b {
        return Ok(0.0);
    }
    let bb = solve(&wb, &wb, &point_costs(b, b), cfg, true)?.cost;
    let cross = point_costs(a, b);
    let ab = match solve(&wa, &wb, &cross, cfg, false) {
        Err(Error::NotConverged { .. }) => solve(&wa, &wb, &cross, cfg, true)?,
        r => r?,
    }
    .cost;
    Ok((ab - 0.5 * aa - 0.5 * bb).max(0.0))
}

/// Cartesian center of a radial bin in the agent frame.
pub fn bin_point(range: usize, heading: usize) -> Point2 {
    Point2::new(0.0, 0.0).offset(range_center(range), heading_center(heading))
}

fn support(map: &RadialMap) -> Vec<(Point2, f64)> {
    map.values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| {
            let (r, h) = RadialMap::bins(i);
            (bin_point(r, h), v)
        })
        .collect()
}

/// Sinkhorn divergence between two probability radial maps, with cost the
/// Euclidean distance between Cartesian bin centers.
pub fn sinkhorn_divergence(a: &RadialMap, b: &RadialMap, cfg: &SinkhornConfig) -> Result<f64> {
    check_normalized(a.values())?;
    check_normalized(b.values())?;
    sinkhorn_divergence_points(&support(a), &support(b), cfg)
}
