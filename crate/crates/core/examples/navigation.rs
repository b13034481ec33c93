//! Sends the oracle and the local policy to the same short-range targets
//! and compares how often each misses by more than a threshold.

use navtransfer::navigators::{local_navigate, oracle_navigate, project_target, LocalPolicyConfig};
use navtransfer::planners::DEFAULT_STOP_RADIUS;
use navtransfer::world::{generate_scene, SceneSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> navtransfer::Result<()> {
    let world = generate_scene(&SceneSpec { seed: 5, clutter: 14, ..SceneSpec::default() })?;
    let graph = navtransfer::navgraph::build_graph(&world, 5, &Default::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = LocalPolicyConfig::default();
    let (mut oracle, mut local) = (Vec::new(), Vec::new());
    for node in graph.nodes() {
        let pose = world.pose(node.x, node.y, 15.0 * rng.gen_range(0..24) as f64)?;
        let (r, theta) = (rng.gen_range(0.5..4.0), rng.gen_range(-180.0..180.0));
        let Ok(target) = project_target(&world, &pose, r, theta) else {
            continue;
        };
        oracle.push(oracle_navigate(&world, &pose, target, DEFAULT_STOP_RADIUS)?.nav_error);
        local.push(local_navigate(&world, &pose, r, theta, &cfg)?.nav_error);
    }
    println!("{} targets", oracle.len());
    for t in [0.2, 0.5, 1.0] {
        let above = |v: &[f64]| 100.0 * v.iter().filter(|&&e| e > t).count() as f64 / v.len() as f64;
        println!("error > {t:.1} m: oracle {:5.1}%  local {:5.1}%", above(&oracle), above(&local));
    }
    Ok(())
}
