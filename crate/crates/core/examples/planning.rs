//! Plans across a cluttered scene with the action-lattice A* and compares
//! the fast-marching arrival time with the exact geodesic.

use navtransfer::planners::{astar_plan, extract_waypoint, fmm_field, OccupancyGrid, DEFAULT_STOP_RADIUS};
use navtransfer::world::{generate_scene, Action, SceneSpec};

fn main() -> navtransfer::Result<()> {
    let world = generate_scene(&SceneSpec { seed: 11, clutter: 14, ..SceneSpec::default() })?;
    let graph = navtransfer::navgraph::build_graph(&world, 11, &Default::default())?;
    let (a, b) = (graph.node(0)?, graph.node(graph.len() / 2)?);
    let start = world.pose(a.x, a.y, 0.0)?;
    let target = b.planar();

    let plan = astar_plan(&world, &start, target, DEFAULT_STOP_RADIUS)?;
    let forward = plan.iter().filter(|&&x| x == Action::Forward).count();
    let mut pose = start;
    for &act in &plan {
        pose = world.step_action(&pose, act).0;
    }
    println!(
        "A*: {} actions ({forward} forward), ends {:.3} m from the target",
        plan.len(),
        pose.planar().dist(&target)
    );

    let grid = OccupancyGrid::from_world(&world);
    let field = fmm_field(&grid, target)?;
    let geodesic = world.geodesic_distance(start.planar(), target)?.unwrap_or(f64::INFINITY);
    println!(
        "FMM arrival {:.2} m, geodesic {geodesic:.2} m, straight {:.2} m",
        field.at_point(start.planar()),
        start.planar().dist(&target)
    );
    let w = extract_waypoint(&field, &grid, start.planar(), 0.25)?;
    println!("first waypoint along the descent: ({:.2}, {:.2})", w.x, w.y);
    Ok(())
}
