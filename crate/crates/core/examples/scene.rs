//! Generates a two-storey scene and prints a coarse elevation picture.
//!
//!     cargo run --release --example scene -- 7

use navtransfer::world::{generate_scene, save_world, SceneSpec};

fn main() -> navtransfer::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let world = generate_scene(&SceneSpec {
        seed,
        stairs: 1,
        clutter: 8,
        ..SceneSpec::default()
    })?;
    println!(
        "{}: {}x{} cells at {} m, {} components",
        world.name(),
        world.width(),
        world.height(),
        world.resolution(),
        world.component_count()
    );

    // one character per 6x6 block: '#' blocked, '.' ground, '^' raised
    let step = 6;
    for j in (0..world.height()).step_by(step).rev() {
        let line: String = (0..world.width())
            .step_by(step)
            .map(|i| {
                let c = world.index(i, j);
                match (world.is_free(c), world.cell_elevation(c)) {
                    (false, _) => '#',
                    (true, z) if z > 0.5 => '^',
                    _ => '.',
                }
            })
            .collect();
        println!("{line}");
    }
    println!("world file: {} bytes", save_world(&world).len());
    Ok(())
}
