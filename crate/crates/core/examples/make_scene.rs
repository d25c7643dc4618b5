//! Writes a synthetic lane scene to a PGM file, for feeding the CLI.
//!
//! Usage: `cargo run -p lanehough --example make_scene -- [PATH] [SIZE] [SEED]`

use lanehough::synth::lane_scene;
use lanehough::{save_image, SaveFormat};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "scene.pgm".into());
    let size: u32 = args
        .next()
        .map(|s| s.parse().expect("SIZE must be an integer"))
        .unwrap_or(512);
    let seed: u64 = args
        .next()
        .map(|s| s.parse().expect("SEED must be an integer"))
        .unwrap_or(42);

    let scene = lane_scene(size, size, seed);
    save_image(&scene.image, &path, SaveFormat::Pgm).expect("write scene");
    for line in &scene.lines {
        println!("planted: theta {:>5.1} deg, r {:>8.2}", line.theta_deg, line.r);
    }
    println!("{size}x{size} scene written to {path}");
}
