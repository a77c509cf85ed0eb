//! Brute-force det F over the bearings of UAVs 2 and 3 and its maximizers.
//!
//! `cargo run --example angle_grid -- out.csv` also writes the full surface.

use swarmloc::harness::{grid_det, write_grid_csv};
use swarmloc::model::{ConstraintSet, Scenario};

fn main() {
    let constraints = ConstraintSet::new(60.0, 100.0, 0.0, 5.0).unwrap();
    let scenario = Scenario::from_lists(0.0, 3.0, &[8.0, 12.0, 16.0], &[16; 3]).unwrap();
    let grid = grid_det(&scenario, &constraints, 1.0).unwrap();
    println!("max det F = {:.6e}", grid.max);
    for (b2, b3) in &grid.argmax {
        println!("  beta2 = {b2:>5} deg, beta3 = {b3:>5} deg");
    }
    if let Some(path) = std::env::args().nth(1) {
        write_grid_csv(&grid, std::fs::File::create(&path).unwrap()).unwrap();
        println!("surface written to {path}");
    }
}
