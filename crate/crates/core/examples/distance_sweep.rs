//! det F and sqrt(tr CRLB) versus horizontal distance at h = 100 m.

use swarmloc::harness::{distance_sweep, SweepMode};
use swarmloc::model::{ConstraintSet, Scenario};

fn main() {
    let constraints = ConstraintSet::new(60.0, 100.0, 0.0, 5.0).unwrap();
    let scenario = Scenario::from_lists(0.0, 3.0, &[8.0, 12.0, 16.0], &[16; 3]).unwrap();
    for mode in [SweepMode::All, SweepMode::Single(0)] {
        let sweep = distance_sweep(&scenario, &constraints, mode, 300.0, 1.0).unwrap();
        println!(
            "{mode:?}: det F peaks at r = {} m, sqrt(tr CRLB) is smallest at r = {:?} m",
            sweep.argmax_det, sweep.argmin_sqrt_crlb
        );
        for row in sweep.rows.iter().step_by(40) {
            println!(
                "  r = {:>5} m  det F = {:.4e}  sqrt(tr CRLB) = {:.3} m",
                row.r,
                row.det,
                row.sqrt_crlb.unwrap_or(f64::INFINITY)
            );
        }
    }
}
