//! Analytic FIM against a finite-difference Fisher reconstruction.

use swarmloc::fim::{fim, fim_fd_oracle};
use swarmloc::model::{ConstraintSet, Scenario, TargetPosition};
use swarmloc::synthesis::plan_below_half;

fn main() {
    let scenario =
        Scenario::from_lists(-30.0, 2.7, &[4.0, 9.0, 12.0, 20.0], &[10, 12, 8, 16]).unwrap();
    let constraints = ConstraintSet::new(80.0, 50.0, 3.0, 4.0).unwrap();
    let anchor = TargetPosition::new(120.0, 35.0).unwrap();
    let plan = plan_below_half(&scenario, &constraints, anchor, 0.8)
        .unwrap()
        .plan;
    // evaluate a little away from the anchor, where the plan is not symmetric
    let target = TargetPosition::new(131.0, 28.5).unwrap();
    let exact = fim(&plan, target, &scenario).unwrap();
    for step in [1e-1, 1e-2, 1e-3, 1e-4] {
        let fd = fim_fd_oracle(&plan, target, &scenario, step).unwrap();
        println!(
            "step {step:>6} m: relative Frobenius error {:.3e}",
            (exact.matrix - fd).norm() / exact.matrix.norm()
        );
    }
    println!("F = {}", exact.matrix);
}
