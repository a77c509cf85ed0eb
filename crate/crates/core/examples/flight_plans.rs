//! Flight states and the plan chosen for each as the speed limit grows.

use swarmloc::model::{validate_plan, ConstraintSet, Scenario, TargetPosition};
use swarmloc::synthesis::{plan_auto, plan_beyond_half, plan_full_circle};

fn main() {
    let scenario = Scenario::from_lists(0.0, 3.0, &[8.0, 12.0, 16.0], &[16; 3]).unwrap();
    let target = TargetPosition::new(250.0, -40.0).unwrap();
    for speed in [0.0, 2.0, 5.0, 10.0] {
        let constraints = ConstraintSet::new(60.0, 100.0, speed, 5.0).unwrap();
        let auto = plan_auto(&scenario, &constraints, target).unwrap();
        let feasible = validate_plan(auto.plan(), &constraints, target).is_feasible();
        let first: Vec<String> = auto
            .plan()
            .track(0)
            .iter()
            .take(4)
            .map(|p| format!("{:.1}", p.beta().to_degrees()))
            .collect();
        println!(
            "c_max = {speed:>4} m/s: {:?} -> {} plan, UAV 1 starts at [{} ...] deg, det F = {:.6e} (bound {:.6e}), feasible {feasible}",
            auto.flight_state,
            auto.synthesized.configuration,
            first.join(", "),
            auto.achieved_det,
            auto.synthesized.bound,
        );
    }

    // the flipped array has the same information as the full uniform array
    let constraints = ConstraintSet::new(60.0, 100.0, 40.0, 5.0).unwrap();
    let full = plan_full_circle(&scenario, &constraints, target).unwrap();
    let flipped = plan_beyond_half(&scenario, &constraints, target, &[8, 10, 12]).unwrap();
    let det = |p: &swarmloc::model::MeasurementPlan| {
        swarmloc::fim::fim(p, target, &scenario).unwrap().det
    };
    println!(
        "full circle det {:.9e}, flipped array det {:.9e}",
        det(&full.plan),
        det(&flipped.plan)
    );
}
