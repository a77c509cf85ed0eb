//! Optimal hovering geometry for the four three-UAV noise cases.

use swarmloc::fim::{fim, WeightSet};
use swarmloc::model::{ConstraintSet, Scenario, TargetPosition};
use swarmloc::synthesis::{classify, plan_hovering, radial_optimum};

fn main() {
    let constraints = ConstraintSet::new(60.0, 100.0, 0.0, 5.0).unwrap();
    let radial = radial_optimum(&constraints);
    println!(
        "r* = {} m, h* = {} m, elevation {:.1} deg",
        radial.r_star,
        radial.h_star,
        radial.elevation().to_degrees()
    );
    let target = TargetPosition::ORIGIN;
    for (name, vars) in [
        ("a", [16.0, 16.0, 16.0]),
        ("b", [8.0, 12.0, 16.0]),
        ("c", [2.0, 8.0, 16.0]),
        ("d", [2.0, 16.0, 16.0]),
    ] {
        let scenario = Scenario::from_lists(0.0, 3.0, &vars, &[16; 3]).unwrap();
        let weights = WeightSet::at_common_range(&scenario, radial.r_star, radial.h_star);
        let class = classify(&weights).unwrap();
        let plan = plan_hovering(&scenario, &constraints, target).unwrap();
        let bearings: Vec<String> = plan
            .plan
            .tracks()
            .iter()
            .map(|t| format!("{:.1}", t[0].beta().to_degrees()))
            .collect();
        let det = fim(&plan.plan, target, &scenario).unwrap().det;
        println!(
            "case ({name}) sigma^2 = {vars:?}: {:?}, bearings [{}] deg, det F = {det:.6e}, bound = {:.6e}",
            class.verdict,
            bearings.join(", "),
            class.bound()
        );
    }
}
