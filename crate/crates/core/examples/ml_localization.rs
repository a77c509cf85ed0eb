//! Simulate RSS measurements along a full-circle plan and localize the emitter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swarmloc::estimator::{crlb_rmse_bound, ml_estimate, simulate_with, SearchRegion};
use swarmloc::model::{ConstraintSet, Scenario, TargetPosition};
use swarmloc::synthesis::plan_full_circle;

fn main() {
    let scenario = Scenario::from_lists(-30.0, 3.0, &[8.0, 12.0, 16.0], &[16; 3]).unwrap();
    let constraints = ConstraintSet::new(60.0, 100.0, 10.0, 5.0).unwrap();
    let prior = TargetPosition::new(500.0, 300.0).unwrap();
    let truth = TargetPosition::new(508.0, 294.0).unwrap();
    let plan = plan_full_circle(&scenario, &constraints, prior)
        .unwrap()
        .plan;
    let region = SearchRegion::for_plan(&plan);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let trials = 200;
    let mut squared = 0.0;
    for trial in 0..trials {
        let record = simulate_with(&plan, truth, &scenario, &mut rng).unwrap();
        let est = ml_estimate(&record, &plan, &scenario, &region).unwrap();
        let err = est.estimate.distance_to(&truth);
        squared += err * err;
        if trial < 3 {
            println!(
                "trial {trial}: estimate ({:.2}, {:.2}), error {err:.2} m, {} Gauss-Newton steps, converged {}",
                est.estimate.x, est.estimate.y, est.iterations, est.converged
            );
        }
    }
    println!(
        "RMSE over {trials} trials: {:.3} m, sqrt(tr CRLB) at the true target: {:.3} m",
        (squared / trials as f64).sqrt(),
        crlb_rmse_bound(&plan, truth, &scenario).unwrap()
    );
}
