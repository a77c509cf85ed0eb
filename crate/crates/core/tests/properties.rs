use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swarmloc::estimator::{self, SearchRegion};
use swarmloc::fim::fim;
use swarmloc::harness::grid_det;
use swarmloc::model::{validate_plan, ConstraintSet, Scenario, TargetPosition};
use swarmloc::synthesis::{plan_auto, plan_full_circle, plan_hovering};

const O: TargetPosition = TargetPosition::ORIGIN;

fn constraints(speed: f64) -> ConstraintSet {
    ConstraintSet::new(60.0, 100.0, speed, 5.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesized_hovering_dominates_angle_grid(
        v1 in 1.0..20.0f64, v2 in 1.0..20.0f64, v3 in 1.0..20.0f64,
    ) {
        let s = Scenario::from_lists(0.0, 3.0, &[v1, v2, v3], &[16; 3]).unwrap();
        let c = constraints(0.0);
        let grid = grid_det(&s, &c, 2.0).unwrap();
        let plan = plan_hovering(&s, &c, O).unwrap();
        let det = fim(&plan.plan, O, &s).unwrap().det;
        prop_assert!(det >= grid.max * (1.0 - 1e-6), "{det} < {}", grid.max);
    }

    #[test]
    fn common_rotation_leaves_det_unchanged(
        vars in proptest::collection::vec(1.0..20.0f64, 2..6),
        speed in 0.0..30.0f64,
        delta in -7.0..7.0f64,
    ) {
        let s = Scenario::from_lists(0.0, 3.0, &vars, &vec![12; vars.len()]).unwrap();
        let c = constraints(speed);
        let auto = plan_auto(&s, &c, O).unwrap();
        let a = fim(auto.plan(), O, &s).unwrap().det;
        let b = fim(&auto.plan().rotated(delta), O, &s).unwrap().det;
        prop_assert!((a - b).abs() <= 1e-9 * a);
        prop_assert!(validate_plan(&auto.plan().rotated(delta), &c, O).is_feasible());
    }
}

#[test]
fn unbiased_on_full_circle() {
    // σ² = 12 dB for every UAV
    let s = Scenario::from_lists(-30.0, 3.0, &[12.0; 3], &[16; 3]).unwrap();
    let plan = plan_full_circle(&s, &constraints(10.0), O).unwrap().plan;
    let region = SearchRegion::for_plan(&plan).with_grid_points(21);
    let trials = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut sx, mut sy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..trials {
        let record = estimator::simulate_with(&plan, O, &s, &mut rng).unwrap();
        let e = estimator::ml_estimate(&record, &plan, &s, &region)
            .unwrap()
            .estimate;
        sx += e.x;
        sy += e.y;
        sxx += e.x * e.x;
        syy += e.y * e.y;
    }
    let t = trials as f64;
    for (sum, sq) in [(sx, sxx), (sy, syy)] {
        let mean = sum / t;
        let se = ((sq / t - mean * mean) / t).sqrt();
        assert!(mean.abs() <= 3.0 * se, "mean {mean} se {se}");
    }
}

#[test]
fn larger_determinant_gives_smaller_error() {
    // hovering optimum against a clustered hovering geometry
    let mut vars = vec![12.0; 10];
    vars.extend([16.0; 5]);
    let s = Scenario::from_lists(-30.0, 3.0, &vars, &[16; 15]).unwrap();
    let good = plan_hovering(&s, &constraints(0.0), O).unwrap().plan;
    let poor = swarmloc::model::MeasurementPlan::new(
        O,
        good.tracks()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.iter()
                    .map(|p| p.rotated(-p.beta() + 0.05 * i as f64))
                    .collect()
            })
            .collect(),
    );
    let d_good = fim(&good, O, &s).unwrap().det;
    let d_poor = fim(&poor, O, &s).unwrap().det;
    assert!(d_good > d_poor);
    let rmse = |plan: &swarmloc::model::MeasurementPlan| {
        let region = SearchRegion::for_plan(plan).with_grid_points(41);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut sum = 0.0;
        for _ in 0..300 {
            let record = estimator::simulate_with(plan, O, &s, &mut rng).unwrap();
            let e = estimator::ml_estimate(&record, plan, &s, &region)
                .unwrap()
                .estimate;
            sum += e.distance_to(&O).powi(2);
        }
        (sum / 300.0).sqrt()
    };
    assert!(rmse(&good) < rmse(&poor));
}

#[test]
fn outputs_are_bit_identical_across_runs() {
    let s = Scenario::from_lists(-30.0, 3.0, &[8.0, 12.0, 16.0], &[16; 3]).unwrap();
    let plan = plan_full_circle(&s, &constraints(10.0), O).unwrap().plan;
    let a = estimator::simulate(&plan, O, &s, 5).unwrap();
    let b = estimator::simulate(&plan, O, &s, 5).unwrap();
    let region = SearchRegion::for_plan(&plan);
    let ea = estimator::ml_estimate(&a, &plan, &s, &region).unwrap();
    let eb = estimator::ml_estimate(&b, &plan, &s, &region).unwrap();
    assert_eq!(ea.estimate.x.to_bits(), eb.estimate.x.to_bits());
    assert_eq!(ea.estimate.y.to_bits(), eb.estimate.y.to_bits());
}
