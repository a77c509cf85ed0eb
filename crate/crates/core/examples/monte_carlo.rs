//! Estimation error of each configuration as the prior estimate degrades.
//!
//! Fifteen UAVs, ten at 12 dB^2 and five at 16 dB^2. The trial count is kept
//! small so the example finishes quickly; pass a count as the first argument.

use swarmloc::harness::{monte_carlo, MonteCarloSettings};
use swarmloc::model::{ConstraintSet, Scenario, TargetPosition};

fn main() {
    let trials = std::env::args()
        .nth(1)
        .map_or(100, |a| a.parse().expect("trial count"));
    let mut vars = vec![12.0; 10];
    vars.extend([16.0; 5]);
    let scenario = Scenario::from_lists(-30.0, 3.0, &vars, &[16; 15]).unwrap();
    let constraints = ConstraintSet::new(60.0, 100.0, 40.0, 5.0).unwrap();
    let settings = MonteCarloSettings {
        trials,
        seed: 7,
        ..Default::default()
    };
    let rows = monte_carlo(&scenario, &constraints, TargetPosition::ORIGIN, &settings).unwrap();
    println!(
        "{:<12} {:>9} {:>16} {:>14}",
        "config", "prior std", "RMSE", "sqrt(tr CRLB)"
    );
    for r in rows {
        println!(
            "{:<12} {:>7} m {:>8.3} ± {:.3} {:>12.3} m",
            r.configuration.name(),
            r.prior_std,
            r.rmse,
            r.rmse_se,
            r.mean_sqrt_crlb
        );
    }
}
