use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ExperimentConfig, HarnessError};
use crate::estimator::{self, SearchRegion};
use crate::model::{ConstraintSet, Scenario, TargetPosition};
use crate::synthesis::{
    plan_below_half, plan_beyond_half, plan_full_circle, plan_hovering, radial_optimum,
    Configuration, SynthesizedPlan,
};

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSettings {
    pub prior_std: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Coarse ML grid points per axis.
    pub grid_points: usize,
    /// Total arc of the below-half-circle configuration, degrees.
    pub below_half_arc_deg: f64,
    /// Flip index of the beyond-half-circle configuration; `⌈M_i/2⌉` when absent.
    pub beyond_half_flip: Option<usize>,
}

impl Default for MonteCarloSettings {
    fn default() -> Self {
        Self {
            prior_std: vec![0.0, 10.0, 20.0, 40.0],
            trials: 500,
            seed: 0,
            grid_points: 41,
            below_half_arc_deg: 90.0,
            beyond_half_flip: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloRow {
    pub configuration: Configuration,
    pub prior_std: f64,
    pub trials: usize,
    /// `√(mean ‖ŝ − s‖²)`.
    pub rmse: f64,
    /// Delta-method standard error of `rmse`.
    pub rmse_se: f64,
    /// Mean of `√Tr CRLB` at the true target under each trial's plan.
    pub mean_sqrt_crlb: f64,
}

fn plan_for(
    configuration: Configuration,
    scenario: &Scenario,
    constraints: &ConstraintSet,
    anchor: TargetPosition,
    below_half_fraction: f64,
    flip: Option<usize>,
) -> Result<SynthesizedPlan, HarnessError> {
    Ok(match configuration {
        Configuration::Hovering => plan_hovering(scenario, constraints, anchor)?,
        Configuration::BelowHalfCircle => {
            plan_below_half(scenario, constraints, anchor, below_half_fraction)?
        }
        Configuration::BeyondHalfCircle => {
            let flip: Vec<usize> = scenario
                .uavs()
                .iter()
                .map(|u| flip.unwrap_or_else(|| u.measurements().div_ceil(2)))
                .collect();
            plan_beyond_half(scenario, constraints, anchor, &flip)?
        }
        Configuration::FullCircle => plan_full_circle(scenario, constraints, anchor)?,
    })
}

/// Speed fraction at which the longest track sweeps `arc_deg` in total.
fn below_half_fraction(scenario: &Scenario, constraints: &ConstraintSet, arc_deg: f64) -> f64 {
    let m = scenario
        .uavs()
        .iter()
        .map(|u| u.measurements())
        .max()
        .unwrap_or(1);
    let budget = constraints.step_budget();
    if m < 2 || budget == 0.0 {
        return 0.0;
    }
    let r_star = radial_optimum(constraints).r_star;
    let increment = arc_deg.to_radians() / (m - 1) as f64;
    (2.0 * r_star * (0.5 * increment).sin() / budget).min(1.0)
}

/// Robustness of the four configurations to an erroneous prior.
///
/// Trial `t` draws from its own ChaCha8 stream `t`: first a standard normal
/// pair that, scaled by each prior std, offsets the prior from `truth`, then
/// the measurement noise. Every configuration and prior std reuses the same
/// draws, so differences between rows are not masked by sampling noise.
pub fn monte_carlo(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    truth: TargetPosition,
    settings: &MonteCarloSettings,
) -> Result<Vec<MonteCarloRow>, HarnessError> {
    if settings.trials == 0 {
        return Err(HarnessError::InvalidParameter {
            name: "trials",
            value: "0".into(),
        });
    }
    let fraction = below_half_fraction(scenario, constraints, settings.below_half_arc_deg);
    let mut rows = Vec::new();
    for &std in &settings.prior_std {
        for configuration in Configuration::ALL {
            let mut squared = Vec::with_capacity(settings.trials);
            let mut crlb_sum = 0.0;
            for trial in 0..settings.trials {
                let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
                rng.set_stream(trial as u64);
                let ox: f64 = StandardNormal.sample(&mut rng);
                let oy: f64 = StandardNormal.sample(&mut rng);
                let prior = TargetPosition::new(truth.x + std * ox, truth.y + std * oy)?;
                let plan = plan_for(
                    configuration,
                    scenario,
                    constraints,
                    prior,
                    fraction,
                    settings.beyond_half_flip,
                )?
                .plan;
                let record = estimator::simulate_with(&plan, truth, scenario, &mut rng)?;
                let region = SearchRegion::for_plan(&plan).with_grid_points(settings.grid_points);
                let est = estimator::ml_estimate(&record, &plan, scenario, &region)?;
                let e = est.estimate.distance_to(&truth);
                squared.push(e * e);
                crlb_sum += estimator::crlb_rmse_bound(&plan, truth, scenario)?;
            }
            let t = settings.trials as f64;
            let mse = squared.iter().sum::<f64>() / t;
            let var = if settings.trials > 1 {
                squared.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (t - 1.0)
            } else {
                0.0
            };
            let rmse = mse.sqrt();
            rows.push(MonteCarloRow {
                configuration,
                prior_std: std,
                trials: settings.trials,
                rmse,
                rmse_se: if rmse > 0.0 {
                    var.sqrt() / (2.0 * rmse * t.sqrt())
                } else {
                    0.0
                },
                mean_sqrt_crlb: crlb_sum / t,
            });
        }
    }
    Ok(rows)
}

pub fn run_montecarlo(config: &ExperimentConfig) -> Result<Vec<MonteCarloRow>, HarnessError> {
    config.check_experiment()?;
    let e = &config.experiment;
    let settings = MonteCarloSettings {
        prior_std: e.prior_std_m.clone(),
        trials: e.trials,
        seed: e.seed,
        grid_points: e
            .grid_points
            .unwrap_or(MonteCarloSettings::default().grid_points),
        below_half_arc_deg: e.below_half_arc_deg,
        beyond_half_flip: e.beyond_half_flip,
    };
    monte_carlo(
        &config.scenario()?,
        &config.constraints()?,
        config.target()?,
        &settings,
    )
}

/// Columns `configuration,prior_std_m,trials,rmse_m,rmse_se_m,mean_sqrt_tr_crlb_m`.
pub fn write_montecarlo_csv<W: Write>(rows: &[MonteCarloRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "configuration",
        "prior_std_m",
        "trials",
        "rmse_m",
        "rmse_se_m",
        "mean_sqrt_tr_crlb_m",
    ])?;
    for r in rows {
        w.write_record([
            r.configuration.name().to_string(),
            r.prior_std.to_string(),
            r.trials.to_string(),
            r.rmse.to_string(),
            r.rmse_se.to_string(),
            r.mean_sqrt_crlb.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
