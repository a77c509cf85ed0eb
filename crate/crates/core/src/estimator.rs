//! RSS simulation and maximum-likelihood localization.
//!
//! Measurements follow `R = p0 − 10γ log10(d) + η` with `η ~ N(0, σ_i²)`
//! independent across UAVs and epochs. The negative log-likelihood is, up to
//! a constant, the weighted sum of squared residuals
//! `J(s) = Σ σ_i⁻² (R_ij − f_ij(s))²`, which the estimator minimizes with a
//! coarse grid search followed by damped Gauss–Newton steps.

use std::f64::consts::{LN_10, PI};

use nalgebra::{Matrix2, Point3, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::fim::{self, SINGULAR_RTOL};
use crate::model::{MeasurementPlan, ModelError, Scenario, TargetPosition};

/// Gauss–Newton stops once the step is shorter than this, meters.
pub const STEP_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 50;
pub const MAX_HALVINGS: usize = 20;
pub const DEFAULT_GRID_POINTS: usize = 101;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("zero distance between a measurement position and the target")]
    ZeroDistance,
    #[error("measurement geometry does not determine the target")]
    SingularGeometry,
    #[error("Fisher information matrix is singular")]
    SingularFim,
    #[error("search region needs a positive finite side and at least 2 grid points per axis")]
    InvalidRegion,
    #[error("record has {found} values for UAV {uav}, plan has {expected} poses")]
    RecordShape {
        uav: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Noiseless RSS `p0 − 10γ log10(d)` at slant range `d`.
pub fn mean_rss_at_distance(distance: f64, scenario: &Scenario) -> Result<f64, EstimatorError> {
    if !(distance > 0.0) {
        return Err(EstimatorError::ZeroDistance);
    }
    Ok(scenario.p0() - 10.0 * scenario.gamma() * distance.log10())
}

/// Noiseless RSS at `position` from an emitter at `(target.x, target.y, 0)`.
pub fn mean_rss(
    position: &Point3<f64>,
    target: TargetPosition,
    scenario: &Scenario,
) -> Result<f64, EstimatorError> {
    let d = Vector2::new(position.x - target.x, position.y - target.y)
        .norm()
        .hypot(position.z);
    mean_rss_at_distance(d, scenario)
}

/// RSS values in dB, one vector per UAV in plan order.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    values: Vec<Vec<f64>>,
}

impl MeasurementRecord {
    pub fn new(values: Vec<Vec<f64>>, plan: &MeasurementPlan) -> Result<Self, EstimatorError> {
        if values.len() != plan.num_uavs() {
            return Err(ModelError::UavCountMismatch {
                expected: plan.num_uavs(),
                found: values.len(),
            }
            .into());
        }
        for (uav, (v, t)) in values.iter().zip(plan.tracks()).enumerate() {
            if v.len() != t.len() {
                return Err(EstimatorError::RecordShape {
                    uav,
                    expected: t.len(),
                    found: v.len(),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn uav(&self, i: usize) -> &[f64] {
        &self.values[i]
    }
}

/// Noiseless record `f_ij(s)`.
pub fn noiseless(
    plan: &MeasurementPlan,
    target: TargetPosition,
    scenario: &Scenario,
) -> Result<MeasurementRecord, EstimatorError> {
    plan.check_shape(scenario)?;
    let values = plan
        .positions()
        .iter()
        .map(|t| t.iter().map(|p| mean_rss(p, target, scenario)).collect())
        .collect::<Result<_, _>>()?;
    MeasurementRecord::new(values, plan)
}

/// Simulated record drawn from `rng`.
pub fn simulate_with<R: Rng + ?Sized>(
    plan: &MeasurementPlan,
    target: TargetPosition,
    scenario: &Scenario,
    rng: &mut R,
) -> Result<MeasurementRecord, EstimatorError> {
    let mut record = noiseless(plan, target, scenario)?;
    for (values, spec) in record.values.iter_mut().zip(scenario.uavs()) {
        let noise = Normal::new(0.0, spec.noise_variance().sqrt())
            .expect("noise variance is validated positive");
        for v in values.iter_mut() {
            *v += noise.sample(rng);
        }
    }
    Ok(record)
}

/// Simulated record, deterministic in `seed`.
pub fn simulate(
    plan: &MeasurementPlan,
    target: TargetPosition,
    scenario: &Scenario,
    seed: u64,
) -> Result<MeasurementRecord, EstimatorError> {
    simulate_with(plan, target, scenario, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Square search area for the coarse grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRegion {
    pub center: TargetPosition,
    pub side: f64,
    /// Grid points per axis.
    pub grid_points: usize,
}

impl SearchRegion {
    pub fn new(
        center: TargetPosition,
        side: f64,
        grid_points: usize,
    ) -> Result<Self, EstimatorError> {
        if !(side > 0.0 && side.is_finite()) || grid_points < 2 {
            return Err(EstimatorError::InvalidRegion);
        }
        Ok(Self {
            center,
            side,
            grid_points,
        })
    }

    /// Side `4 r` about the plan anchor, with `r` the largest horizontal
    /// distance in the plan (`r*` for synthesized plans).
    pub fn for_plan(plan: &MeasurementPlan) -> Self {
        let r = plan
            .tracks()
            .iter()
            .flatten()
            .map(|p| p.r())
            .fold(0.0, f64::max);
        Self {
            center: plan.anchor(),
            side: if r > 0.0 { 4.0 * r } else { 1.0 },
            grid_points: DEFAULT_GRID_POINTS,
        }
    }

    pub fn with_grid_points(self, grid_points: usize) -> Self {
        Self {
            grid_points,
            ..self
        }
    }

    fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.grid_points;
        let step = self.side / (n - 1) as f64;
        let x0 = self.center.x - 0.5 * self.side;
        let y0 = self.center.y - 0.5 * self.side;
        (0..n).flat_map(move |i| (0..n).map(move |j| (x0 + i as f64 * step, y0 + j as f64 * step)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub estimate: TargetPosition,
    pub log_likelihood: f64,
    /// Gauss–Newton iterations taken after the grid search.
    pub iterations: usize,
    pub converged: bool,
    /// Best coarse-grid point, where refinement started.
    pub grid_start: TargetPosition,
}

/// Measurements from one UAV at one position, reduced to sufficient statistics.
#[derive(Debug, Clone, Copy)]
struct Site {
    position: Point3<f64>,
    count: f64,
    mean: f64,
    /// Within-site sum of squared deviations from `mean`.
    scatter: f64,
    precision: f64,
}

struct Objective {
    sites: Vec<Site>,
    p0: f64,
    /// `5γ / ln 10`, so that `f = p0 − half_gain · ln d²`.
    half_gain: f64,
    /// `−½ Σ ln(2π σ_i²)` over all measurements.
    normalization: f64,
}

impl Objective {
    fn new(
        record: &MeasurementRecord,
        plan: &MeasurementPlan,
        scenario: &Scenario,
    ) -> Result<Self, EstimatorError> {
        plan.check_shape(scenario)?;
        let shaped = MeasurementRecord::new(record.values.clone(), plan)?;
        let mut sites = Vec::new();
        let mut normalization = 0.0;
        for ((track, values), spec) in plan
            .positions()
            .iter()
            .zip(&shaped.values)
            .zip(scenario.uavs())
        {
            let first = sites.len();
            for (p, &v) in track.iter().zip(values) {
                match sites[first..]
                    .iter_mut()
                    .find(|s: &&mut Site| s.position == *p)
                {
                    // Welford update
                    Some(s) => {
                        s.count += 1.0;
                        let delta = v - s.mean;
                        s.mean += delta / s.count;
                        s.scatter += delta * (v - s.mean);
                    }
                    None => sites.push(Site {
                        position: *p,
                        count: 1.0,
                        mean: v,
                        scatter: 0.0,
                        precision: spec.precision(),
                    }),
                }
            }
            normalization -= 0.5 * values.len() as f64 * (2.0 * PI * spec.noise_variance()).ln();
        }
        Ok(Self {
            sites,
            p0: scenario.p0(),
            half_gain: 5.0 * scenario.gamma() / LN_10,
            normalization,
        })
    }

    fn residual(&self, site: &Site, x: f64, y: f64) -> (f64, f64, f64) {
        let dx = site.position.x - x;
        let dy = site.position.y - y;
        let d2 = dx * dx + dy * dy + site.position.z * site.position.z;
        let f = self.p0 - self.half_gain * d2.ln();
        (site.mean - f, dx / d2, dy / d2)
    }

    /// `Σ σ⁻² (R − f)²`.
    fn sse(&self, x: f64, y: f64) -> f64 {
        self.sites
            .iter()
            .map(|s| {
                let (e, _, _) = self.residual(s, x, y);
                s.precision * (s.scatter + s.count * e * e)
            })
            .sum()
    }

    fn log_likelihood(&self, x: f64, y: f64) -> f64 {
        self.normalization - 0.5 * self.sse(x, y)
    }

    /// Gauss–Newton normal equations `A = Σ w J Jᵀ`, `b = Σ w J e`.
    /// `b` is also the gradient of the log-likelihood.
    fn normal_equations(&self, x: f64, y: f64) -> (Matrix2<f64>, Vector2<f64>) {
        let gain = 2.0 * self.half_gain;
        let mut a = Matrix2::zeros();
        let mut b = Vector2::zeros();
        for s in &self.sites {
            let (e, gx, gy) = self.residual(s, x, y);
            let j = Vector2::new(gain * gx, gain * gy);
            let w = s.count * s.precision;
            a += w * j * j.transpose();
            b += w * e * j;
        }
        (a, b)
    }
}

fn is_singular(a: &Matrix2<f64>) -> bool {
    let half_trace = 0.5 * a.trace();
    !(a.determinant() > SINGULAR_RTOL * half_trace * half_trace)
}

/// Log-likelihood `ln Q(s)` of `record` under `plan` for a target at `s`.
pub fn log_likelihood(
    record: &MeasurementRecord,
    plan: &MeasurementPlan,
    scenario: &Scenario,
    s: TargetPosition,
) -> Result<f64, EstimatorError> {
    Ok(Objective::new(record, plan, scenario)?.log_likelihood(s.x, s.y))
}

/// Gradient of [`log_likelihood`] with respect to the target coordinates.
pub fn log_likelihood_gradient(
    record: &MeasurementRecord,
    plan: &MeasurementPlan,
    scenario: &Scenario,
    s: TargetPosition,
) -> Result<Vector2<f64>, EstimatorError> {
    Ok(Objective::new(record, plan, scenario)?
        .normal_equations(s.x, s.y)
        .1)
}

/// Maximum-likelihood target position.
///
/// The log-likelihood is evaluated on the `grid_points × grid_points` grid
/// of `region`; the best node seeds Gauss–Newton iterations, each halving
/// its step up to [`MAX_HALVINGS`] times until the objective does not
/// increase. If the iteration cap is reached first, the best iterate is
/// returned with `converged = false`.
pub fn ml_estimate(
    record: &MeasurementRecord,
    plan: &MeasurementPlan,
    scenario: &Scenario,
    region: &SearchRegion,
) -> Result<EstimateResult, EstimatorError> {
    if !(region.side > 0.0 && region.side.is_finite()) || region.grid_points < 2 {
        return Err(EstimatorError::InvalidRegion);
    }
    let objective = Objective::new(record, plan, scenario)?;

    let (mut x, mut y, mut sse) = region
        .nodes()
        .map(|(x, y)| (x, y, objective.sse(x, y)))
        .fold((f64::NAN, f64::NAN, f64::INFINITY), |best, cand| {
            if cand.2 < best.2 {
                cand
            } else {
                best
            }
        });
    let grid_start = TargetPosition { x, y };
    if is_singular(&objective.normal_equations(x, y).0) {
        return Err(EstimatorError::SingularGeometry);
    }

    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (a, b) = objective.normal_equations(x, y);
        let Some(inv) = a.try_inverse().filter(|_| !is_singular(&a)) else {
            break;
        };
        let full = inv * b;
        let mut step = full;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = objective.sse(x + step.x, y + step.y);
            if cand <= sse {
                accepted = Some(cand);
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some(cand) => {
                x += step.x;
                y += step.y;
                sse = cand;
            }
            None => {
                // no decrease along the step: stationary up to rounding
                converged = full.norm() < STEP_TOLERANCE;
                break;
            }
        }
        if full.norm() < STEP_TOLERANCE {
            converged = true;
            break;
        }
    }
    Ok(EstimateResult {
        estimate: TargetPosition { x, y },
        log_likelihood: objective.normalization - 0.5 * sse,
        iterations,
        converged,
        grid_start,
    })
}

/// `√Tr(F⁻¹)`, the lower bound on the RMSE of an unbiased estimator.
pub fn crlb_rmse_bound(
    plan: &MeasurementPlan,
    target: TargetPosition,
    scenario: &Scenario,
) -> Result<f64, EstimatorError> {
    let summary = fim::fim(plan, target, scenario).map_err(|e| match e {
        fim::FimError::Shape(m) => EstimatorError::Model(m),
        _ => EstimatorError::SingularFim,
    })?;
    summary.sqrt_crlb_trace().ok_or(EstimatorError::SingularFim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstraintSet, MeasurementPose, UavSpec};
    use crate::synthesis::{plan_full_circle, plan_hovering};

    fn scenario(vars: &[f64], m: usize) -> Scenario {
        Scenario::from_lists(-30.0, 3.0, vars, &vec![m; vars.len()]).unwrap()
    }

    fn constraints(speed: f64) -> ConstraintSet {
        ConstraintSet::new(60.0, 100.0, speed, 5.0).unwrap()
    }

    #[test]
    fn mean_rss_examples() {
        let s = Scenario::from_lists(0.0, 3.0, &[1.0], &[1]).unwrap();
        assert_eq!(mean_rss_at_distance(1.0, &s).unwrap(), 0.0);
        assert!((mean_rss_at_distance(10.0, &s).unwrap() + 30.0).abs() < 1e-12);
        let v = mean_rss(&Point3::new(100.0, 0.0, 100.0), TargetPosition::ORIGIN, &s).unwrap();
        assert!((v + 64.5154).abs() < 1e-4, "{v}");
        assert_eq!(
            mean_rss_at_distance(0.0, &s),
            Err(EstimatorError::ZeroDistance)
        );
    }

    #[test]
    fn simulation_is_deterministic() {
        let s = scenario(&[8.0, 12.0, 16.0], 16);
        let p = plan_full_circle(&s, &constraints(10.0), TargetPosition::ORIGIN).unwrap();
        let t = TargetPosition::new(3.0, -4.0).unwrap();
        assert_eq!(
            simulate(&p.plan, t, &s, 9).unwrap(),
            simulate(&p.plan, t, &s, 9).unwrap()
        );
        assert_ne!(
            simulate(&p.plan, t, &s, 9).unwrap(),
            simulate(&p.plan, t, &s, 10).unwrap()
        );
    }

    #[test]
    fn vanishing_noise_gives_the_mean() {
        let s = scenario(&[1e-24], 4);
        let p = plan_full_circle(&s, &constraints(100.0), TargetPosition::ORIGIN).unwrap();
        let a = simulate(&p.plan, TargetPosition::ORIGIN, &s, 1).unwrap();
        let b = noiseless(&p.plan, TargetPosition::ORIGIN, &s).unwrap();
        for (x, y) in a.values().iter().flatten().zip(b.values().iter().flatten()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn sample_variance_matches_noise_variance() {
        let var = 12.0;
        let s = Scenario::new(0.0, 3.0, vec![UavSpec::new(var, 1000).unwrap()]).unwrap();
        let pose = MeasurementPose::new(100.0, 100.0, 0.0).unwrap();
        let plan = MeasurementPlan::new(TargetPosition::ORIGIN, vec![vec![pose; 1000]]);
        let f = noiseless(&plan, TargetPosition::ORIGIN, &s).unwrap().uav(0)[0];
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let n = 100_000.0;
        for _ in 0..100 {
            let r = simulate_with(&plan, TargetPosition::ORIGIN, &s, &mut rng).unwrap();
            for v in r.uav(0) {
                let e = v - f;
                sum += e;
                sum2 += e * e;
            }
        }
        let mean = sum / n;
        let sample_var = sum2 / n - mean * mean;
        assert!((sample_var / var - 1.0).abs() < 0.03, "{sample_var}");
    }

    #[test]
    fn noiseless_recovery() {
        let s = scenario(&[8.0, 12.0, 16.0], 16);
        let anchor = TargetPosition::new(10.0, 20.0).unwrap();
        for plan in [
            plan_full_circle(&s, &constraints(10.0), anchor)
                .unwrap()
                .plan,
            plan_hovering(&s, &constraints(0.0), anchor).unwrap().plan,
        ] {
            let truth = TargetPosition::new(17.3, 11.9).unwrap();
            let record = noiseless(&plan, truth, &s).unwrap();
            let est = ml_estimate(&record, &plan, &s, &SearchRegion::for_plan(&plan)).unwrap();
            assert!(est.converged);
            assert!(est.estimate.distance_to(&truth) < 1e-6, "{est:?}");
        }
    }

    #[test]
    fn refinement_never_loses_to_the_grid() {
        let s = scenario(&[8.0, 12.0, 16.0], 16);
        let plan = plan_full_circle(&s, &constraints(10.0), TargetPosition::ORIGIN)
            .unwrap()
            .plan;
        let region = SearchRegion::for_plan(&plan).with_grid_points(21);
        for seed in 0..20 {
            let record = simulate(&plan, TargetPosition::ORIGIN, &s, seed).unwrap();
            let est = ml_estimate(&record, &plan, &s, &region).unwrap();
            let best_grid = region
                .nodes()
                .map(|(x, y)| log_likelihood(&record, &plan, &s, TargetPosition { x, y }).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(est.log_likelihood >= best_grid);
            let g0 = log_likelihood_gradient(&record, &plan, &s, est.grid_start)
                .unwrap()
                .norm();
            let g = log_likelihood_gradient(&record, &plan, &s, est.estimate)
                .unwrap()
                .norm();
            assert!(g <= 1e-6 * g0, "{g} vs {g0}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let s = scenario(&[8.0, 12.0], 8);
        let plan = plan_full_circle(&s, &constraints(40.0), TargetPosition::ORIGIN)
            .unwrap()
            .plan;
        let record = simulate(&plan, TargetPosition::ORIGIN, &s, 5).unwrap();
        let at = TargetPosition::new(4.0, -7.0).unwrap();
        let g = log_likelihood_gradient(&record, &plan, &s, at).unwrap();
        let h = 1e-4;
        let ll = |x, y| log_likelihood(&record, &plan, &s, TargetPosition { x, y }).unwrap();
        let fx = (ll(at.x + h, at.y) - ll(at.x - h, at.y)) / (2.0 * h);
        let fy = (ll(at.x, at.y + h) - ll(at.x, at.y - h)) / (2.0 * h);
        assert!((g.x - fx).abs() < 1e-5 * (1.0 + fx.abs()), "{} {fx}", g.x);
        assert!((g.y - fy).abs() < 1e-5 * (1.0 + fy.abs()), "{} {fy}", g.y);
    }

    #[test]
    fn single_measurement_is_singular() {
        let s = scenario(&[4.0], 1);
        let plan = plan_hovering(&s, &constraints(0.0), TargetPosition::ORIGIN)
            .unwrap()
            .plan;
        let record = noiseless(&plan, TargetPosition::ORIGIN, &s).unwrap();
        assert_eq!(
            ml_estimate(&record, &plan, &s, &SearchRegion::for_plan(&plan)),
            Err(EstimatorError::SingularGeometry)
        );
        assert_eq!(
            crlb_rmse_bound(&plan, TargetPosition::ORIGIN, &s),
            Err(EstimatorError::SingularFim)
        );
    }

    #[test]
    fn crlb_scales_with_noise() {
        let a = scenario(&[8.0, 12.0, 16.0], 16);
        let b = scenario(&[32.0, 48.0, 64.0], 16);
        let plan = plan_hovering(&a, &constraints(0.0), TargetPosition::ORIGIN)
            .unwrap()
            .plan;
        let ba = crlb_rmse_bound(&plan, TargetPosition::ORIGIN, &a).unwrap();
        let bb = crlb_rmse_bound(&plan, TargetPosition::ORIGIN, &b).unwrap();
        assert!((bb / ba - 2.0).abs() < 1e-12);
    }

    #[test]
    fn crlb_of_orthogonal_pair() {
        // F = a I with a = (10γ/ln10)² σ⁻² r²/d⁴
        let s = scenario(&[4.0, 4.0], 1);
        let pose = |b: f64| MeasurementPose::new(100.0, 100.0, b).unwrap();
        let plan = MeasurementPlan::new(
            TargetPosition::ORIGIN,
            vec![vec![pose(0.0)], vec![pose(std::f64::consts::FRAC_PI_2)]],
        );
        let a = fim::rss_gain(3.0).powi(2) / 4.0 * 1e4 / 4e8;
        let got = crlb_rmse_bound(&plan, TargetPosition::ORIGIN, &s).unwrap();
        assert!(((got - (2.0 / a).sqrt()) / got).abs() < 1e-12);
    }

    #[test]
    fn record_shape_is_checked() {
        let s = scenario(&[4.0], 2);
        let plan = plan_hovering(&s, &constraints(0.0), TargetPosition::ORIGIN)
            .unwrap()
            .plan;
        assert!(MeasurementRecord::new(vec![vec![0.0]], &plan).is_err());
        assert!(MeasurementRecord::new(vec![], &plan).is_err());
        assert!(SearchRegion::new(TargetPosition::ORIGIN, 0.0, 11).is_err());
    }
}
