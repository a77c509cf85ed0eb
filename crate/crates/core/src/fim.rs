//! Fisher information for RSS localization of a ground target.
//!
//! Every measurement at horizontal distance `r`, slant range `d` and bearing
//! `β` contributes `(10γ/ln10)² σ⁻² r²/d⁴ g gᵀ` to the 2x2 FIM, where
//! `g = (sin β, cos β) = ((x_u − x)/r, (y_u − y)/r)` is the horizontal unit
//! vector from the target to the UAV.
//!
//! The unit vector is often written `(cos β, sin β)` in the literature. With
//! bearings measured from +y towards +x, as in [`crate::model`], the x
//! component is `sin β`. The two forms differ by the relabeling
//! `β → π/2 − β`, which leaves the determinant, the eigenvalues and every
//! optimality statement unchanged.

use std::f64::consts::LN_10;

use nalgebra::{Matrix2, Vector2};
use thiserror::Error;

use crate::estimator;
use crate::model::{MeasurementPlan, MeasurementPose, ModelError, Scenario, TargetPosition};

/// A FIM is treated as singular when `det < SINGULAR_RTOL · (trace/2)²`.
pub const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FimError {
    #[error(transparent)]
    Shape(#[from] ModelError),
    #[error("weight {index} is negative or not finite: {value}")]
    InvalidWeight { index: usize, value: f64 },
    #[error("dominant index {index} out of range for {len} weights")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("zero distance between a measurement position and the target")]
    ZeroDistance,
}

/// `10γ / ln 10`, the slope of the mean RSS with respect to `ln d`.
pub fn rss_gain(gamma: f64) -> f64 {
    10.0 * gamma / LN_10
}

/// `c = (10γ/ln10)⁴`, the scale of every closed-form determinant.
pub fn information_scale(gamma: f64) -> f64 {
    rss_gain(gamma).powi(4)
}

/// Horizontal unit vector from the target towards the UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BearingVector {
    /// x component, `sin β`.
    pub east: f64,
    /// y component, `cos β`.
    pub north: f64,
}

impl BearingVector {
    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.east, self.north)
    }

    pub fn outer(&self) -> Matrix2<f64> {
        let v = self.as_vector();
        v * v.transpose()
    }
}

pub fn bearing(beta: f64) -> BearingVector {
    let (east, north) = beta.sin_cos();
    BearingVector { east, north }
}

/// Per-measurement information weight `σ⁻² r²/d⁴` (without the gain factor).
pub fn pose_weight(pose: &MeasurementPose, noise_variance: f64) -> f64 {
    let r2 = pose.r() * pose.r();
    let d2 = r2 + pose.h() * pose.h();
    r2 / (noise_variance * d2 * d2)
}

/// Nonnegative placement weights together with the path-loss exponent they
/// were computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    values: Vec<f64>,
    gamma: f64,
}

impl WeightSet {
    pub fn new(values: Vec<f64>, gamma: f64) -> Result<Self, FimError> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0 && v.is_finite()))
        {
            return Err(FimError::InvalidWeight { index, value });
        }
        Ok(Self { values, gamma })
    }

    /// Per-UAV weights `W_i = Σ_j σ_i⁻² r_ij²/d_ij⁴` of a plan evaluated about `target`.
    /// Equals `M_i σ_i⁻² r_i²/d_i⁴` when a UAV's poses all share `(r, h)`.
    pub fn aggregated(
        plan: &MeasurementPlan,
        target: TargetPosition,
        scenario: &Scenario,
    ) -> Result<Self, FimError> {
        plan.check_shape(scenario)?;
        let plan = plan.relative_to(target);
        let values = plan
            .tracks()
            .iter()
            .zip(scenario.uavs())
            .map(|(track, spec)| {
                track
                    .iter()
                    .map(|p| pose_weight(p, spec.noise_variance()))
                    .sum()
            })
            .collect();
        Ok(Self {
            values,
            gamma: scenario.gamma(),
        })
    }

    /// Weights `M_i σ_i⁻² r²/d⁴` of UAVs all hovering at range `r` and height `h`.
    pub fn at_common_range(scenario: &Scenario, r: f64, h: f64) -> Self {
        let d2 = r * r + h * h;
        let geometry = r * r / (d2 * d2);
        Self {
            values: scenario
                .uavs()
                .iter()
                .map(|u| u.measurements() as f64 * u.precision() * geometry)
                .collect(),
            gamma: scenario.gamma(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn information_scale(&self) -> f64 {
        information_scale(self.gamma)
    }
}

/// The FIM with its determinant and CRLB trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FimSummary {
    pub matrix: Matrix2<f64>,
    pub det: f64,
    /// `trace(F⁻¹)` in m²; `None` when the FIM is singular.
    pub crlb_trace: Option<f64>,
}

impl FimSummary {
    pub fn from_matrix(matrix: Matrix2<f64>) -> Self {
        let det = matrix[(0, 0)] * matrix[(1, 1)] - matrix[(0, 1)] * matrix[(1, 0)];
        let trace = matrix[(0, 0)] + matrix[(1, 1)];
        let half = 0.5 * trace;
        let singular = !(det > SINGULAR_RTOL * half * half) || !det.is_finite();
        // trace of the closed-form 2x2 inverse [d −b; −c a]/det
        let crlb_trace = (!singular).then(|| trace / det);
        Self {
            matrix,
            det,
            crlb_trace,
        }
    }

    /// Localization is unobservable from this geometry.
    pub fn is_singular(&self) -> bool {
        self.crlb_trace.is_none()
    }

    /// `√trace(F⁻¹)`, the RMSE lower bound of unbiased estimators.
    pub fn sqrt_crlb_trace(&self) -> Option<f64> {
        self.crlb_trace.map(f64::sqrt)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = &self.matrix;
        let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
        let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
        let radius = half_diff.hypot(m[(0, 1)]);
        [mean - radius, mean + radius]
    }
}

/// FIM of weighted bearings: `(10γ/ln10)² Σ w g(β) g(β)ᵀ`.
pub fn fim_from_bearings<I>(gamma: f64, weighted_bearings: I) -> FimSummary
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
    for (w, beta) in weighted_bearings {
        let g = bearing(beta);
        xx += w * g.east * g.east;
        xy += w * g.east * g.north;
        yy += w * g.north * g.north;
    }
    let k = rss_gain(gamma).powi(2);
    FimSummary::from_matrix(Matrix2::new(k * xx, k * xy, k * xy, k * yy))
}

/// FIM of `plan` for a target at `target`.
///
/// The plan's physical positions are re-expressed about `target`; poses
/// directly above it have zero weight.
pub fn fim(
    plan: &MeasurementPlan,
    target: TargetPosition,
    scenario: &Scenario,
) -> Result<FimSummary, FimError> {
    plan.check_shape(scenario)?;
    let plan = plan.relative_to(target);
    let terms = plan
        .tracks()
        .iter()
        .zip(scenario.uavs())
        .flat_map(|(track, spec)| {
            track
                .iter()
                .map(move |p| (pose_weight(p, spec.noise_variance()), p.beta()))
        });
    Ok(fim_from_bearings(scenario.gamma(), terms))
}

/// Independent Fisher reconstruction `F = Σ_i J_iᵀ N_i⁻¹ J_i`, with the
/// Jacobian of the mean RSS taken by central finite differences of
/// `step` meters in the target coordinates.
pub fn fim_fd_oracle(
    plan: &MeasurementPlan,
    target: TargetPosition,
    scenario: &Scenario,
    step: f64,
) -> Result<Matrix2<f64>, FimError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(FimError::InvalidStep(step));
    }
    plan.check_shape(scenario)?;
    let mean = |p: &nalgebra::Point3<f64>, x: f64, y: f64| {
        estimator::mean_rss(p, TargetPosition { x, y }, scenario)
            .map_err(|_| FimError::ZeroDistance)
    };
    let mut f = Matrix2::zeros();
    for (track, spec) in plan.positions().iter().zip(scenario.uavs()) {
        for p in track {
            let jx = (mean(p, target.x + step, target.y)? - mean(p, target.x - step, target.y)?)
                / (2.0 * step);
            let jy = (mean(p, target.x, target.y + step)? - mean(p, target.x, target.y - step)?)
                / (2.0 * step);
            let j = Vector2::new(jx, jy);
            f += j * j.transpose() * spec.precision();
        }
    }
    Ok(f)
}

/// Regular-case maximum `¼ c (Σ W_i)²`.
pub fn max_det_regular(weights: &WeightSet) -> f64 {
    let total = weights.total();
    0.25 * weights.information_scale() * total * total
}

/// Irregular-case maximum `c W_k Σ_{i≠k} W_i` for dominant index `k`.
pub fn max_det_irregular(weights: &WeightSet, k: usize) -> Result<f64, FimError> {
    let wk = *weights.values.get(k).ok_or(FimError::IndexOutOfRange {
        index: k,
        len: weights.len(),
    })?;
    let rest: f64 = weights
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, w)| w)
        .sum();
    Ok(weights.information_scale() * wk * rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MeasurementPose;
    use crate::rel_close;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

    fn pose(r: f64, h: f64, beta: f64) -> MeasurementPose {
        MeasurementPose::new(r, h, beta).unwrap()
    }

    fn scenario(vars: &[f64], m: &[usize]) -> Scenario {
        Scenario::from_lists(0.0, 3.0, vars, m).unwrap()
    }

    #[test]
    fn bearing_examples() {
        let b = bearing(0.0);
        assert_eq!((b.east, b.north), (0.0, 1.0));
        let b = bearing(FRAC_PI_2);
        assert!((b.east - 1.0).abs() < 1e-15 && b.north.abs() < 1e-15);
        let b = bearing(FRAC_PI_4);
        let h = 0.5f64.sqrt();
        assert!((b.east - h).abs() < 1e-15 && (b.north - h).abs() < 1e-15);
    }

    #[test]
    fn information_scale_for_gamma_three() {
        let k = 30.0 / 10f64.ln();
        let c = information_scale(3.0);
        assert!(rel_close(c, k * k * k * k, 1e-15));
        assert!((c / 2.88151e4 - 1.0).abs() < 1e-5, "{c}");
        let w = WeightSet::new(vec![1.0], 3.0).unwrap();
        assert!((max_det_regular(&w) - 7203.8).abs() < 0.05);
    }

    #[test]
    fn single_measurement_is_singular() {
        let s = scenario(&[4.0], &[1]);
        let plan = MeasurementPlan::new(TargetPosition::ORIGIN, vec![vec![pose(80.0, 120.0, 1.1)]]);
        let f = fim(&plan, TargetPosition::ORIGIN, &s).unwrap();
        assert!(f.det.abs() < 1e-12 * f.matrix.norm().powi(2));
        assert!(f.is_singular());
    }

    #[test]
    fn orthogonal_pair_is_isotropic() {
        let s = scenario(&[4.0], &[2]);
        let p = pose(100.0, 100.0, 0.0);
        let plan = MeasurementPlan::new(
            TargetPosition::ORIGIN,
            vec![vec![p, pose(100.0, 100.0, FRAC_PI_2)]],
        );
        let w = pose_weight(&p, 4.0);
        let a = rss_gain(3.0).powi(2) * w;
        let f = fim(&plan, TargetPosition::ORIGIN, &s).unwrap();
        assert!(rel_close(f.matrix[(0, 0)], a, 1e-14));
        assert!(rel_close(f.matrix[(1, 1)], a, 1e-14));
        assert!(f.matrix[(0, 1)].abs() < 1e-14 * a);
        assert!(rel_close(f.det, a * a, 1e-13));
        assert!(rel_close(f.crlb_trace.unwrap(), 2.0 / a, 1e-13));
    }

    #[test]
    fn equal_hovering_triplet_matches_regular_bound() {
        let s = scenario(&[16.0; 3], &[16; 3]);
        let tracks = [0.0f64, 60.0, 120.0]
            .iter()
            .map(|deg| vec![pose(100.0, 100.0, deg.to_radians()); 16])
            .collect();
        let plan = MeasurementPlan::new(TargetPosition::ORIGIN, tracks);
        let f = fim(&plan, TargetPosition::ORIGIN, &s).unwrap();
        // W_i = 16/16 · 100²/(2·100²)² = 2.5e-5, independently of WeightSet
        let total = 3.0 * 2.5e-5;
        let expected = 0.25 * information_scale(3.0) * total * total;
        assert!(
            rel_close(f.det, expected, 1e-9),
            "{} vs {}",
            f.det,
            expected
        );
        let w = WeightSet::aggregated(&plan, TargetPosition::ORIGIN, &s).unwrap();
        assert!(rel_close(max_det_regular(&w), expected, 1e-12));
    }

    #[test]
    fn pose_above_target_contributes_nothing() {
        let s = scenario(&[4.0], &[3]);
        let plan = MeasurementPlan::new(
            TargetPosition::ORIGIN,
            vec![vec![
                pose(0.0, 100.0, 0.0),
                pose(100.0, 100.0, 0.0),
                pose(100.0, 100.0, 1.0),
            ]],
        );
        let without = MeasurementPlan::new(
            TargetPosition::ORIGIN,
            vec![vec![pose(100.0, 100.0, 0.0), pose(100.0, 100.0, 1.0)]],
        );
        let a = fim(&plan, TargetPosition::ORIGIN, &s).unwrap();
        let b = fim(&without, TargetPosition::ORIGIN, &scenario(&[4.0], &[2])).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn irregular_bound_examples() {
        let w = WeightSet::new(vec![1.0, 0.0, 0.0], 3.0).unwrap();
        assert_eq!(max_det_irregular(&w, 0).unwrap(), 0.0);
        let w = WeightSet::new(vec![0.5, 0.25, 0.25], 3.0).unwrap();
        let v = max_det_irregular(&w, 0).unwrap();
        assert!((v - 2.88151e4 * 0.25).abs() < 0.05);
        // boundary w_k = ½ ΣW: both closed forms agree
        assert!(rel_close(v, max_det_regular(&w), 1e-15));
        assert!(max_det_irregular(&w, 3).is_err());
        assert_eq!(
            max_det_regular(&WeightSet::new(vec![0.0; 4], 3.0).unwrap()),
            0.0
        );
        assert!(WeightSet::new(vec![1.0, -0.1], 3.0).is_err());
    }

    #[test]
    fn oracle_matches_on_small_plans() {
        let s = scenario(&[4.0], &[1]);
        let plan = MeasurementPlan::new(TargetPosition::ORIGIN, vec![vec![pose(70.0, 110.0, 2.0)]]);
        let a = fim(&plan, TargetPosition::ORIGIN, &s).unwrap().matrix;
        let b = fim_fd_oracle(&plan, TargetPosition::ORIGIN, &s, 1e-3).unwrap();
        assert!((a - b).norm() <= 1e-6 * a.norm());

        let s = scenario(&[4.0], &[2]);
        let plan = MeasurementPlan::new(
            TargetPosition::ORIGIN,
            vec![vec![pose(100.0, 100.0, 0.0), pose(100.0, 100.0, FRAC_PI_2)]],
        );
        let a = fim(&plan, TargetPosition::ORIGIN, &s).unwrap().matrix;
        let b = fim_fd_oracle(&plan, TargetPosition::ORIGIN, &s, 1e-3).unwrap();
        assert!((a - b).norm() <= 1e-6 * a.norm());
        assert!(fim_fd_oracle(&plan, TargetPosition::ORIGIN, &s, 0.0).is_err());
    }

    #[test]
    fn fim_about_shifted_target_uses_physical_positions() {
        // A plan anchored at the origin evaluated at (10, -5) must agree with
        // the same positions expressed about (10, -5) directly.
        let s = scenario(&[4.0, 9.0], &[3, 2]);
        let plan = MeasurementPlan::new(
            TargetPosition::ORIGIN,
            vec![
                vec![
                    pose(100.0, 100.0, 0.3),
                    pose(90.0, 110.0, 1.3),
                    pose(120.0, 100.0, 2.0),
                ],
                vec![pose(100.0, 100.0, 4.0), pose(100.0, 130.0, 5.0)],
            ],
        );
        let t = TargetPosition::new(10.0, -5.0).unwrap();
        let a = fim(&plan, t, &s).unwrap().matrix;
        let b = fim_fd_oracle(&plan, t, &s, 1e-3).unwrap();
        assert!((a - b).norm() <= 1e-6 * a.norm());
    }

    mod props {
        use super::*;
        use proptest::collection::vec;
        use proptest::prelude::*;

        fn plan_strategy() -> impl Strategy<Value = (Scenario, MeasurementPlan)> {
            vec(
                (
                    1.0..20.0f64,
                    vec((60.0..400.0f64, 100.0..300.0f64, 0.0..TAU), 1..8),
                ),
                1..6,
            )
            .prop_map(|uavs| {
                let vars: Vec<f64> = uavs.iter().map(|u| u.0).collect();
                let m: Vec<usize> = uavs.iter().map(|u| u.1.len()).collect();
                let tracks = uavs
                    .iter()
                    .map(|u| u.1.iter().map(|&(r, h, b)| pose(r, h, b)).collect())
                    .collect();
                (
                    Scenario::from_lists(0.0, 3.0, &vars, &m).unwrap(),
                    MeasurementPlan::new(TargetPosition::ORIGIN, tracks),
                )
            })
        }

        proptest! {
            #[test]
            fn fim_is_symmetric_psd((s, plan) in plan_strategy()) {
                let f = fim(&plan, TargetPosition::ORIGIN, &s).unwrap();
                let scale = f.matrix.norm();
                prop_assert!((f.matrix[(0, 1)] - f.matrix[(1, 0)]).abs() <= 1e-12 * scale);
                prop_assert!(f.eigenvalues()[0] >= -1e-10 * scale);
                prop_assert!(f.det >= -1e-10 * scale * scale);
            }

            #[test]
            fn rotation_preserves_spectrum((s, plan) in plan_strategy(), delta in 0.0..TAU) {
                let a = fim(&plan, TargetPosition::ORIGIN, &s).unwrap();
                let b = fim(&plan.rotated(delta), TargetPosition::ORIGIN, &s).unwrap();
                let [a0, a1] = a.eigenvalues();
                let [b0, b1] = b.eigenvalues();
                prop_assert!((a1 - b1).abs() <= 1e-9 * a1);
                prop_assert!((a0 - b0).abs() <= 1e-9 * a1);
                prop_assert!((a.det - b.det).abs() <= 1e-9 * a1 * a1);
            }

            #[test]
            fn det_never_exceeds_regular_bound((s, plan) in plan_strategy()) {
                let f = fim(&plan, TargetPosition::ORIGIN, &s).unwrap();
                let w = WeightSet::aggregated(&plan, TargetPosition::ORIGIN, &s).unwrap();
                let bound = max_det_regular(&w);
                prop_assert!(f.det <= bound * (1.0 + 1e-12));
            }
        }
    }
}
