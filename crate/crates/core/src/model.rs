//! Scenario, constraint and plan types.
//!
//! A measurement pose is stored in target-relative cylindrical form
//! `(r, h, β)`: horizontal distance, height, and the horizontal bearing
//! measured from the +y axis towards +x, so that
//! `x_u = x + r sin β` and `y_u = y + r cos β`. The bearing is resolved with
//! `atan2(Δx, Δy)`, which makes the pose/position map a bijection away from
//! the point directly above the target.

use std::f64::consts::TAU;

use nalgebra::Point3;
use thiserror::Error;

/// Relative slack applied when checking a plan against a constraint set.
///
/// Synthesized plans put poses exactly on the constraint boundary
/// (`r = r0`, `h = h0`, chord `= t0 c_max`), so feasibility has to tolerate
/// the last few ulps of trigonometric round-off.
pub const FEASIBILITY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("path-loss exponent must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("source power must be finite, got {0}")]
    InvalidSourcePower(f64),
    #[error("scenario needs at least one UAV")]
    NoUavs,
    #[error("UAV {uav}: noise variance must be positive and finite, got {value}")]
    InvalidNoiseVariance { uav: usize, value: f64 },
    #[error("UAV {uav}: measurement count must be at least 1")]
    ZeroMeasurements { uav: usize },
    #[error("constraint `{field}` out of range: {value}")]
    InvalidConstraint { field: &'static str, value: f64 },
    #[error("target coordinates must be finite, got ({x}, {y})")]
    NonFiniteTarget { x: f64, y: f64 },
    #[error("invalid pose (r={r}, h={h}, beta={beta}): r >= 0 and h > 0 must be finite")]
    InvalidPose { r: f64, h: f64, beta: f64 },
    #[error("plan has {found} UAV tracks but the scenario has {expected}")]
    UavCountMismatch { expected: usize, found: usize },
    #[error("UAV {uav}: plan has {found} poses but the scenario expects {expected}")]
    MeasurementCountMismatch {
        uav: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoseError {
    /// The point sits directly above the target; the bearing is undefined.
    /// The carried pose has `r = 0` and `β = 0`.
    #[error("position is directly above the target; bearing undefined")]
    Degenerate(MeasurementPose),
    #[error("position height must be positive and finite, got {0}")]
    NonPositiveHeight(f64),
}

/// Normalizes an angle in radians to `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid of a tiny negative number rounds up to exactly TAU
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Noise and sample budget of one UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavSpec {
    noise_variance: f64,
    measurements: usize,
}

impl UavSpec {
    /// `noise_variance` is σ² of the log-domain noise in dB²; `measurements` is M.
    pub fn new(noise_variance: f64, measurements: usize) -> Result<Self, ModelError> {
        let spec = Self {
            noise_variance,
            measurements,
        };
        spec.check(0)?;
        Ok(spec)
    }

    fn check(&self, uav: usize) -> Result<(), ModelError> {
        if !(self.noise_variance > 0.0 && self.noise_variance.is_finite()) {
            return Err(ModelError::InvalidNoiseVariance {
                uav,
                value: self.noise_variance,
            });
        }
        if self.measurements == 0 {
            return Err(ModelError::ZeroMeasurements { uav });
        }
        Ok(())
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn measurements(&self) -> usize {
        self.measurements
    }

    /// σ⁻².
    pub fn precision(&self) -> f64 {
        1.0 / self.noise_variance
    }
}

/// Emitter, propagation and per-UAV noise description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    p0: f64,
    gamma: f64,
    uavs: Vec<UavSpec>,
}

impl Scenario {
    pub fn new(p0: f64, gamma: f64, uavs: Vec<UavSpec>) -> Result<Self, ModelError> {
        if !p0.is_finite() {
            return Err(ModelError::InvalidSourcePower(p0));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(ModelError::InvalidGamma(gamma));
        }
        if uavs.is_empty() {
            return Err(ModelError::NoUavs);
        }
        for (i, u) in uavs.iter().enumerate() {
            u.check(i)?;
        }
        Ok(Self { p0, gamma, uavs })
    }

    /// Convenience constructor for `N` UAVs given parallel variance/count lists.
    pub fn from_lists(
        p0: f64,
        gamma: f64,
        noise_variances: &[f64],
        measurements: &[usize],
    ) -> Result<Self, ModelError> {
        if noise_variances.len() != measurements.len() {
            return Err(ModelError::UavCountMismatch {
                expected: noise_variances.len(),
                found: measurements.len(),
            });
        }
        let uavs = noise_variances
            .iter()
            .zip(measurements)
            .map(|(&v, &m)| UavSpec {
                noise_variance: v,
                measurements: m,
            })
            .collect();
        Self::new(p0, gamma, uavs)
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn uavs(&self) -> &[UavSpec] {
        &self.uavs
    }

    pub fn uav(&self, i: usize) -> &UavSpec {
        &self.uavs[i]
    }

    pub fn num_uavs(&self) -> usize {
        self.uavs.len()
    }

    pub fn total_measurements(&self) -> usize {
        self.uavs.iter().map(|u| u.measurements).sum()
    }

    /// Returns the common measurement count if every UAV has the same `M`.
    pub fn common_measurements(&self) -> Option<usize> {
        let m = self.uavs[0].measurements;
        self.uavs.iter().all(|u| u.measurements == m).then_some(m)
    }
}

/// Region and kinematic limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSet {
    /// r0, meters.
    pub min_horizontal: f64,
    /// h0, meters.
    pub min_height: f64,
    /// c_max, m/s.
    pub max_speed: f64,
    /// t0, seconds between consecutive measurements.
    pub interval: f64,
}

impl ConstraintSet {
    pub fn new(
        min_horizontal: f64,
        min_height: f64,
        max_speed: f64,
        interval: f64,
    ) -> Result<Self, ModelError> {
        let c = Self {
            min_horizontal,
            min_height,
            max_speed,
            interval,
        };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        let bad = |field, value: f64, ok: bool| {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidConstraint { field, value })
            }
        };
        bad(
            "min_horizontal",
            self.min_horizontal,
            self.min_horizontal >= 0.0,
        )?;
        bad("min_height", self.min_height, self.min_height > 0.0)?;
        bad("max_speed", self.max_speed, self.max_speed >= 0.0)?;
        bad("interval", self.interval, self.interval > 0.0)
    }

    /// Largest allowed displacement between consecutive measurements, `t0 c_max`.
    pub fn step_budget(&self) -> f64 {
        self.interval * self.max_speed
    }
}

/// Ground-plane emitter position (z = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPosition {
    pub x: f64,
    pub y: f64,
}

impl TargetPosition {
    pub fn new(x: f64, y: f64) -> Result<Self, ModelError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(ModelError::NonFiniteTarget { x, y })
        }
    }

    pub const ORIGIN: TargetPosition = TargetPosition { x: 0.0, y: 0.0 };

    pub fn distance_to(&self, other: &TargetPosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Target-relative measurement pose `(r, h, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPose {
    r: f64,
    h: f64,
    beta: f64,
}

impl MeasurementPose {
    /// Builds a pose, normalizing `beta` to `[0, 2π)`.
    pub fn new(r: f64, h: f64, beta: f64) -> Result<Self, ModelError> {
        if !(r >= 0.0 && r.is_finite() && h > 0.0 && h.is_finite() && beta.is_finite()) {
            return Err(ModelError::InvalidPose { r, h, beta });
        }
        Ok(Self {
            r,
            h,
            beta: normalize_angle(beta),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Slant range `d = √(r² + h²)`.
    pub fn slant_range(&self) -> f64 {
        self.r.hypot(self.h)
    }

    /// Same pose rotated about the target by `delta` radians.
    pub fn rotated(&self, delta: f64) -> Self {
        Self {
            beta: normalize_angle(self.beta + delta),
            ..*self
        }
    }
}

/// 3-D position of a pose taken about `target`.
pub fn pose_to_position(pose: &MeasurementPose, target: TargetPosition) -> Point3<f64> {
    let (sin, cos) = pose.beta.sin_cos();
    Point3::new(target.x + pose.r * sin, target.y + pose.r * cos, pose.h)
}

/// Inverse of [`pose_to_position`].
pub fn position_to_pose(
    point: &Point3<f64>,
    target: TargetPosition,
) -> Result<MeasurementPose, PoseError> {
    if !(point.z > 0.0 && point.z.is_finite()) {
        return Err(PoseError::NonPositiveHeight(point.z));
    }
    let dx = point.x - target.x;
    let dy = point.y - target.y;
    let r = dx.hypot(dy);
    if r == 0.0 {
        return Err(PoseError::Degenerate(MeasurementPose {
            r: 0.0,
            h: point.z,
            beta: 0.0,
        }));
    }
    Ok(MeasurementPose {
        r,
        h: point.z,
        beta: normalize_angle(dx.atan2(dy)),
    })
}

/// Every UAV's chronological poses, expressed about an anchor point.
///
/// The anchor is the target estimate the plan was built for. Evaluating the
/// plan at another target re-expresses the same physical positions about it
/// (see [`MeasurementPlan::relative_to`]).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    anchor: TargetPosition,
    tracks: Vec<Vec<MeasurementPose>>,
}

impl MeasurementPlan {
    pub fn new(anchor: TargetPosition, tracks: Vec<Vec<MeasurementPose>>) -> Self {
        Self { anchor, tracks }
    }

    /// Builds a plan from absolute 3-D positions, expressing them about `anchor`.
    /// Positions directly above the anchor get `r = 0, β = 0`.
    pub fn from_positions(
        anchor: TargetPosition,
        positions: &[Vec<Point3<f64>>],
    ) -> Result<Self, PoseError> {
        let tracks = positions
            .iter()
            .map(|track| {
                track
                    .iter()
                    .map(|p| match position_to_pose(p, anchor) {
                        Ok(pose) | Err(PoseError::Degenerate(pose)) => Ok(pose),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { anchor, tracks })
    }

    pub fn anchor(&self) -> TargetPosition {
        self.anchor
    }

    pub fn tracks(&self) -> &[Vec<MeasurementPose>] {
        &self.tracks
    }

    pub fn track(&self, uav: usize) -> &[MeasurementPose] {
        &self.tracks[uav]
    }

    pub fn num_uavs(&self) -> usize {
        self.tracks.len()
    }

    pub fn total_poses(&self) -> usize {
        self.tracks.iter().map(Vec::len).sum()
    }

    pub fn positions(&self) -> Vec<Vec<Point3<f64>>> {
        self.tracks
            .iter()
            .map(|t| t.iter().map(|p| pose_to_position(p, self.anchor)).collect())
            .collect()
    }

    /// The same physical positions expressed about `target`.
    pub fn relative_to(&self, target: TargetPosition) -> MeasurementPlan {
        if target == self.anchor {
            return self.clone();
        }
        // heights are positive by construction, so only degeneracy can occur
        Self::from_positions(target, &self.positions())
            .expect("plan heights are positive by construction")
    }

    /// Rotates every bearing by `delta` about the anchor (an equivalent placement).
    pub fn rotated(&self, delta: f64) -> MeasurementPlan {
        Self {
            anchor: self.anchor,
            tracks: self
                .tracks
                .iter()
                .map(|t| t.iter().map(|p| p.rotated(delta)).collect())
                .collect(),
        }
    }

    /// Checks the plan has one track per UAV with `M_i` poses each.
    pub fn check_shape(&self, scenario: &Scenario) -> Result<(), ModelError> {
        if self.tracks.len() != scenario.num_uavs() {
            return Err(ModelError::UavCountMismatch {
                expected: scenario.num_uavs(),
                found: self.tracks.len(),
            });
        }
        for (i, (track, spec)) in self.tracks.iter().zip(scenario.uavs()).enumerate() {
            if track.len() != spec.measurements {
                return Err(ModelError::MeasurementCountMismatch {
                    uav: i,
                    expected: spec.measurements,
                    found: track.len(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `r < r0`.
    MinHorizontal,
    /// `h < h0`.
    MinHeight,
    /// `‖u_j − u_{j−1}‖ > t0 c_max`.
    MaxStep,
}

/// One violated constraint. `margin` is negative: `value - limit` for the
/// lower bounds and `limit - value` for the step bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub uav: usize,
    pub epoch: usize,
    pub kind: ViolationKind,
    pub value: f64,
    pub limit: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

fn violated(margin: f64, limit: f64) -> bool {
    margin < -FEASIBILITY_RTOL * limit.abs().max(1.0)
}

/// Checks every pose of `plan`, re-expressed about `target`, against the
/// region constraints and every consecutive displacement against the step bound.
pub fn validate_plan(
    plan: &MeasurementPlan,
    constraints: &ConstraintSet,
    target: TargetPosition,
) -> ValidationReport {
    let plan = plan.relative_to(target);
    let budget = constraints.step_budget();
    let mut violations = Vec::new();
    for (uav, track) in plan.tracks().iter().enumerate() {
        let mut previous: Option<Point3<f64>> = None;
        for (epoch, pose) in track.iter().enumerate() {
            let margin = pose.r - constraints.min_horizontal;
            if violated(margin, constraints.min_horizontal) {
                violations.push(Violation {
                    uav,
                    epoch,
                    kind: ViolationKind::MinHorizontal,
                    value: pose.r,
                    limit: constraints.min_horizontal,
                    margin,
                });
            }
            let margin = pose.h - constraints.min_height;
            if violated(margin, constraints.min_height) {
                violations.push(Violation {
                    uav,
                    epoch,
                    kind: ViolationKind::MinHeight,
                    value: pose.h,
                    limit: constraints.min_height,
                    margin,
                });
            }
            let here = pose_to_position(pose, target);
            if let Some(prev) = previous {
                let chord = (here - prev).norm();
                let margin = budget - chord;
                if violated(margin, budget) {
                    violations.push(Violation {
                        uav,
                        epoch,
                        kind: ViolationKind::MaxStep,
                        value: chord,
                        limit: budget,
                        margin,
                    });
                }
            }
            previous = Some(here);
        }
    }
    ValidationReport { violations }
}
