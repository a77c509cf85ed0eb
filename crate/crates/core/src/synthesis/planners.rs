use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{
    classify, flight_state, irregular_angles, radial_optimum, regular_angles, CaseClassification,
    FlightState, RadialOptimum, SynthesisError, Verdict,
};
use crate::fim::{self, WeightSet};
use crate::model::{
    validate_plan, ConstraintSet, MeasurementPlan, MeasurementPose, Scenario, TargetPosition,
    ViolationKind,
};

/// Which schedule produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Configuration {
    Hovering,
    BelowHalfCircle,
    BeyondHalfCircle,
    FullCircle,
}

impl Configuration {
    pub const ALL: [Configuration; 4] = [
        Configuration::Hovering,
        Configuration::BelowHalfCircle,
        Configuration::BeyondHalfCircle,
        Configuration::FullCircle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Configuration::Hovering => "hovering",
            Configuration::BelowHalfCircle => "below_half",
            Configuration::BeyondHalfCircle => "beyond_half",
            Configuration::FullCircle => "full_circle",
        }
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A synthesized plan with the closed-form determinant it is meant to attain.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedPlan {
    pub plan: MeasurementPlan,
    pub configuration: Configuration,
    pub radial: RadialOptimum,
    /// Classification of the aggregated weights `M_i σ_i⁻² (r*)²/(d*)⁴`.
    pub classification: CaseClassification,
    /// Closed-form optimum for this configuration; an upper bound when `suboptimal`.
    pub bound: f64,
    /// Set when the schedule is not proven optimal for this scenario.
    pub suboptimal: bool,
}

fn track(radial: &RadialOptimum, betas: impl IntoIterator<Item = f64>) -> Vec<MeasurementPose> {
    betas
        .into_iter()
        .map(|b| {
            MeasurementPose::new(radial.r_star, radial.h_star, b)
                .expect("radial optimum is a valid pose")
        })
        .collect()
}

fn aggregated(
    scenario: &Scenario,
    radial: &RadialOptimum,
) -> Result<CaseClassification, SynthesisError> {
    classify(&WeightSet::at_common_range(
        scenario,
        radial.r_star,
        radial.h_star,
    ))
}

/// One bearing per UAV for weights `w_i`, regular or irregular as appropriate.
fn snapshot_angles(weights: &WeightSet) -> Result<(CaseClassification, Vec<f64>), SynthesisError> {
    let cls = classify(weights)?;
    let betas = match cls.verdict {
        Verdict::Regular => regular_angles(weights.values())?,
        Verdict::Irregular => irregular_angles(weights.len(), cls.dominant),
    };
    Ok((cls, betas))
}

fn check_steps(plan: &MeasurementPlan, constraints: &ConstraintSet) -> Result<(), SynthesisError> {
    let report = validate_plan(plan, constraints, plan.anchor());
    match report
        .violations
        .iter()
        .find(|v| v.kind == ViolationKind::MaxStep)
    {
        Some(v) => Err(SynthesisError::InfeasibleSpeed {
            uav: v.uav,
            epoch: v.epoch,
            chord: v.value,
            budget: v.limit,
        }),
        None => Ok(()),
    }
}

/// Every UAV hovers at `(r*, h*)` for all of its measurements.
///
/// Bearings come from the tight-frame construction when the weights
/// `M_i σ_i⁻²` are regular, and from the orthogonal construction otherwise.
pub fn plan_hovering(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    anchor: TargetPosition,
) -> Result<SynthesizedPlan, SynthesisError> {
    constraints.check()?;
    let radial = radial_optimum(constraints);
    let weights = WeightSet::at_common_range(scenario, radial.r_star, radial.h_star);
    let (classification, betas) = snapshot_angles(&weights)?;
    let tracks = scenario
        .uavs()
        .iter()
        .zip(&betas)
        .map(|(u, &b)| track(&radial, std::iter::repeat_n(b, u.measurements())))
        .collect();
    Ok(SynthesizedPlan {
        plan: MeasurementPlan::new(anchor, tracks),
        configuration: Configuration::Hovering,
        radial,
        classification,
        bound: classification.bound(),
        suboptimal: false,
    })
}

/// Optimal single-epoch snapshot for weights `σ_i⁻²`, used as the starting
/// bearing of every moving schedule.
fn start_bearings(scenario: &Scenario) -> Result<(CaseClassification, Vec<f64>), SynthesisError> {
    let per_epoch = WeightSet::new(
        scenario.uavs().iter().map(|u| u.precision()).collect(),
        scenario.gamma(),
    )?;
    snapshot_angles(&per_epoch)
}

/// Per-epoch increment so that the chord `2 r* sin(Δβ/2)` equals `distance`.
fn chord_increment(distance: f64, r_star: f64) -> f64 {
    2.0 * (distance / (2.0 * r_star)).min(1.0).asin()
}

/// All UAVs start from an optimal single-measurement snapshot and rotate
/// about the anchor by the same bearing increment every epoch.
///
/// The increment makes each step's chord `speed_fraction · t0 · c_max`.
/// The snapshot uses weights `σ_i⁻²`; it is optimal for equal `M_i` and a
/// regular snapshot, and flagged `suboptimal` otherwise.
pub fn plan_below_half(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    anchor: TargetPosition,
    speed_fraction: f64,
) -> Result<SynthesizedPlan, SynthesisError> {
    constraints.check()?;
    if !(0.0..=1.0).contains(&speed_fraction) {
        return Err(SynthesisError::InvalidSpeedFraction(speed_fraction));
    }
    let radial = radial_optimum(constraints);
    let (snapshot, start) = start_bearings(scenario)?;
    let increment = chord_increment(speed_fraction * constraints.step_budget(), radial.r_star);
    let tracks = scenario
        .uavs()
        .iter()
        .zip(&start)
        .map(|(u, &b0)| {
            track(
                &radial,
                (0..u.measurements()).map(|j| b0 + j as f64 * increment),
            )
        })
        .collect();
    let classification = aggregated(scenario, &radial)?;
    let plan = MeasurementPlan::new(anchor, tracks);
    check_steps(&plan, constraints)?;
    Ok(SynthesizedPlan {
        plan,
        configuration: Configuration::BelowHalfCircle,
        radial,
        bound: classification.psi_regular,
        classification,
        suboptimal: snapshot.verdict == Verdict::Irregular
            || scenario.common_measurements().is_none(),
    })
}

fn uniform_angular_array(measurements: usize) -> Vec<f64> {
    match measurements {
        1 => vec![0.0],
        // right-angle structure
        2 => vec![0.0, FRAC_PI_2],
        m => (0..m).map(|j| TAU * j as f64 / m as f64).collect(),
    }
}

/// Each UAV flies a uniform angular array around the anchor, starting from
/// its bearing in the optimal single-epoch snapshot.
pub fn plan_full_circle(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    anchor: TargetPosition,
) -> Result<SynthesizedPlan, SynthesisError> {
    constraints.check()?;
    let radial = radial_optimum(constraints);
    let (_, start) = start_bearings(scenario)?;
    let tracks = scenario
        .uavs()
        .iter()
        .zip(&start)
        .map(|(u, &b0)| {
            track(
                &radial,
                uniform_angular_array(u.measurements())
                    .into_iter()
                    .map(|b| b0 + b),
            )
        })
        .collect();
    let plan = MeasurementPlan::new(anchor, tracks);
    check_steps(&plan, constraints)?;
    let classification = aggregated(scenario, &radial)?;
    Ok(SynthesizedPlan {
        plan,
        configuration: Configuration::FullCircle,
        radial,
        bound: classification.psi_regular,
        classification,
        // a single bearing cannot form a tight frame on its own
        suboptimal: scenario.uavs().iter().any(|u| u.measurements() < 2),
    })
}

/// Uniform angular array with every measurement after the `K_i`-th one
/// reflected through the anchor (bearing − π). Starting bearings are those
/// of [`plan_full_circle`].
///
/// Reflection leaves `g gᵀ` unchanged, so the FIM equals the full-circle one.
pub fn plan_beyond_half(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    anchor: TargetPosition,
    flip: &[usize],
) -> Result<SynthesizedPlan, SynthesisError> {
    constraints.check()?;
    if flip.len() != scenario.num_uavs() {
        return Err(SynthesisError::FlipIndexCount {
            expected: scenario.num_uavs(),
            found: flip.len(),
        });
    }
    for (uav, (u, &k)) in scenario.uavs().iter().zip(flip).enumerate() {
        let m = u.measurements();
        if m <= 2 || k < m.div_ceil(2) || k >= m {
            return Err(SynthesisError::InvalidFlipIndex { uav, k, m });
        }
    }
    let radial = radial_optimum(constraints);
    let (_, start) = start_bearings(scenario)?;
    let tracks = scenario
        .uavs()
        .iter()
        .zip(flip)
        .zip(&start)
        .map(|((u, &k), &b0)| {
            let m = u.measurements();
            track(
                &radial,
                (0..m).map(|j| {
                    let b = b0 + TAU * j as f64 / m as f64;
                    if j < k {
                        b
                    } else {
                        b - PI
                    }
                }),
            )
        })
        .collect();
    let plan = MeasurementPlan::new(anchor, tracks);
    check_steps(&plan, constraints)?;
    let classification = aggregated(scenario, &radial)?;
    Ok(SynthesizedPlan {
        plan,
        configuration: Configuration::BeyondHalfCircle,
        radial,
        bound: classification.psi_regular,
        classification,
        suboptimal: false,
    })
}

/// Output of [`plan_auto`].
#[derive(Debug, Clone, PartialEq)]
pub struct AutoPlan {
    pub synthesized: SynthesizedPlan,
    /// Most restrictive flight state over all UAVs.
    pub flight_state: FlightState,
    /// `det F` of the emitted plan at its anchor.
    pub achieved_det: f64,
}

impl AutoPlan {
    pub fn plan(&self) -> &MeasurementPlan {
        &self.synthesized.plan
    }
}

/// Picks the flight state the constraints allow and emits the matching plan.
///
/// In the beyond-half-circle state the flipped array is tried first. Its step
/// across the flip is `2 r* cos(π/M)`, which the per-step budget of that
/// state rarely covers; the planner then falls back to the below-half-circle
/// schedule, which is optimal for every state short of a full circle when the
/// snapshot weights are regular.
pub fn plan_auto(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    anchor: TargetPosition,
) -> Result<AutoPlan, SynthesisError> {
    constraints.check()?;
    let radial = radial_optimum(constraints);
    let state = scenario
        .uavs()
        .iter()
        .map(|u| flight_state(constraints, u.measurements(), radial.r_star))
        .min_by_key(FlightState::rank)
        .expect("scenario has at least one UAV");

    let synthesized = match state {
        FlightState::Hovering => plan_hovering(scenario, constraints, anchor)?,
        FlightState::BelowHalfCircle => plan_below_half(scenario, constraints, anchor, 1.0)?,
        FlightState::BeyondHalfCircle { .. } => {
            let flip: Vec<usize> = scenario
                .uavs()
                .iter()
                .map(|u| u.measurements().div_ceil(2))
                .collect();
            match plan_beyond_half(scenario, constraints, anchor, &flip) {
                Ok(p) => p,
                Err(
                    SynthesisError::InfeasibleSpeed { .. }
                    | SynthesisError::InvalidFlipIndex { .. },
                ) => plan_below_half(scenario, constraints, anchor, 1.0)?,
                Err(e) => return Err(e),
            }
        }
        FlightState::FullCircle => plan_full_circle(scenario, constraints, anchor)?,
    };
    let achieved_det = fim::fim(&synthesized.plan, anchor, scenario)?.det;
    Ok(AutoPlan {
        synthesized,
        flight_state: state,
        achieved_det,
    })
}
