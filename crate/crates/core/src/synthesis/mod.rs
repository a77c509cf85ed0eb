//! Optimal measurement configurations.
//!
//! For a fixed set of ranges and heights the FIM determinant splits into a
//! weight term and an angular term. The weight term is maximized by flying
//! every UAV at `r* = max(r0, h0)`, `h* = h0` ([`radial_optimum`]). The
//! angular term depends on whether the largest weight is at most half of the
//! total ([`classify`]): regular weight sets admit a tight frame
//! ([`regular_angles`]), irregular ones are best served by putting every
//! other UAV orthogonal to the dominant one ([`irregular_angles`]).
//!
//! The planners then schedule bearings over time for each flight state:
//! hovering, flying less than half a circle, the flipped uniform angular
//! array, and the full uniform angular array.

mod angles;
mod planners;

pub use angles::{closure_residual, irregular_angles, regular_angles};
pub use planners::{
    plan_auto, plan_below_half, plan_beyond_half, plan_full_circle, plan_hovering, AutoPlan,
    Configuration, SynthesizedPlan,
};

use std::f64::consts::PI;

use thiserror::Error;

use crate::fim::{FimError, WeightSet};
use crate::model::{ConstraintSet, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthesisError {
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error(
        "weights are irregular (max {max} > half of total {half_total}); no tight frame exists"
    )]
    InfeasibleClosure { max: f64, half_total: f64 },
    #[error("UAV {uav} epoch {epoch}: step {chord} m exceeds t0*c_max = {budget} m")]
    InfeasibleSpeed {
        uav: usize,
        epoch: usize,
        chord: f64,
        budget: f64,
    },
    #[error("UAV {uav}: flip index K={k} must satisfy ceil(M/2) <= K < M with M={m} > 2")]
    InvalidFlipIndex { uav: usize, k: usize, m: usize },
    #[error("expected {expected} flip indices, got {found}")]
    FlipIndexCount { expected: usize, found: usize },
    #[error("speed fraction must lie in [0, 1], got {0}")]
    InvalidSpeedFraction(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fim(#[from] FimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Regular,
    Irregular,
}

/// Which closed-form optimum applies to a weight set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseClassification {
    pub verdict: Verdict,
    /// Index of the largest weight (lowest index on ties).
    pub dominant: usize,
    /// ϖ_a, the dominant weight.
    pub dominant_weight: f64,
    /// ϖ_b, the sum of all other weights.
    pub rest_weight: f64,
    /// Ψ₁ = ¼ c (ϖ_a + ϖ_b)².
    pub psi_regular: f64,
    /// Ψ₂ = c ϖ_a ϖ_b.
    pub psi_irregular: f64,
}

impl CaseClassification {
    /// The maximum determinant attainable with these weights.
    pub fn bound(&self) -> f64 {
        match self.verdict {
            Verdict::Regular => self.psi_regular,
            Verdict::Irregular => self.psi_irregular,
        }
    }
}

pub fn classify(weights: &WeightSet) -> Result<CaseClassification, SynthesisError> {
    let values = weights.values();
    let (dominant, dominant_weight) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, w)| {
                if w > best.1 {
                    (i, w)
                } else {
                    best
                }
            });
    if !(dominant_weight > 0.0) {
        return Err(SynthesisError::AllZeroWeights);
    }
    let total = weights.total();
    let rest_weight = total - dominant_weight;
    let c = weights.information_scale();
    let verdict = if dominant_weight <= 0.5 * total {
        Verdict::Regular
    } else {
        Verdict::Irregular
    };
    Ok(CaseClassification {
        verdict,
        dominant,
        dominant_weight,
        rest_weight,
        psi_regular: 0.25 * c * total * total,
        psi_irregular: c * dominant_weight * rest_weight,
    })
}

/// Optimal horizontal distance, height and slant range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptimum {
    pub r_star: f64,
    pub h_star: f64,
    pub d_star: f64,
}

impl RadialOptimum {
    /// Elevation angle of the UAVs seen from the target, radians.
    pub fn elevation(&self) -> f64 {
        self.h_star.atan2(self.r_star)
    }
}

/// `r* = max(r0, h0)`, `h* = h0`: `r²/d⁴` peaks at `r = h` and falls off in `h`.
pub fn radial_optimum(constraints: &ConstraintSet) -> RadialOptimum {
    let r_star = constraints.min_horizontal.max(constraints.min_height);
    let h_star = constraints.min_height;
    RadialOptimum {
        r_star,
        h_star,
        d_star: r_star.hypot(h_star),
    }
}

/// How much of the circle of radius `r*` a UAV can cover in its `M` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlightState {
    Hovering,
    /// `0 < t0 M c_max < π r*`.
    BelowHalfCircle,
    /// `π r* ≤ t0 M c_max < 2π r*`; carries the default flip index `K = ⌈M/2⌉`.
    BeyondHalfCircle {
        k: usize,
    },
    /// `t0 M c_max ≥ 2π r*`.
    FullCircle,
}

impl FlightState {
    /// Capability order: hovering < below half < beyond half < full circle.
    pub fn rank(&self) -> u8 {
        match self {
            FlightState::Hovering => 0,
            FlightState::BelowHalfCircle => 1,
            FlightState::BeyondHalfCircle { .. } => 2,
            FlightState::FullCircle => 3,
        }
    }
}

pub fn flight_state(constraints: &ConstraintSet, measurements: usize, r_star: f64) -> FlightState {
    if constraints.max_speed == 0.0 {
        return FlightState::Hovering;
    }
    let travel = constraints.step_budget() * measurements as f64;
    if travel >= 2.0 * PI * r_star {
        FlightState::FullCircle
    } else if travel >= PI * r_star {
        FlightState::BeyondHalfCircle {
            k: measurements.div_ceil(2),
        }
    } else {
        FlightState::BelowHalfCircle
    }
}
