//! D-optimal measurement geometry for swarms of RSS-sensing UAVs.
//!
//! A stationary ground emitter at `s = (x, y, 0)` is observed by `N` UAVs,
//! each taking `M_i` received-signal-strength measurements under the
//! log-distance path-loss model `R = p0 - 10 γ log10(d) + η`. The UAVs must
//! stay at least `r0` away horizontally, fly no lower than `h0`, and move at
//! most `t0 * c_max` between consecutive measurements.
//!
//! The crate is organised as:
//!
//! - [`model`]: scenarios, constraint sets, measurement poses and plans,
//!   pose/position conversion and plan feasibility checks.
//! - [`fim`]: the 2x2 Fisher information matrix, closed-form determinant
//!   bounds, and a finite-difference Fisher oracle.
//! - [`synthesis`]: weight classification, optimal range/height, optimal
//!   bearing constructions and complete plans for every flight state.
//! - [`estimator`]: RSS simulation, maximum-likelihood localization and the
//!   CRLB error bound.
//! - [`harness`]: config files, angle-grid and distance-sweep oracles,
//!   Monte Carlo robustness studies, plan files and CSV output.
//!
//! ```
//! use swarmloc::model::{ConstraintSet, Scenario, TargetPosition, UavSpec};
//! use swarmloc::synthesis::plan_auto;
//!
//! let uavs = vec![UavSpec::new(16.0, 16).unwrap(); 3];
//! let scenario = Scenario::new(0.0, 3.0, uavs).unwrap();
//! let constraints = ConstraintSet::new(60.0, 100.0, 10.0, 5.0).unwrap();
//! let target = TargetPosition::new(0.0, 0.0).unwrap();
//!
//! let auto = plan_auto(&scenario, &constraints, target).unwrap();
//! assert!(swarmloc::model::validate_plan(auto.plan(), &constraints, target).is_feasible());
//! assert!((auto.achieved_det - auto.synthesized.bound).abs() <= 1e-9 * auto.synthesized.bound);
//! ```

pub mod estimator;
pub mod fim;
pub mod harness;
pub mod model;
pub mod synthesis;

/// Relative closeness used by tests and reports: `|a - b| <= tol * max(|a|, |b|)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= tol * scale || a == b
}
