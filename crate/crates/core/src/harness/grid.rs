use std::io::Write;

use super::{ExperimentConfig, HarnessError};
use crate::fim::{fim_from_bearings, WeightSet};
use crate::model::{ConstraintSet, Scenario};
use crate::synthesis::radial_optimum;

/// Brute-force `det F` over `(β₂, β₃)` with `β₁ = 0`, all UAVs hovering at `(r*, h*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// Shared axis for `β₂` and `β₃`, degrees.
    pub axis_deg: Vec<f64>,
    /// `det[i * n + j]` at `β₂ = axis[i]`, `β₃ = axis[j]`.
    pub det: Vec<f64>,
    pub max: f64,
    /// Grid points within `1e-9` relative of the maximum, sorted.
    pub argmax: Vec<(f64, f64)>,
}

impl GridResult {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.det[i * self.axis_deg.len() + j]
    }
}

pub fn grid_det(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    resolution_deg: f64,
) -> Result<GridResult, HarnessError> {
    if scenario.num_uavs() != 3 {
        return Err(HarnessError::UnsupportedShape(scenario.num_uavs()));
    }
    constraints.check()?;
    let steps = (360.0 / resolution_deg).round();
    if !(resolution_deg > 0.0) || steps < 1.0 || (steps * resolution_deg - 360.0).abs() > 1e-9 {
        return Err(HarnessError::InvalidParameter {
            name: "resolution_deg",
            value: resolution_deg.to_string(),
        });
    }
    let n = steps as usize;
    let radial = radial_optimum(constraints);
    let w = WeightSet::at_common_range(scenario, radial.r_star, radial.h_star);
    let w = w.values();
    let axis_deg: Vec<f64> = (0..n).map(|k| k as f64 * resolution_deg).collect();
    let mut det = Vec::with_capacity(n * n);
    for &b2 in &axis_deg {
        for &b3 in &axis_deg {
            let f = fim_from_bearings(
                scenario.gamma(),
                [
                    (w[0], 0.0),
                    (w[1], b2.to_radians()),
                    (w[2], b3.to_radians()),
                ],
            );
            det.push(f.det.max(0.0));
        }
    }
    let max = det.iter().copied().fold(0.0, f64::max);
    let argmax = det
        .iter()
        .enumerate()
        .filter(|(_, &d)| d >= max * (1.0 - 1e-9))
        .map(|(k, _)| (axis_deg[k / n], axis_deg[k % n]))
        .collect();
    Ok(GridResult {
        axis_deg,
        det,
        max,
        argmax,
    })
}

pub fn run_grid(config: &ExperimentConfig) -> Result<GridResult, HarnessError> {
    config.check_experiment()?;
    grid_det(
        &config.scenario()?,
        &config.constraints()?,
        config.experiment.resolution_deg,
    )
}

/// Columns `beta2_deg,beta3_deg,det_fim`, one row per grid point.
pub fn write_grid_csv<W: Write>(result: &GridResult, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta2_deg", "beta3_deg", "det_fim"])?;
    let n = result.axis_deg.len();
    for i in 0..n {
        for j in 0..n {
            w.write_record([
                result.axis_deg[i].to_string(),
                result.axis_deg[j].to_string(),
                result.at(i, j).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
