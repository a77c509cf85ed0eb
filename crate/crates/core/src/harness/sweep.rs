use std::io::Write;

use super::{ExperimentConfig, HarnessError};
use crate::fim::fim;
use crate::model::{ConstraintSet, MeasurementPlan, MeasurementPose, Scenario, TargetPosition};
use crate::synthesis::plan_hovering;

/// Which horizontal distances move during a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    All,
    /// Only this UAV moves; the others stay at `r*`.
    Single(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub det: f64,
    pub sqrt_crlb: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub argmax_det: f64,
    pub argmin_sqrt_crlb: Option<f64>,
}

/// Hovering plan at the optimal bearings for `r*`, with the horizontal
/// distance of the swept UAVs set to each `r ∈ [r0, r_max]` in steps of `r_step`.
pub fn distance_sweep(
    scenario: &Scenario,
    constraints: &ConstraintSet,
    mode: SweepMode,
    r_max: f64,
    r_step: f64,
) -> Result<SweepResult, HarnessError> {
    if let SweepMode::Single(i) = mode {
        if i >= scenario.num_uavs() {
            return Err(HarnessError::InvalidParameter {
                name: "sweep_uav",
                value: i.to_string(),
            });
        }
    }
    if !(r_step > 0.0) || !(r_max >= constraints.min_horizontal) {
        return Err(HarnessError::InvalidParameter {
            name: "r_max_m",
            value: r_max.to_string(),
        });
    }
    let target = TargetPosition::ORIGIN;
    let base = plan_hovering(scenario, constraints, target)?.plan;
    let h = constraints.min_height;
    let count = ((r_max - constraints.min_horizontal) / r_step + 1e-9).floor() as usize + 1;
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let r = constraints.min_horizontal + k as f64 * r_step;
        let tracks = base
            .tracks()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let moved = match mode {
                    SweepMode::All => true,
                    SweepMode::Single(j) => i == j,
                };
                t.iter()
                    .map(|p| {
                        let r = if moved { r } else { p.r() };
                        MeasurementPose::new(r, h, p.beta())
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let f = fim(&MeasurementPlan::new(target, tracks), target, scenario)?;
        rows.push(SweepRow {
            r,
            det: f.det,
            sqrt_crlb: f.sqrt_crlb_trace(),
        });
    }
    let argmax_det = rows
        .iter()
        .fold(
            &rows[0],
            |best, row| if row.det > best.det { row } else { best },
        )
        .r;
    let argmin_sqrt_crlb = rows
        .iter()
        .filter_map(|row| row.sqrt_crlb.map(|c| (row.r, c)))
        .fold(None, |best: Option<(f64, f64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .map(|(r, _)| r);
    Ok(SweepResult {
        rows,
        argmax_det,
        argmin_sqrt_crlb,
    })
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    config.check_experiment()?;
    let e = &config.experiment;
    let mode = e.sweep_uav.map_or(SweepMode::All, SweepMode::Single);
    distance_sweep(
        &config.scenario()?,
        &config.constraints()?,
        mode,
        e.r_max_m,
        e.r_step_m,
    )
}

/// Columns `r_m,det_fim,sqrt_tr_crlb_m`; the last is empty for a singular FIM.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r_m", "det_fim", "sqrt_tr_crlb_m"])?;
    for row in &result.rows {
        w.write_record([
            row.r.to_string(),
            row.det.to_string(),
            row.sqrt_crlb.map_or(String::new(), |c| c.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
