use std::io::{Read, Write};

use super::{ExperimentConfig, HarnessError};
use crate::fim::{fim, FimSummary};
use crate::model::{
    pose_to_position, validate_plan, MeasurementPlan, MeasurementPose, TargetPosition,
    ValidationReport,
};
use crate::synthesis::{plan_auto, AutoPlan};

const HEADER: [&str; 8] = [
    "uav", "epoch", "x_m", "y_m", "z_m", "r_m", "h_m", "beta_deg",
];

/// Columns `uav,epoch,x_m,y_m,z_m,r_m,h_m,beta_deg`, 0-based indices.
///
/// Absolute coordinates are written with shortest round-trip formatting and
/// are what [`read_plan_csv`] uses; `r_m`, `h_m`, `beta_deg` are relative to
/// the plan anchor and informative.
pub fn write_plan_csv<W: Write>(plan: &MeasurementPlan, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for (i, track) in plan.tracks().iter().enumerate() {
        for (j, pose) in track.iter().enumerate() {
            let p = pose_to_position(pose, plan.anchor());
            w.write_record([
                i.to_string(),
                j.to_string(),
                p.x.to_string(),
                p.y.to_string(),
                p.z.to_string(),
                pose.r().to_string(),
                pose.h().to_string(),
                pose.beta().to_degrees().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn field(
    record: &csv::StringRecord,
    index: usize,
    line: usize,
) -> Result<Option<f64>, HarnessError> {
    match record.get(index).map(str::trim) {
        None | Some("") => Ok(None),
        Some(text) => text.parse().map(Some).map_err(|_| HarnessError::PlanFile {
            line,
            message: format!("{} is not a number: {text:?}", HEADER[index]),
        }),
    }
}

/// Reads a plan written by [`write_plan_csv`] or by hand.
///
/// Rows must list UAVs `0..N` and, within each UAV, epochs `0..M_i` in order.
/// Each row needs either `x_m,y_m,z_m` or `r_m,h_m,beta_deg`; poses are
/// expressed about `anchor`.
pub fn read_plan_csv<R: Read>(
    input: R,
    anchor: TargetPosition,
) -> Result<MeasurementPlan, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = reader.headers().map_err(|e| HarnessError::PlanFile {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(HarnessError::PlanFile {
            line: 1,
            message: format!("expected header {}", HEADER.join(",")),
        });
    }
    let mut tracks: Vec<Vec<MeasurementPose>> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| HarnessError::PlanFile {
            line,
            message: e.to_string(),
        })?;
        let index = |i: usize| -> Result<usize, HarnessError> {
            record
                .get(i)
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| HarnessError::PlanFile {
                    line,
                    message: format!("{} must be a non-negative integer", HEADER[i]),
                })
        };
        let (uav, epoch) = (index(0)?, index(1)?);
        if uav == tracks.len() {
            tracks.push(Vec::new());
        }
        if uav + 1 != tracks.len() || epoch != tracks[uav].len() {
            return Err(HarnessError::PlanFile {
                line,
                message: format!(
                    "expected uav {} epoch {} or the next UAV's epoch 0",
                    tracks.len() - 1,
                    tracks[tracks.len() - 1].len()
                ),
            });
        }
        let xyz = (
            field(&record, 2, line)?,
            field(&record, 3, line)?,
            field(&record, 4, line)?,
        );
        let rhb = (
            field(&record, 5, line)?,
            field(&record, 6, line)?,
            field(&record, 7, line)?,
        );
        let pose = match (xyz, rhb) {
            ((Some(x), Some(y), Some(z)), _) => {
                crate::model::position_to_pose(&nalgebra::Point3::new(x, y, z), anchor).map_err(
                    |e| HarnessError::PlanFile {
                        line,
                        message: format!("{e:?}"),
                    },
                )?
            }
            (_, (Some(r), Some(h), Some(b))) => MeasurementPose::new(r, h, b.to_radians())
                .map_err(|e| HarnessError::PlanFile {
                    line,
                    message: e.to_string(),
                })?,
            _ => {
                return Err(HarnessError::PlanFile {
                    line,
                    message: "row needs x_m,y_m,z_m or r_m,h_m,beta_deg".into(),
                })
            }
        };
        tracks[uav].push(pose);
    }
    if tracks.is_empty() {
        return Err(HarnessError::PlanFile {
            line: 1,
            message: "plan has no rows".into(),
        });
    }
    Ok(MeasurementPlan::new(anchor, tracks))
}

/// Output of [`run_plan`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlanReport {
    pub auto: AutoPlan,
    pub feasibility: ValidationReport,
}

impl PlanReport {
    pub fn summary(&self) -> String {
        let s = &self.auto.synthesized;
        let c = &s.classification;
        format!(
            "flight state: {:?}\nconfiguration: {}\nweights: {:?} (dominant UAV {}, ϖa = {:.6e}, ϖb = {:.6e})\n\
             r* = {} m, h* = {} m\ndet F = {:.9e}\nbound = {:.9e}{}\nfeasible: {}\n",
            self.auto.flight_state,
            s.configuration,
            c.verdict,
            c.dominant,
            c.dominant_weight,
            c.rest_weight,
            s.radial.r_star,
            s.radial.h_star,
            self.auto.achieved_det,
            s.bound,
            if s.suboptimal { " (upper bound, schedule not proven optimal)" } else { "" },
            self.feasibility.is_feasible(),
        )
    }
}

/// `plan_auto` for the configured scenario, built around the prior target.
pub fn run_plan(config: &ExperimentConfig) -> Result<PlanReport, HarnessError> {
    let scenario = config.scenario()?;
    let constraints = config.constraints()?;
    let prior = config.prior()?;
    let auto = plan_auto(&scenario, &constraints, prior)?;
    let feasibility = validate_plan(auto.plan(), &constraints, prior);
    Ok(PlanReport { auto, feasibility })
}

/// Output of [`run_eval`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub fim: FimSummary,
    pub feasibility: ValidationReport,
}

impl EvalReport {
    pub fn summary(&self) -> String {
        let mut out = format!(
            "det F = {:.9e}\nsqrt(tr CRLB) = {}\nfeasible: {}\n",
            self.fim.det,
            self.fim
                .sqrt_crlb_trace()
                .map_or("inf (singular FIM)".to_string(), |v| format!("{v:.9} m")),
            self.feasibility.is_feasible()
        );
        for v in &self.feasibility.violations {
            out.push_str(&format!(
                "violation: uav {} epoch {} {:?}: {} vs limit {}\n",
                v.uav, v.epoch, v.kind, v.value, v.limit
            ));
        }
        out
    }
}

/// Evaluates `plan` for the configured scenario: FIM at the true target,
/// feasibility about the prior target.
pub fn run_eval(
    config: &ExperimentConfig,
    plan: &MeasurementPlan,
) -> Result<EvalReport, HarnessError> {
    let scenario = config.scenario()?;
    let constraints = config.constraints()?;
    Ok(EvalReport {
        fim: fim(plan, config.target()?, &scenario)?,
        feasibility: validate_plan(plan, &constraints, config.prior()?),
    })
}
