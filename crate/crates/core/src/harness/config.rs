use std::path::Path;

use serde::Deserialize;

use super::HarnessError;
use crate::model::{ConstraintSet, Scenario, TargetPosition};

/// Experiment description read from a TOML file.
///
/// ```toml
/// [scenario]
/// p0_db = -30.0
/// gamma = 3.0
/// noise_variances_db2 = [8.0, 12.0, 16.0]
/// measurements = 16            # or one count per UAV
///
/// [constraints]
/// min_horizontal_m = 60.0
/// min_height_m = 100.0
/// max_speed_mps = 10.0
/// interval_s = 5.0
///
/// [target]
/// x_m = 0.0
/// y_m = 0.0
///
/// [experiment]
/// kind = "grid"
/// resolution_deg = 1.0
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSection,
    pub constraints: ConstraintsSection,
    #[serde(default)]
    pub target: TargetSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default)]
    pub p0_db: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub noise_variances_db2: Vec<f64>,
    pub measurements: Measurements,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Measurements {
    Common(usize),
    PerUav(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsSection {
    pub min_horizontal_m: f64,
    pub min_height_m: f64,
    #[serde(default)]
    pub max_speed_mps: f64,
    #[serde(default = "default_interval")]
    pub interval_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    #[serde(default)]
    pub x_m: f64,
    #[serde(default)]
    pub y_m: f64,
    /// Prior estimate the plan is built around; defaults to the true target.
    pub prior_x_m: Option<f64>,
    pub prior_y_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Plan,
    Eval,
    Grid,
    Sweep,
    Montecarlo,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: Option<ExperimentKind>,
    #[serde(default = "default_resolution")]
    pub resolution_deg: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_prior_std")]
    pub prior_std_m: Vec<f64>,
    /// Sweep a single UAV (0-based) instead of all of them.
    pub sweep_uav: Option<usize>,
    #[serde(default = "default_r_max")]
    pub r_max_m: f64,
    #[serde(default = "default_r_step")]
    pub r_step_m: f64,
    /// Coarse ML grid points per axis; the estimator default when absent.
    pub grid_points: Option<usize>,
    /// Arc flown by the below-half-circle configuration in Monte Carlo runs.
    #[serde(default = "default_arc")]
    pub below_half_arc_deg: f64,
    /// Flip index of the beyond-half-circle configuration in Monte Carlo runs.
    pub beyond_half_flip: Option<usize>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            kind: None,
            resolution_deg: default_resolution(),
            trials: default_trials(),
            seed: 0,
            prior_std_m: default_prior_std(),
            sweep_uav: None,
            r_max_m: default_r_max(),
            r_step_m: default_r_step(),
            grid_points: None,
            below_half_arc_deg: default_arc(),
            beyond_half_flip: None,
        }
    }
}

fn default_gamma() -> f64 {
    3.0
}
fn default_interval() -> f64 {
    1.0
}
fn default_resolution() -> f64 {
    1.0
}
fn default_trials() -> usize {
    500
}
fn default_prior_std() -> Vec<f64> {
    vec![0.0, 10.0, 20.0, 40.0]
}
fn default_r_max() -> f64 {
    300.0
}
fn default_r_step() -> f64 {
    1.0
}
fn default_arc() -> f64 {
    90.0
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Parse {
            source_name: "<config>".into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| HarnessError::Parse {
            source_name: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn scenario(&self) -> Result<Scenario, HarnessError> {
        let s = &self.scenario;
        let counts = match &s.measurements {
            Measurements::Common(m) => vec![*m; s.noise_variances_db2.len()],
            Measurements::PerUav(v) => v.clone(),
        };
        Ok(Scenario::from_lists(
            s.p0_db,
            s.gamma,
            &s.noise_variances_db2,
            &counts,
        )?)
    }

    pub fn constraints(&self) -> Result<ConstraintSet, HarnessError> {
        let c = &self.constraints;
        Ok(ConstraintSet::new(
            c.min_horizontal_m,
            c.min_height_m,
            c.max_speed_mps,
            c.interval_s,
        )?)
    }

    pub fn target(&self) -> Result<TargetPosition, HarnessError> {
        Ok(TargetPosition::new(self.target.x_m, self.target.y_m)?)
    }

    /// Prior target estimate; the true target where not given.
    pub fn prior(&self) -> Result<TargetPosition, HarnessError> {
        let t = &self.target;
        Ok(TargetPosition::new(
            t.prior_x_m.unwrap_or(t.x_m),
            t.prior_y_m.unwrap_or(t.y_m),
        )?)
    }

    pub fn check_experiment(&self) -> Result<(), HarnessError> {
        let e = &self.experiment;
        let bad =
            |name: &'static str, value: String| Err(HarnessError::InvalidParameter { name, value });
        if !(e.resolution_deg > 0.0 && e.resolution_deg.is_finite()) {
            return bad("resolution_deg", e.resolution_deg.to_string());
        }
        if e.trials == 0 {
            return bad("trials", "0".into());
        }
        if !(e.r_step_m > 0.0 && e.r_step_m.is_finite()) {
            return bad("r_step_m", e.r_step_m.to_string());
        }
        if !e.r_max_m.is_finite() {
            return bad("r_max_m", e.r_max_m.to_string());
        }
        if let Some(v) = e
            .prior_std_m
            .iter()
            .find(|v| !(**v >= 0.0 && v.is_finite()))
        {
            return bad("prior_std_m", v.to_string());
        }
        if e.grid_points.is_some_and(|n| n < 2) {
            return bad("grid_points", format!("{:?}", e.grid_points));
        }
        if !(e.below_half_arc_deg >= 0.0 && e.below_half_arc_deg < 180.0) {
            return bad("below_half_arc_deg", e.below_half_arc_deg.to_string());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
noise_variances_db2 = [8.0, 12.0, 16.0]
measurements = 16

[constraints]
min_horizontal_m = 60.0
min_height_m = 100.0
"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.scenario.gamma, 3.0);
        assert_eq!(c.experiment.trials, 500);
        assert_eq!(c.scenario().unwrap().total_measurements(), 48);
        assert_eq!(c.prior().unwrap(), c.target().unwrap());
        c.check_experiment().unwrap();
    }

    #[test]
    fn per_uav_counts() {
        let text = MINIMAL.replace("measurements = 16", "measurements = [4, 5, 6]");
        let c = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(c.scenario().unwrap().total_measurements(), 15);
    }

    #[test]
    fn parse_errors_carry_position() {
        let text = MINIMAL.replace("measurements = 16", "measurements = \"x\"");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line"), "{err}");
        let err = ExperimentConfig::from_toml_str(&format!("{MINIMAL}\nbogus = 1\n")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_values_are_input_errors() {
        let text = MINIMAL.replace("min_height_m = 100.0", "min_height_m = -1.0");
        let c = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(c.constraints().unwrap_err().exit_code(), 1);
        let text = format!("{MINIMAL}\n[experiment]\ntrials = 0\n");
        let c = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(c.check_experiment().unwrap_err().exit_code(), 1);
    }
}
