//! Scenario files: a design, a pressure and one command source.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vinelock_core::kinematics::DEFAULT_SAMPLES_PER_MM;
use vinelock_core::{Command, DesignParams, Plan, Polyline, Pose, TensionMode};

use crate::error::{CliError, Result};
use crate::files;

fn default_density() -> f64 {
    DEFAULT_SAMPLES_PER_MM
}

fn default_tol() -> f64 {
    5.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOptions {
    #[serde(default)]
    pub disturbance: bool,
    /// Centerline sampling density of the emitted geometry, points per mm.
    #[serde(default = "default_density")]
    pub samples_per_mm: f64,
    /// Fit tolerance for waypoint targets, mm.
    #[serde(default = "default_tol")]
    pub tol_mm: f64,
    #[serde(default)]
    pub tension_mode: TensionMode,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            disturbance: false,
            samples_per_mm: default_density(),
            tol_mm: default_tol(),
            tension_mode: TensionMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Source {
    Plan(Plan),
    CommandScript(Vec<Command>),
    /// Waypoints `[x_mm, y_mm]`; fitted and planned before simulation.
    TargetWaypoints(Polyline),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub design: DesignParams,
    /// Gauge pressure, kPa.
    pub pressure: f64,
    /// Start pose for command scripts; plans and fitted targets carry their
    /// own unless this is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Pose>,
    pub source: Source,
    #[serde(default)]
    pub options: ScenarioOptions,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let scenario: ScenarioFile = files::read_json(path)?;
        scenario.validate(path)?;
        Ok(scenario)
    }

    /// Checks the rules serde cannot express; errors carry JSON pointers.
    pub fn validate(&self, file: &Path) -> Result<()> {
        self.design.validate().map_err(|e| CliError::schema(file, "/design", e))?;
        if !(self.pressure > 0.0 && self.pressure.is_finite()) {
            return Err(CliError::schema(file, "/pressure", format!("pressure {} kPa must be positive", self.pressure)));
        }
        let o = &self.options;
        if !(o.samples_per_mm > 0.0 && o.samples_per_mm.is_finite()) {
            return Err(CliError::schema(file, "/options/samples_per_mm", "density must be positive"));
        }
        if !(o.tol_mm > 0.0 && o.tol_mm.is_finite()) {
            return Err(CliError::schema(file, "/options/tol_mm", "tolerance must be positive"));
        }
        let check_steps = |prefix: &str, steps: &[Command]| -> Result<()> {
            for (i, cmd) in steps.iter().enumerate() {
                cmd.validate().map_err(|e| CliError::schema(file, format!("{prefix}/{i}"), e))?;
            }
            Ok(())
        };
        match &self.source {
            Source::Plan(plan) => check_steps("/source/Plan/steps", &plan.steps)?,
            Source::CommandScript(cmds) => check_steps("/source/CommandScript", cmds)?,
            Source::TargetWaypoints(w) if w.len() < 2 => {
                return Err(CliError::schema(file, "/source/TargetWaypoints", "need at least 2 distinct waypoints"));
            }
            Source::TargetWaypoints(_) => {}
        }
        Ok(())
    }
}

/// Reads a standalone design file.
pub fn load_design(path: &Path) -> Result<DesignParams> {
    let design: DesignParams = files::read_json(path)?;
    design.validate().map_err(|e| CliError::schema(path, "/", e))?;
    Ok(design)
}
