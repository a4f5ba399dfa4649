//! Models and tools for growing robots that lock bends passively with
//! hook-and-loop fasteners applied by a tip mount.
//!
//! - [`kinematics`]: arc/line shape geometry, bend-radius limits and the
//!   configuration-accuracy metric.
//! - [`statics`]: bend-holding torque balance, fastener separation pressure,
//!   stiffness models and fastener calibration.
//! - [`sim`]: the deployment state machine (grow, tension, pressure).
//! - [`planner`]: command schedules for target shapes and arc/line fitting
//!   of waypoint targets.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod kinematics;
pub mod lsq;
pub mod planner;
pub mod sim;
pub mod statics;

pub use kinematics::{
    bend_angle_from_lengths, contraction_ratio, forward_kinematics, growth_for_bend,
    mean_config_error, min_bend_radius, resample_evenly, KinematicsError, Polyline, Pose,
    ShapePrimitive, StopperSpec, Turn,
};
pub use planner::{fit_shape, plan_from_shape, predict, FitOptions, FitReport, Plan, PlanError, TensionMode};
pub use sim::{
    new_session, Command, DesignParams, Event, EventKind, Side, SimError, Snapshot, Tension,
    VineState,
};
pub use statics::{
    beam_tip_force, calibrate_fastener, fastener_angle, max_fastener_tension, resistance_torque,
    separation_pressure, tip_deflection, Calibration, CalibrationSample, FastenerParams, Regime,
    StaticsError, StiffnessParams,
};
