//! Command-driven deployment of a shape-locking vine.
//!
//! The body consists of a locked proximal part, stored as arc/line
//! primitives, and a distal unlocked window whose length is set by the tip
//! mount's legs. The window bends uniformly with the current cable tension;
//! material that everts past the window's length is frozen with the
//! window's curvature at that moment. Releasing tension re-straightens the
//! window but never touches locked material.
//!
//! Lengths along the body (`everted_len`, `unlocked_len`, growth commands,
//! `max_length`) are everted material lengths, i.e. outer-wall lengths.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{
    self, contraction_ratio, forward_kinematics, min_bend_radius, KinematicsError, Polyline, Pose,
    ShapePrimitive, StopperSpec, Turn,
};
use crate::statics::{self, tip_deflection, FastenerParams, Regime, StaticsError, StiffnessParams};

/// Curvatures closer than this (1/mm) lock into the same primitive.
pub const MERGE_CURVATURE_TOL: f64 = 1e-9;

/// Material shorter than this is left in the window until more accrues.
const MIN_LOCK_LEN: f64 = 1e-9;

/// Largest angle stored in one arc primitive.
const MAX_ARC_ANGLE: f64 = PI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("invalid command: {0}")]
    InvalidCommand(String),
    #[error("body pressure must be positive, got {0} kPa")]
    NonPositivePressure(f64),
    #[error("session finished: tubing exhausted at {0} mm")]
    SessionFinished(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Statics(#[from] StaticsError),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Fabrication and model constants of one robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignParams {
    /// Inflated beam radius, mm.
    pub beam_radius: f64,
    pub stoppers: StopperSpec,
    /// Length of the unlocked window, mm.
    pub leg_len: f64,
    pub fastener: FastenerParams,
    pub stiffness: StiffnessParams,
    /// Available tubing, mm.
    pub max_length: f64,
}

impl Default for DesignParams {
    /// 10.8 cm diameter body, 19/19 mm stoppers, 2.3 m of tubing. The window
    /// length is chosen so a fully contracted window bends exactly 90°.
    fn default() -> Self {
        let beam_radius = 54.0;
        let stoppers = StopperSpec::default();
        let r_min = beam_radius * 3.0;
        Self {
            beam_radius,
            stoppers,
            leg_len: (r_min + beam_radius) * std::f64::consts::FRAC_PI_2,
            fastener: FastenerParams::default(),
            stiffness: StiffnessParams::default(),
            max_length: 2300.0,
        }
    }
}

impl DesignParams {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(SimError::InvalidDesign(msg));
        if !(self.beam_radius > 0.0) {
            return invalid(format!("beam_radius = {}", self.beam_radius));
        }
        if !(self.leg_len > 0.0) {
            return invalid(format!("leg_len = {}", self.leg_len));
        }
        if !(self.max_length > self.leg_len) {
            return invalid(format!(
                "max_length {} must exceed leg_len {}",
                self.max_length, self.leg_len
            ));
        }
        let a = contraction_ratio(&self.stoppers).map_err(|e| SimError::InvalidDesign(e.to_string()))?;
        min_bend_radius(self.beam_radius, a).map_err(|e| SimError::InvalidDesign(e.to_string()))?;
        self.fastener.validate().map_err(|e| SimError::InvalidDesign(e.to_string()))?;
        self.stiffness.validate().map_err(|e| SimError::InvalidDesign(e.to_string()))?;
        Ok(())
    }

    pub fn contraction_ratio(&self) -> f64 {
        contraction_ratio(&self.stoppers).unwrap_or(0.0)
    }

    /// Tightest achievable bend radius, mm.
    pub fn min_bend_radius(&self) -> f64 {
        min_bend_radius(self.beam_radius, self.contraction_ratio()).unwrap_or(f64::INFINITY)
    }

    /// Largest curvature magnitude, 1/mm.
    pub fn max_curvature(&self) -> f64 {
        1.0 / self.min_bend_radius()
    }

    /// Bend of a fully contracted window, degrees.
    pub fn window_full_bend_deg(&self) -> f64 {
        (self.leg_len / (self.min_bend_radius() + self.beam_radius)).to_degrees()
    }

    /// Window curvature produced by `tension` on `side`, 1/mm.
    pub fn curvature_for_tension(&self, side: Side, tension: f64) -> f64 {
        let fraction = (tension / self.stiffness.t_full).clamp(0.0, 1.0);
        side.sign() * fraction / self.min_bend_radius()
    }
}

/// Cable side under tension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    #[default]
    None,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
            Side::None => 0.0,
        }
    }

    pub fn turn(self) -> Option<Turn> {
        match self {
            Side::Left => Some(Turn::Left),
            Side::Right => Some(Turn::Right),
            Side::None => None,
        }
    }
}

impl From<Turn> for Side {
    fn from(t: Turn) -> Self {
        match t {
            Turn::Left => Side::Left,
            Turn::Right => Side::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Command {
    /// Evert `delta_len` mm of material.
    Grow { delta_len: f64 },
    /// Pull the cable on `side` with `tension` N (`None` releases both).
    SetTension { side: Side, tension: f64 },
    /// Set body gauge pressure, kPa.
    SetPressure { gauge: f64 },
}

impl Command {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Command::Grow { delta_len } if !(delta_len > 0.0 && delta_len.is_finite()) => {
                Err(SimError::InvalidCommand(format!("grow length {delta_len} mm must be positive")))
            }
            Command::SetTension { tension, .. } if !(tension >= 0.0 && tension.is_finite()) => {
                Err(SimError::InvalidCommand(format!("tension {tension} N must be non-negative")))
            }
            Command::SetPressure { gauge } if !(gauge > 0.0 && gauge.is_finite()) => {
                Err(SimError::InvalidCommand(format!("pressure {gauge} kPa must be positive")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tension {
    pub side: Side,
    pub newtons: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    /// Body pressure exceeds the separation pressure of locked arc `arc_index`.
    SeparationRisk { arc_index: usize, p_min: f64 },
    MaxLengthReached,
    TensionCapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    /// Everted length when the event fired, mm.
    pub at_len: f64,
}

/// Full deployment state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VineState {
    pub design: DesignParams,
    /// Gauge pressure, kPa.
    pub pressure: f64,
    pub everted_len: f64,
    /// Locked primitives, proximal to distal.
    pub locked: Vec<ShapePrimitive>,
    /// Material held by `locked`, mm.
    pub locked_len: f64,
    pub unlocked_len: f64,
    /// Signed window curvature, 1/mm.
    pub unlocked_curvature: f64,
    pub tension: Tension,
    pub events: Vec<Event>,
    /// Whether cable tension relaxes opposing locked bends.
    pub disturbance: bool,
    pub finished: bool,
}

/// Rendering/evaluation view of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub shape: Vec<ShapePrimitive>,
    pub centerline: Polyline,
    /// Index of the centerline point at the lock boundary; points up to it
    /// are locked, points from it on are unlocked.
    pub lock_boundary_index: usize,
}

/// Starts an empty deployment.
pub fn new_session(design: DesignParams, pressure: f64) -> Result<VineState> {
    design.validate()?;
    if !(pressure > 0.0 && pressure.is_finite()) {
        return Err(SimError::NonPositivePressure(pressure));
    }
    Ok(VineState {
        design,
        pressure,
        everted_len: 0.0,
        locked: Vec::new(),
        locked_len: 0.0,
        unlocked_len: 0.0,
        unlocked_curvature: 0.0,
        tension: Tension::default(),
        events: Vec::new(),
        disturbance: false,
        finished: false,
    })
}

/// Primitive(s) covering `material` mm at signed curvature `kappa`, split
/// so that no arc exceeds half a turn.
fn primitives_for(material: f64, kappa: f64, r: f64) -> Vec<ShapePrimitive> {
    let Some(turn) = Turn::of_curvature(kappa) else {
        return vec![ShapePrimitive::line(material)];
    };
    let radius = 1.0 / kappa.abs();
    let angle = material / (radius + r);
    let pieces = (angle / MAX_ARC_ANGLE).ceil().max(1.0) as usize;
    let piece = angle / pieces as f64;
    vec![ShapePrimitive::arc(radius, piece, turn); pieces]
}

impl VineState {
    pub fn with_disturbance(mut self, on: bool) -> Self {
        self.disturbance = on;
        self
    }

    /// Applies one command, returning the events it raised (also appended
    /// to `self.events`).
    pub fn apply(&mut self, cmd: &Command) -> Result<Vec<Event>> {
        if self.finished {
            return Err(SimError::SessionFinished(self.everted_len));
        }
        cmd.validate()?;
        let events = match *cmd {
            Command::Grow { delta_len } => self.grow(delta_len),
            Command::SetTension { side, tension } => self.set_tension(side, tension),
            Command::SetPressure { gauge } => {
                self.pressure = gauge;
                self.check_separation()
            }
        };
        self.events.extend_from_slice(&events);
        Ok(events)
    }

    fn grow(&mut self, delta_len: f64) -> Vec<Event> {
        let remaining = (self.design.max_length - self.everted_len).max(0.0);
        let truncated = delta_len > remaining;
        self.everted_len += delta_len.min(remaining);
        if truncated {
            self.everted_len = self.design.max_length;
        }
        self.unlocked_len = self.everted_len.min(self.design.leg_len);
        let to_lock = self.everted_len - self.unlocked_len - self.locked_len;
        if to_lock > MIN_LOCK_LEN {
            self.lock(to_lock, self.unlocked_curvature);
        }
        if truncated {
            self.finished = true;
            vec![Event { kind: EventKind::MaxLengthReached, at_len: self.everted_len }]
        } else {
            Vec::new()
        }
    }

    fn lock(&mut self, material: f64, kappa: f64) {
        self.locked_len += material;
        let r = self.design.beam_radius;
        if let Some(last) = self.locked.last_mut() {
            if (last.curvature() - kappa).abs() <= MERGE_CURVATURE_TOL {
                match last {
                    ShapePrimitive::Line { length } => {
                        *length += material;
                        return;
                    }
                    ShapePrimitive::Arc { radius, angle, .. } => {
                        let extra = material / (*radius + r);
                        if *angle + extra <= MAX_ARC_ANGLE {
                            *angle += extra;
                            return;
                        }
                    }
                }
            }
        }
        self.locked.extend(primitives_for(material, kappa, r));
    }

    fn set_tension(&mut self, side: Side, tension: f64) -> Vec<Event> {
        let t_full = self.design.stiffness.t_full;
        let mut events = Vec::new();
        let applied = if side == Side::None { 0.0 } else { tension.min(t_full) };
        if side != Side::None && tension > t_full {
            events.push(Event { kind: EventKind::TensionCapped, at_len: self.everted_len });
        }
        self.tension = Tension { side, newtons: applied };
        self.unlocked_curvature = self.design.curvature_for_tension(side, applied);
        if self.disturbance && applied > 0.0 {
            if let Some(turn) = side.turn() {
                let deflection = tip_deflection(applied, Regime::Locked, &self.design.stiffness, None);
                self.disturb(turn.opposite(), deflection.to_radians());
            }
        }
        events
    }

    /// Opens the most distal locked arc turning `toward` by `delta` rad,
    /// keeping its material length.
    fn disturb(&mut self, toward: Turn, delta: f64) {
        let r = self.design.beam_radius;
        let target = self.locked.iter().rposition(
            |p| matches!(p, ShapePrimitive::Arc { turn, .. } if *turn == toward),
        );
        let Some(i) = target else { return };
        let material = self.locked[i].material_len(r);
        if let ShapePrimitive::Arc { angle, turn, .. } = self.locked[i] {
            let relaxed = angle - delta;
            self.locked[i] = if relaxed > 1e-9 {
                ShapePrimitive::arc(material / relaxed - r, relaxed, turn)
            } else {
                ShapePrimitive::line(material)
            };
        }
    }

    /// Locked arcs whose separation pressure is below the body pressure.
    pub fn check_separation(&self) -> Vec<Event> {
        let r = self.design.beam_radius;
        self.locked
            .iter()
            .enumerate()
            .filter_map(|(arc_index, prim)| match *prim {
                ShapePrimitive::Arc { angle, .. } => {
                    // beyond a half turn the straightening torque is unbounded
                    let p_min = if angle < PI {
                        statics::separation_pressure(angle, r, &self.design.fastener).ok()?
                    } else {
                        0.0
                    };
                    (p_min < self.pressure).then_some(Event {
                        kind: EventKind::SeparationRisk { arc_index, p_min },
                        at_len: self.everted_len,
                    })
                }
                ShapePrimitive::Line { .. } => None,
            })
            .collect()
    }

    /// Primitive describing the unlocked window, if any material is in it.
    pub fn window_primitives(&self) -> Vec<ShapePrimitive> {
        if self.unlocked_len <= 0.0 {
            return Vec::new();
        }
        primitives_for(self.unlocked_len, self.unlocked_curvature, self.design.beam_radius)
    }

    /// Locked primitives followed by the window.
    pub fn shape(&self) -> Vec<ShapePrimitive> {
        let mut shape = self.locked.clone();
        shape.extend(self.window_primitives());
        shape
    }

    pub fn snapshot(&self, base: Pose, samples_per_mm: f64) -> Result<Snapshot> {
        let shape = self.shape();
        let centerline = forward_kinematics(&shape, base, samples_per_mm)?;
        let lock_boundary_index = if self.locked.is_empty() {
            0
        } else {
            let locked_len: f64 = self.locked.iter().map(|p| p.centerline_len()).sum();
            let total: f64 = shape.iter().map(|p| p.centerline_len()).sum();
            let segments = centerline.len() - 1;
            ((locked_len / total * segments as f64).round() as usize).min(segments)
        };
        Ok(Snapshot { shape, centerline, lock_boundary_index })
    }

    /// Checks the bookkeeping invariants; returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let r = self.design.beam_radius;
        let expected_window = self.everted_len.min(self.design.leg_len);
        if (self.unlocked_len - expected_window).abs() > 1e-9 {
            return Err(format!("window {} != {}", self.unlocked_len, expected_window));
        }
        let locked: f64 = self.locked.iter().map(|p| p.material_len(r)).sum();
        if (locked + self.unlocked_len - self.everted_len).abs() > 1e-6 {
            return Err(format!(
                "locked {locked} + window {} != everted {}",
                self.unlocked_len, self.everted_len
            ));
        }
        let kappa_max = self.design.max_curvature() * (1.0 + 1e-12);
        if self.unlocked_curvature.abs() > kappa_max {
            return Err(format!("window curvature {} over bound", self.unlocked_curvature));
        }
        if let Some(p) = self.locked.iter().find(|p| p.curvature().abs() > kappa_max) {
            return Err(format!("locked primitive {p:?} over curvature bound"));
        }
        if self.everted_len > self.design.max_length {
            return Err(format!("everted {} beyond tubing", self.everted_len));
        }
        for p in &self.locked {
            p.validate().map_err(|e| e.to_string())?;
            if let ShapePrimitive::Arc { angle, .. } = p {
                if *angle >= TAU {
                    return Err(format!("arc angle {angle} too large"));
                }
            }
        }
        Ok(())
    }
}

/// Runs `commands` from a fresh session.
pub fn rollout(
    design: DesignParams,
    pressure: f64,
    disturbance: bool,
    commands: &[Command],
) -> Result<VineState> {
    let mut state = new_session(design, pressure)?.with_disturbance(disturbance);
    for cmd in commands {
        state.apply(cmd)?;
    }
    Ok(state)
}

/// Shape of `state` traced at the default density.
pub fn centerline(state: &VineState, base: Pose) -> Result<Polyline> {
    Ok(state.snapshot(base, kinematics::DEFAULT_SAMPLES_PER_MM)?.centerline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn design_with_leg(leg_len: f64) -> DesignParams {
        DesignParams { leg_len, ..DesignParams::default() }
    }

    #[test]
    fn defaults_are_consistent() {
        let d = DesignParams::default();
        d.validate().unwrap();
        assert_eq!(d.min_bend_radius(), 162.0);
        // full tension on the full window gives the unlocked 90° bend
        assert!((d.window_full_bend_deg() - 90.0).abs() < 1e-9);
        let s = d.stiffness;
        assert!((s.s_unlocked * s.t_full - d.window_full_bend_deg()).abs() < 1e-9);
    }

    #[test]
    fn new_session_cases() {
        let s = new_session(DesignParams::default(), 7.0).unwrap();
        assert_eq!(s.everted_len, 0.0);
        assert!(s.locked.is_empty() && s.events.is_empty());
        assert_eq!(s.tension, Tension::default());
        let bad = DesignParams { leg_len: 3000.0, ..DesignParams::default() };
        assert!(matches!(new_session(bad, 7.0), Err(SimError::InvalidDesign(_))));
        assert!(matches!(
            new_session(DesignParams::default(), -1.0),
            Err(SimError::NonPositivePressure(_))
        ));
    }

    #[test]
    fn straight_growth_fills_window_then_locks() {
        let mut s = new_session(design_with_leg(200.0), 7.0).unwrap();
        s.apply(&Command::Grow { delta_len: 500.0 }).unwrap();
        assert_eq!(s.locked, vec![ShapePrimitive::line(300.0)]);
        assert_eq!(s.unlocked_len, 200.0);
        assert_eq!(s.unlocked_curvature, 0.0);
        s.check_invariants().unwrap();
    }

    #[test]
    fn tensioned_growth_locks_a_bend() {
        let d = design_with_leg(200.0);
        let mut s = new_session(d, 7.0).unwrap();
        s.apply(&Command::Grow { delta_len: 500.0 }).unwrap();
        s.apply(&Command::SetTension { side: Side::Left, tension: d.stiffness.t_full }).unwrap();
        let grow = (d.min_bend_radius() + d.beam_radius) * FRAC_PI_2;
        s.apply(&Command::Grow { delta_len: grow }).unwrap();
        assert_eq!(s.locked.len(), 2);
        match s.locked[1] {
            ShapePrimitive::Arc { radius, angle, turn } => {
                assert!((radius - 162.0).abs() < 1e-9);
                assert!((angle - FRAC_PI_2).abs() < 1e-12);
                assert_eq!(turn, Turn::Left);
            }
            other => panic!("expected arc, got {other:?}"),
        }
        // window bent at full curvature too
        assert!((s.unlocked_curvature - 1.0 / 162.0).abs() < 1e-15);
        s.check_invariants().unwrap();
    }

    #[test]
    fn growth_truncates_at_tubing_end() {
        let mut s = new_session(DesignParams::default(), 7.0).unwrap();
        s.apply(&Command::Grow { delta_len: 2000.0 }).unwrap();
        let ev = s.apply(&Command::Grow { delta_len: 1000.0 }).unwrap();
        assert_eq!(s.everted_len, 2300.0);
        assert_eq!(ev, vec![Event { kind: EventKind::MaxLengthReached, at_len: 2300.0 }]);
        s.check_invariants().unwrap();
        assert!(matches!(
            s.apply(&Command::SetPressure { gauge: 5.0 }),
            Err(SimError::SessionFinished(_))
        ));
    }

    #[test]
    fn over_tension_is_capped() {
        let mut s = new_session(DesignParams::default(), 7.0).unwrap();
        let ev = s.apply(&Command::SetTension { side: Side::Right, tension: 25.0 }).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, EventKind::TensionCapped);
        assert_eq!(s.tension.newtons, 10.0);
        assert!((s.unlocked_curvature + 1.0 / 162.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_commands_rejected() {
        let mut s = new_session(DesignParams::default(), 7.0).unwrap();
        assert!(s.apply(&Command::Grow { delta_len: 0.0 }).is_err());
        assert!(s.apply(&Command::SetTension { side: Side::Left, tension: -1.0 }).is_err());
        assert!(s.apply(&Command::SetPressure { gauge: 0.0 }).is_err());
        assert_eq!(s.everted_len, 0.0);
    }

    fn one_arc_state(pressure: f64) -> VineState {
        let d = DesignParams { beam_radius: 40.0, ..DesignParams::default() };
        let mut s = new_session(d, pressure).unwrap();
        s.locked = vec![ShapePrimitive::arc(200.0, FRAC_PI_2, Turn::Left)];
        s.locked_len = s.locked[0].material_len(40.0);
        s.everted_len = s.locked_len;
        s
    }

    #[test]
    fn separation_check_thresholds() {
        let straight = {
            let mut s = new_session(DesignParams::default(), 7.0).unwrap();
            s.apply(&Command::Grow { delta_len: 800.0 }).unwrap();
            s
        };
        assert!(straight.check_separation().is_empty());

        let s = one_arc_state(7.0);
        let ev = s.check_separation();
        assert_eq!(ev.len(), 1);
        match ev[0].kind {
            EventKind::SeparationRisk { arc_index, p_min } => {
                assert_eq!(arc_index, 0);
                assert!((p_min - 4.48).abs() < 5e-3);
            }
            ref k => panic!("{k:?}"),
        }
        assert!(one_arc_state(3.0).check_separation().is_empty());

        let mut s = one_arc_state(3.0);
        let ev = s.apply(&Command::SetPressure { gauge: 7.0 }).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(s.events.len(), 1);
    }

    #[test]
    fn disturbance_opens_distal_opposing_arc() {
        let d = design_with_leg(200.0);
        let mut s = new_session(d, 7.0).unwrap().with_disturbance(true);
        s.apply(&Command::Grow { delta_len: 300.0 }).unwrap();
        s.apply(&Command::SetTension { side: Side::Right, tension: 10.0 }).unwrap();
        s.apply(&Command::Grow { delta_len: 400.0 }).unwrap();
        s.apply(&Command::SetTension { side: Side::None, tension: 0.0 }).unwrap();
        s.apply(&Command::Grow { delta_len: 300.0 }).unwrap();
        let before = s.locked.clone();
        let ShapePrimitive::Arc { angle: a0, .. } = before[1] else { panic!() };
        s.apply(&Command::SetTension { side: Side::Left, tension: 10.0 }).unwrap();
        let ShapePrimitive::Arc { angle: a1, .. } = s.locked[1] else { panic!() };
        assert!((a0 - a1 - 10f64.to_radians()).abs() < 1e-12);
        s.check_invariants().unwrap();
        // same-direction tension leaves it alone
        let mut t = s.clone();
        t.apply(&Command::SetTension { side: Side::Right, tension: 10.0 }).unwrap();
        assert_eq!(t.locked[1], s.locked[1]);
    }

    #[test]
    fn snapshot_views() {
        let s = new_session(DesignParams::default(), 7.0).unwrap();
        let snap = s.snapshot(Pose::origin(), 0.2).unwrap();
        assert_eq!(snap.centerline.len(), 1);
        assert_eq!(snap.lock_boundary_index, 0);

        let mut s = new_session(design_with_leg(200.0), 7.0).unwrap();
        s.apply(&Command::Grow { delta_len: 600.0 }).unwrap();
        let snap = s.snapshot(Pose::origin(), 0.2).unwrap();
        let last = snap.centerline.last();
        assert!((last[0] - 600.0).abs() < 1e-9 && last[1].abs() < 1e-12);
        let boundary = snap.centerline.points()[snap.lock_boundary_index];
        assert!((boundary[0] - 400.0).abs() < 1e-9);
    }

    #[test]
    fn long_tensioned_growth_splits_arcs() {
        let d = DesignParams { max_length: 5000.0, ..DesignParams::default() };
        let mut s = new_session(d, 7.0).unwrap();
        s.apply(&Command::SetTension { side: Side::Left, tension: 10.0 }).unwrap();
        s.apply(&Command::Grow { delta_len: 4500.0 }).unwrap();
        s.check_invariants().unwrap();
        assert!(s.locked.len() > 1);
    }
}
