//! Command schedules for target shapes, and arc/line fitting of waypoint
//! targets.
//!
//! Material at body position `s` locks with whatever curvature the window
//! has when the tip reaches `s + leg_len`. A plan therefore switches
//! tension one window length *before* the tip reaches the end of each
//! primitive's material, and the last window length of any plannable shape
//! must have uniform curvature (it stays in the window at the end).

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{
    self, forward_kinematics, mean_config_error, normalize_angle, resample_evenly, KinematicsError,
    Polyline, Pose, ShapePrimitive, Turn,
};
use crate::lsq::{self, SolverOptions};
use crate::sim::{self, Command, DesignParams, Side, SimError, MERGE_CURVATURE_TOL};
use crate::statics;

/// Pressure used for kinematic rollouts, kPa; it does not affect geometry.
pub const ROLLOUT_PRESSURE_KPA: f64 = 7.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("primitive {index}: radius {radius} mm is below the minimum bend radius {min_radius} mm")]
    InfeasibleCurvature { index: usize, radius: f64, min_radius: f64 },
    #[error("primitive {index}: radius {radius} mm cannot be formed with binary tension (needs {min_radius} mm)")]
    NotBinaryRadius { index: usize, radius: f64, min_radius: f64 },
    #[error("shape needs {total} mm of tubing but only {max_length} mm is available")]
    LengthBudget { total: f64, max_length: f64 },
    #[error(
        "primitive {index}: the final {tail_len} mm of uniform curvature is shorter than the \
         {leg_len} mm unlocked window"
    )]
    InfeasibleTipWindow { index: usize, tail_len: f64, leg_len: f64 },
    #[error("no fit within {tol} mm using up to {max_primitives} primitives; best residual {best_residual} mm with {best_count}")]
    UnreachableTolerance { tol: f64, max_primitives: usize, best_residual: f64, best_count: usize },
    #[error("need at least 2 distinct waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("tolerance must be positive, got {0} mm")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub type Result<T> = std::result::Result<T, PlanError>;

/// How arc radii map to cable tension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TensionMode {
    /// Tension scales linearly with curvature, reaching full tension at the
    /// minimum bend radius.
    #[default]
    Proportional,
    /// Tension is either zero or full; every arc must use the minimum radius.
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationWarning {
    pub primitive_index: usize,
    /// Separation pressure of the arc, kPa.
    pub p_min: f64,
    /// Planned body pressure, kPa.
    pub pressure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<Command>,
    pub predicted_shape: Vec<ShapePrimitive>,
    /// Sum of all growth commands, mm of material.
    pub total_growth: f64,
    #[serde(default)]
    pub base: Pose,
    #[serde(default)]
    pub warnings: Vec<SeparationWarning>,
}

fn tension_for(prim: &ShapePrimitive, design: &DesignParams, mode: TensionMode) -> Command {
    match *prim {
        ShapePrimitive::Line { .. } => Command::SetTension { side: Side::None, tension: 0.0 },
        ShapePrimitive::Arc { radius, turn, .. } => {
            let t_full = design.stiffness.t_full;
            let tension = match mode {
                TensionMode::Proportional => (t_full * design.min_bend_radius() / radius).min(t_full),
                TensionMode::Binary => t_full,
            };
            Command::SetTension { side: Side::from(turn), tension }
        }
    }
}

/// Builds the command schedule that deploys `shape`.
///
/// Each primitive gets one tension setting followed by the growth that
/// carries the tip one window length past the primitive's end (the first
/// growth includes the initial window fill, the last one stops at the end
/// of the shape).
pub fn plan_from_shape(
    shape: &[ShapePrimitive],
    design: &DesignParams,
    pressure: f64,
    mode: TensionMode,
) -> Result<Plan> {
    design.validate()?;
    let r = design.beam_radius;
    let r_min = design.min_bend_radius();
    for (index, prim) in shape.iter().enumerate() {
        prim.validate()?;
        if let ShapePrimitive::Arc { radius, .. } = *prim {
            if radius < r_min * (1.0 - 1e-9) {
                return Err(PlanError::InfeasibleCurvature { index, radius, min_radius: r_min });
            }
            if mode == TensionMode::Binary && (radius - r_min).abs() > 1e-9 * r_min {
                return Err(PlanError::NotBinaryRadius { index, radius, min_radius: r_min });
            }
        }
    }
    if shape.is_empty() {
        return Ok(Plan {
            steps: Vec::new(),
            predicted_shape: Vec::new(),
            total_growth: 0.0,
            base: Pose::origin(),
            warnings: Vec::new(),
        });
    }

    let material: Vec<f64> = shape.iter().map(|p| p.material_len(r)).collect();
    let total: f64 = material.iter().sum();
    if total > design.max_length + 1e-9 {
        return Err(PlanError::LengthBudget { total, max_length: design.max_length });
    }

    let last_curvature = shape[shape.len() - 1].curvature();
    let tail_start = shape
        .iter()
        .rposition(|p| (p.curvature() - last_curvature).abs() > MERGE_CURVATURE_TOL)
        .map_or(0, |i| i + 1);
    let tail_len: f64 = material[tail_start..].iter().sum();
    if tail_len < design.leg_len.min(total) - 1e-9 {
        return Err(PlanError::InfeasibleTipWindow {
            index: tail_start - 1,
            tail_len,
            leg_len: design.leg_len,
        });
    }

    let mut steps = Vec::with_capacity(2 * shape.len());
    let mut everted = 0.0;
    let mut end = 0.0;
    for (i, prim) in shape.iter().enumerate() {
        end += material[i];
        steps.push(tension_for(prim, design, mode));
        let target = if i + 1 == shape.len() { total } else { (end + design.leg_len).min(total) };
        let delta = target - everted;
        if delta > 1e-12 {
            steps.push(Command::Grow { delta_len: delta });
            everted = target;
        }
    }

    let warnings = shape
        .iter()
        .enumerate()
        .filter_map(|(primitive_index, prim)| match *prim {
            ShapePrimitive::Arc { angle, .. } => {
                let p_min = if angle < std::f64::consts::PI {
                    statics::separation_pressure(angle, r, &design.fastener).ok()?
                } else {
                    0.0
                };
                (p_min < pressure).then_some(SeparationWarning { primitive_index, p_min, pressure })
            }
            ShapePrimitive::Line { .. } => None,
        })
        .collect();

    Ok(Plan {
        steps,
        predicted_shape: shape.to_vec(),
        total_growth: everted,
        base: Pose::origin(),
        warnings,
    })
}

/// Runs a plan through the simulator with disturbance disabled and returns
/// the deployed centerline.
pub fn predict(plan: &Plan, design: &DesignParams) -> Result<Polyline> {
    let state = sim::rollout(*design, ROLLOUT_PRESSURE_KPA, false, &plan.steps)?;
    Ok(sim::centerline(&state, plan.base)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Largest number of primitives tried.
    pub max_primitives: usize,
    /// Resampled target points used by the segmentation search.
    pub search_points: usize,
    /// Points used for the refinement objective and the reported residual.
    pub eval_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_primitives: 32, search_points: 150, eval_points: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub shape: Vec<ShapePrimitive>,
    /// Start pose of the fitted shape (first waypoint, fitted heading).
    pub base: Pose,
    /// Mean configuration error against the waypoints, mm.
    pub residual: f64,
    pub primitive_count: usize,
}

#[derive(Debug, Clone, Copy)]
enum SegmentModel {
    /// Direction of travel.
    Line { dir: [f64; 2] },
    Arc { center: [f64; 2], radius: f64, turn: Turn },
}

#[derive(Debug, Clone, Copy)]
struct SegmentFit {
    model: SegmentModel,
    /// Sum of squared point-to-model distances.
    cost: f64,
}

fn fit_line(points: &[[f64; 2]]) -> SegmentFit {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p[0] - cx, p[1] - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut dir = [phi.cos(), phi.sin()];
    let (first, last) = (points[0], points[points.len() - 1]);
    if dir[0] * (last[0] - first[0]) + dir[1] * (last[1] - first[1]) < 0.0 {
        dir = [-dir[0], -dir[1]];
    }
    let cost = points
        .iter()
        .map(|p| {
            let d = -dir[1] * (p[0] - cx) + dir[0] * (p[1] - cy);
            d * d
        })
        .sum();
    SegmentFit { model: SegmentModel::Line { dir }, cost }
}

/// Algebraic (Kåsa) circle fit refined by one Gauss-Newton pass on the
/// geometric distances; radii below `min_radius` are clamped and the centre
/// re-fitted for the clamped radius.
fn fit_circle(points: &[[f64; 2]], min_radius: f64) -> Option<SegmentFit> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p[0]).sum::<f64>() / n;
    let my = points.iter().map(|p| p[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy, mut sxz, mut syz, mut sz) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let (x, y) = (p[0] - mx, p[1] - my);
        let z = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxz += x * z;
        syz += y * z;
        sz += z;
    }
    // centred data: the first moments vanish
    let ata = Matrix3::new(sxx, sxy, 0.0, sxy, syy, 0.0, 0.0, 0.0, n);
    let sol = ata.lu().solve(&Vector3::new(-sxz, -syz, -sz))?;
    let (mut a, mut b) = (-sol[0] / 2.0, -sol[1] / 2.0);
    let mut radius = (a * a + b * b - sol[2]).sqrt();
    if !radius.is_finite() || radius > 1e9 {
        return None;
    }

    let geometric_step = |a: f64, b: f64, radius: f64, fix_radius: bool| -> Option<(f64, f64, f64)> {
        let (mut j00, mut j01, mut j02, mut j11, mut j12, mut j22) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let (mut g0, mut g1, mut g2) = (0.0, 0.0, 0.0);
        let jr = if fix_radius { 0.0 } else { -1.0 };
        for p in points {
            let (dx, dy) = (p[0] - mx - a, p[1] - my - b);
            let rho = dx.hypot(dy);
            if rho == 0.0 {
                return None;
            }
            let (ja, jb) = (-dx / rho, -dy / rho);
            let res = rho - radius;
            j00 += ja * ja;
            j01 += ja * jb;
            j02 += ja * jr;
            j11 += jb * jb;
            j12 += jb * jr;
            j22 += jr * jr;
            g0 += ja * res;
            g1 += jb * res;
            g2 += jr * res;
        }
        if fix_radius {
            j22 = 1.0;
        }
        let jtj = Matrix3::new(j00, j01, j02, j01, j11, j12, j02, j12, j22);
        let delta = jtj.lu().solve(&Vector3::new(-g0, -g1, -g2))?;
        Some((a + delta[0], b + delta[1], radius + delta[2]))
    };

    if let Some((a1, b1, r1)) = geometric_step(a, b, radius, false) {
        if r1.is_finite() && r1 > 0.0 {
            (a, b, radius) = (a1, b1, r1);
        }
    }
    if radius < min_radius {
        radius = min_radius;
        for _ in 0..3 {
            let (a1, b1, _) = geometric_step(a, b, radius, true)?;
            (a, b) = (a1, b1);
        }
    }
    let center = [a + mx, b + my];
    let mut swept = 0.0;
    let mut cost = 0.0;
    for (i, p) in points.iter().enumerate() {
        let v = [p[0] - center[0], p[1] - center[1]];
        let d = v[0].hypot(v[1]) - radius;
        cost += d * d;
        if let Some(q) = points.get(i + 1) {
            let w = [q[0] - center[0], q[1] - center[1]];
            swept += (v[0] * w[1] - v[1] * w[0]).atan2(v[0] * w[0] + v[1] * w[1]);
        }
    }
    if !cost.is_finite() || swept.abs() >= TAU - 1e-3 || swept == 0.0 {
        return None;
    }
    let turn = if swept > 0.0 { Turn::Left } else { Turn::Right };
    Some(SegmentFit { model: SegmentModel::Arc { center, radius, turn }, cost })
}

fn fit_segment(points: &[[f64; 2]], min_radius: f64) -> SegmentFit {
    let line = fit_line(points);
    match fit_circle(points, min_radius) {
        // ties go to the line
        Some(arc) if arc.cost * (1.0 + 1e-6) + 1e-12 * (points.len() as f64) < line.cost => arc,
        _ => line,
    }
}

/// Parametrised chain: start heading plus per-primitive curvature and
/// centerline length. Lines keep zero curvature.
#[derive(Debug, Clone)]
struct Chain {
    is_arc: Vec<bool>,
}

impl Chain {
    fn unpack<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
        let mut at = 1;
        self.is_arc.iter().map(move |&arc| {
            if arc {
                at += 2;
                (x[at - 2], x[at - 1])
            } else {
                at += 1;
                (0.0, x[at - 1])
            }
        })
    }

    fn segments(&self, x: &[f64]) -> Vec<(f64, f64)> {
        self.unpack(x).collect()
    }

    /// `n` points evenly spaced in arc length along the chain.
    fn sample(&self, x: &[f64], start: [f64; 2], n: usize) -> Vec<[f64; 2]> {
        let segs = self.segments(x);
        let total: f64 = segs.iter().map(|s| s.1).sum();
        let mut out = Vec::with_capacity(n);
        let (mut px, mut py, mut h) = (start[0], start[1], x[0]);
        let mut idx = 0;
        let mut seg_start = 0.0;
        for k in 0..n {
            let s = total * k as f64 / (n - 1) as f64;
            while idx + 1 < segs.len() && s > seg_start + segs[idx].1 {
                let (kappa, len) = segs[idx];
                (px, py, h) = advance(px, py, h, kappa, len);
                seg_start += len;
                idx += 1;
            }
            let (qx, qy, _) = advance(px, py, h, segs[idx].0, s - seg_start);
            out.push([qx, qy]);
        }
        out
    }

    fn to_shape(&self, x: &[f64], min_radius: f64) -> Vec<ShapePrimitive> {
        self.segments(x)
            .into_iter()
            .filter(|&(_, len)| len > 1e-9)
            .map(|(kappa, len)| match Turn::of_curvature(kappa) {
                Some(turn) if kappa.abs() > 1e-12 => {
                    let radius = (1.0 / kappa.abs()).max(min_radius);
                    ShapePrimitive::arc(radius, len / radius, turn)
                }
                _ => ShapePrimitive::line(len),
            })
            .collect()
    }
}

/// Moves along a constant-curvature path by `s`.
fn advance(x: f64, y: f64, h: f64, kappa: f64, s: f64) -> (f64, f64, f64) {
    let half = 0.5 * kappa * s;
    let sinc = if half.abs() < 1e-4 { 1.0 - half * half / 6.0 } else { half.sin() / half };
    let chord = s * sinc;
    let mid = h + half;
    (x + chord * mid.cos(), y + chord * mid.sin(), h + kappa * s)
}

fn heading_of(model: &SegmentModel, at: [f64; 2]) -> f64 {
    match *model {
        SegmentModel::Line { dir } => dir[1].atan2(dir[0]),
        SegmentModel::Arc { center, turn, .. } => {
            let v = [at[0] - center[0], at[1] - center[1]];
            let s = turn.sign();
            (s * v[0]).atan2(-s * v[1])
        }
    }
}

fn segment_length(model: &SegmentModel, points: &[[f64; 2]]) -> f64 {
    match *model {
        SegmentModel::Line { dir } => {
            let (a, b) = (points[0], points[points.len() - 1]);
            (dir[0] * (b[0] - a[0]) + dir[1] * (b[1] - a[1])).max(1e-3)
        }
        SegmentModel::Arc { center, radius, .. } => {
            let swept: f64 = points
                .windows(2)
                .map(|w| {
                    let v = [w[0][0] - center[0], w[0][1] - center[1]];
                    let u = [w[1][0] - center[0], w[1][1] - center[1]];
                    (v[0] * u[1] - v[1] * u[0]).atan2(v[0] * u[0] + v[1] * u[1])
                })
                .sum();
            (swept.abs() * radius).max(1e-3)
        }
    }
}

/// Fits an arc/line sequence to `waypoints` within `tol` mm mean
/// configuration error, using as few primitives as possible.
///
/// For each segment count, a dynamic program over the resampled target
/// picks the segmentation with the least summed squared fit error (lines
/// preferred on ties). Segments that meet at an angle are joined by a
/// minimum-radius arc, and the resulting chain is refined jointly by
/// Gauss-Newton on the index-paired point distances, with curvature held
/// within the design's bound. Among the chains that meet `tol`, the one with
/// the fewest primitives wins.
pub fn fit_shape(
    waypoints: &Polyline,
    design: &DesignParams,
    tol: f64,
    opts: &FitOptions,
) -> Result<FitReport> {
    if !(tol > 0.0) {
        return Err(PlanError::InvalidTolerance(tol));
    }
    design.validate()?;
    if waypoints.len() < 2 {
        return Err(PlanError::TooFewWaypoints(waypoints.len()));
    }
    let r = design.beam_radius;
    let r_min = design.min_bend_radius();
    let kappa_max = 1.0 / r_min;
    let n = opts.search_points.max(3);
    let target = resample_evenly(waypoints, n)?;
    let pts = target.points();
    let eval_target = resample_evenly(waypoints, opts.eval_points.max(2))?;
    let spacing = waypoints.length() / (n - 1) as f64;

    let idx = |i: usize, j: usize| i * n + j;
    let mut fits: Vec<Option<SegmentFit>> = vec![None; n * n];
    for i in 0..n {
        for j in i + 1..n {
            fits[idx(i, j)] = Some(fit_segment(&pts[i..=j], r_min));
        }
    }
    let material_of = |fit: &SegmentFit, i: usize, j: usize| {
        let kappa = match fit.model {
            SegmentModel::Line { .. } => 0.0,
            SegmentModel::Arc { radius, .. } => 1.0 / radius,
        };
        spacing * (j - i) as f64 * (1.0 + r * kappa)
    };

    let max_k = opts.max_primitives.min(n - 1).max(1);
    // best[k][j]: least cost covering points 0..=j with k+1 segments
    let mut best = vec![vec![f64::INFINITY; n]; max_k];
    let mut prev = vec![vec![usize::MAX; n]; max_k];
    for j in 1..n {
        best[0][j] = fits[idx(0, j)].map_or(f64::INFINITY, |f| f.cost);
    }
    for k in 1..max_k {
        for j in 1..n {
            for i in k..j {
                if !best[k - 1][i].is_finite() {
                    continue;
                }
                let Some(fit) = fits[idx(i, j)] else { continue };
                if j == n - 1 && material_of(&fit, i, j) < design.leg_len {
                    continue;
                }
                let c = best[k - 1][i] + fit.cost;
                if c < best[k][j] {
                    best[k][j] = c;
                    prev[k][j] = i;
                }
            }
        }
    }

    let ctx = Refiner {
        start: waypoints.first(),
        eval_target: eval_target.points(),
        waypoints,
        r,
        r_min,
        leg_len: design.leg_len,
        eval_n: opts.eval_points.max(2),
    };
    // Candidates are visited per segment count; each yields a plain chain and,
    // when neighbouring segments meet at an angle, a chain with junction arcs.
    // The answer is the meeting-tol candidate with the fewest primitives
    // (then fewest arcs, then lowest residual).
    let mut accepted: Option<Candidate> = None;
    let mut best_seen: Option<(f64, usize)> = None;
    #[allow(clippy::needless_range_loop)]
    for k in 0..max_k {
        if accepted.as_ref().is_some_and(|c| c.count() <= k + 1) {
            break;
        }
        if !best[k][n - 1].is_finite() {
            continue;
        }
        let mut bounds = vec![n - 1];
        let mut j = n - 1;
        for layer in (1..=k).rev() {
            j = prev[layer][j];
            bounds.push(j);
        }
        bounds.push(0);
        bounds.reverse();

        let segs: Vec<(SegmentFit, usize, usize)> =
            bounds.windows(2).map(|w| (fits[idx(w[0], w[1])].expect("segment fitted"), w[0], w[1])).collect();
        let h0 = heading_of(&segs[0].0.model, pts[segs[0].1]);
        let plain: Vec<Element> = segs.iter().map(|(f, i, j)| Element::from_fit(f, &pts[*i..=*j])).collect();
        let joined = insert_junctions(&plain, &segs, pts, kappa_max);

        let mut variants = vec![plain];
        if joined.len() > variants[0].len() {
            variants.push(joined);
        }
        for elements in variants {
            if accepted.as_ref().is_some_and(|c| c.count() < elements.len()) {
                continue;
            }
            let cand = ctx.refine(h0, &elements, kappa_max)?;
            if best_seen.is_none_or(|(b, _)| cand.residual < b) {
                best_seen = Some((cand.residual, cand.count()));
            }
            if cand.residual <= tol && accepted.as_ref().is_none_or(|c| cand.better_than(c)) {
                accepted = Some(cand);
            }
        }
    }
    if let Some(c) = accepted {
        let primitive_count = c.count();
        return Ok(FitReport { shape: c.shape, base: c.base, residual: c.residual, primitive_count });
    }
    let (best_residual, best_count) = best_seen.unwrap_or((f64::INFINITY, 0));
    Err(PlanError::UnreachableTolerance {
        tol,
        max_primitives: opts.max_primitives,
        best_residual,
        best_count,
    })
}

/// Initial guess for one chain element.
#[derive(Debug, Clone, Copy)]
struct Element {
    is_arc: bool,
    kappa: f64,
    len: f64,
}

impl Element {
    fn from_fit(fit: &SegmentFit, points: &[[f64; 2]]) -> Self {
        let len = segment_length(&fit.model, points);
        match fit.model {
            SegmentModel::Line { .. } => Element { is_arc: false, kappa: 0.0, len },
            SegmentModel::Arc { radius, turn, .. } => Element { is_arc: true, kappa: turn.sign() / radius, len },
        }
    }
}

/// Heading jumps below this are left for the refinement to absorb.
const JUNCTION_MIN_ANGLE: f64 = 1e-3;

/// Inserts a tightest-radius arc wherever one segment ends at a different
/// heading than the next one starts, trimming the neighbours by the
/// tangent length of the rounding.
fn insert_junctions(
    plain: &[Element],
    segs: &[(SegmentFit, usize, usize)],
    pts: &[[f64; 2]],
    kappa_max: f64,
) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::with_capacity(2 * plain.len());
    for (s, el) in plain.iter().enumerate() {
        let mut el = *el;
        if s > 0 {
            let (prev_fit, _, prev_end) = segs[s - 1];
            let (fit, this_start, _) = segs[s];
            let jump = normalize_angle(heading_of(&fit.model, pts[this_start]) - heading_of(&prev_fit.model, pts[prev_end]));
            if jump.abs() > JUNCTION_MIN_ANGLE {
                let radius = 1.0 / kappa_max;
                let prev = out.last_mut().expect("previous element");
                let tangent = (radius * (jump.abs() / 2.0).tan()).min(0.45 * prev.len).min(0.45 * el.len);
                prev.len -= tangent;
                el.len -= tangent;
                out.push(Element { is_arc: true, kappa: jump.signum() * kappa_max, len: jump.abs() * radius });
            }
        }
        out.push(el);
    }
    out
}

struct Candidate {
    shape: Vec<ShapePrimitive>,
    base: Pose,
    residual: f64,
}

impl Candidate {
    fn count(&self) -> usize {
        self.shape.len()
    }

    fn arcs(&self) -> usize {
        self.shape.iter().filter(|p| matches!(p, ShapePrimitive::Arc { .. })).count()
    }

    fn better_than(&self, other: &Candidate) -> bool {
        (self.count(), self.arcs()) < (other.count(), other.arcs())
            || ((self.count(), self.arcs()) == (other.count(), other.arcs()) && self.residual < other.residual)
    }
}

/// Joint Gauss-Newton refinement of a chain against the evaluation target.
struct Refiner<'a> {
    start: [f64; 2],
    eval_target: &'a [[f64; 2]],
    waypoints: &'a Polyline,
    r: f64,
    r_min: f64,
    leg_len: f64,
    eval_n: usize,
}

impl Refiner<'_> {
    fn refine(&self, h0: f64, elements: &[Element], kappa_max: f64) -> Result<Candidate> {
        let mut x0 = vec![h0];
        for el in elements {
            if el.is_arc {
                x0.push(el.kappa.clamp(-kappa_max, kappa_max));
            }
            x0.push(el.len.max(1e-3));
        }
        let chain = Chain { is_arc: elements.iter().map(|e| e.is_arc).collect() };
        let segments = elements.len();
        let m = self.eval_target.len();
        let residuals = |x: &[f64]| -> Vec<f64> {
            chain
                .sample(x, self.start, m)
                .iter()
                .zip(self.eval_target)
                .flat_map(|(p, q)| [p[0] - q[0], p[1] - q[1]])
                .collect()
        };
        let (r, leg_len) = (self.r, self.leg_len);
        let project = |x: &mut [f64]| {
            let mut at = 1;
            for (s, &arc) in chain.is_arc.iter().enumerate() {
                let kappa = if arc {
                    x[at] = x[at].clamp(-kappa_max, kappa_max);
                    at += 1;
                    x[at - 1]
                } else {
                    0.0
                };
                let mut len = x[at].max(1e-3);
                if kappa != 0.0 {
                    len = len.min((TAU - 1e-6) / kappa.abs());
                }
                if segments > 1 && s + 1 == segments {
                    len = len.max(leg_len / (1.0 + r * kappa.abs()) * (1.0 + 1e-12));
                }
                x[at] = len;
                at += 1;
            }
        };
        let solver = SolverOptions { max_iterations: 200, step_tolerance: 1e-12, fd_step: 1e-7 };
        let report = lsq::minimize(residuals, &x0, project, solver);
        let shape = chain.to_shape(&report.params, self.r_min);
        let base = Pose::new(self.start[0], self.start[1], report.params[0]);
        let traced = forward_kinematics(&shape, base, 1.0)?;
        let residual = mean_config_error(&traced, self.waypoints, self.eval_n)?;
        Ok(Candidate { shape, base, residual })
    }
}

/// Centerline of a shape traced from `base` at the default density.
pub fn trace(shape: &[ShapePrimitive], base: Pose) -> Result<Polyline> {
    Ok(forward_kinematics(shape, base, kinematics::DEFAULT_SAMPLES_PER_MM)?)
}
