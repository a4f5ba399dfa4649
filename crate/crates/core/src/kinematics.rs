//! Planar geometry of a cable-and-stopper bent vine.
//!
//! Shapes are sequences of constant-curvature arcs and straight lines. All
//! lengths are millimetres and all angles radians. Two length notions are in
//! play: the *centerline* length (what [`forward_kinematics`] traces) and the
//! *material* length, i.e. the outer-wall length that has to be everted to
//! produce the primitive. For a line they coincide; an arc of radius `R` and
//! angle `θ` on a beam of radius `r` consumes `(R + r)·θ` of material.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default forward-kinematics sampling density, points per millimetre.
pub const DEFAULT_SAMPLES_PER_MM: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("stopper and gap lengths are both zero")]
    DegenerateStopperSpec,
    #[error("stopper length {stopper_len} mm and gap length {gap_len} mm must be non-negative")]
    NegativeStopperSpec { stopper_len: f64, gap_len: f64 },
    #[error("contraction ratio {0} gives no contraction (infinite bend radius)")]
    NoContraction(f64),
    #[error("contraction ratio {0} exceeds 1")]
    RatioAboveOne(f64),
    #[error("beam radius must be positive, got {0} mm")]
    NonPositiveBeamRadius(f64),
    #[error("shortened length {shortened} mm is not below original length {original} mm")]
    NoShortening { original: f64, shortened: f64 },
    #[error("bend radius {bend_radius} mm is below the beam radius {beam_radius} mm")]
    BendTighterThanBeam { bend_radius: f64, beam_radius: f64 },
    #[error("bend angle must be positive, got {0} rad")]
    NonPositiveAngle(f64),
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("sampling density must be positive, got {0} per mm")]
    NonPositiveDensity(f64),
    #[error("polyline needs at least one point")]
    EmptyPolyline,
    #[error("polyline point {0} is not finite")]
    NonFinitePoint(usize),
    #[error("resampling needs at least 2 points, got {0}")]
    TooFewSamples(usize),
}

pub type Result<T> = std::result::Result<T, KinematicsError>;

/// Stopper tube length and the gap between consecutive stoppers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopperSpec {
    pub stopper_len: f64,
    pub gap_len: f64,
}

impl StopperSpec {
    pub fn new(stopper_len: f64, gap_len: f64) -> Result<Self> {
        let spec = Self { stopper_len, gap_len };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.stopper_len >= 0.0 && self.gap_len >= 0.0) {
            return Err(KinematicsError::NegativeStopperSpec {
                stopper_len: self.stopper_len,
                gap_len: self.gap_len,
            });
        }
        if self.stopper_len == 0.0 && self.gap_len == 0.0 {
            return Err(KinematicsError::DegenerateStopperSpec);
        }
        Ok(())
    }
}

impl Default for StopperSpec {
    /// 19 mm stoppers spaced 19 mm apart.
    fn default() -> Self {
        Self { stopper_len: 19.0, gap_len: 19.0 }
    }
}

/// Fraction of length removed when every gap on one side is closed.
pub fn contraction_ratio(spec: &StopperSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.gap_len / (spec.stopper_len + spec.gap_len))
}

/// Tightest bend radius reachable with contraction ratio `a` on a beam of
/// radius `r`.
///
/// Note that only `a ≤ 2/3` keeps the result at or above `2r`; at `a = 1`
/// the radius collapses to `r`.
pub fn min_bend_radius(r: f64, a: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(KinematicsError::NonPositiveBeamRadius(r));
    }
    if !(a > 0.0) {
        return Err(KinematicsError::NoContraction(a));
    }
    if a > 1.0 {
        return Err(KinematicsError::RatioAboveOne(a));
    }
    Ok(r * (2.0 - a) / a)
}

/// Bend angle produced when the outer wall keeps `original` length and the
/// cable side is shortened to `shortened`.
pub fn bend_angle_from_lengths(original: f64, shortened: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(KinematicsError::NonPositiveBeamRadius(r));
    }
    if !(original > shortened) || shortened < 0.0 {
        return Err(KinematicsError::NoShortening { original, shortened });
    }
    Ok((original - shortened) / (2.0 * r))
}

/// Material that has to be everted under tension to form a bend of radius
/// `bend_radius` and angle `theta`.
pub fn growth_for_bend(bend_radius: f64, r: f64, theta: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(KinematicsError::NonPositiveBeamRadius(r));
    }
    if !(bend_radius >= r) {
        return Err(KinematicsError::BendTighterThanBeam { bend_radius, beam_radius: r });
    }
    if !(theta > 0.0) {
        return Err(KinematicsError::NonPositiveAngle(theta));
    }
    Ok((bend_radius + r) * theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Turn {
    /// Counter-clockwise.
    Left,
    /// Clockwise.
    Right,
}

impl Turn {
    pub fn sign(self) -> f64 {
        match self {
            Turn::Left => 1.0,
            Turn::Right => -1.0,
        }
    }

    pub fn opposite(self) -> Turn {
        match self {
            Turn::Left => Turn::Right,
            Turn::Right => Turn::Left,
        }
    }

    /// Turn direction of a signed curvature, `None` for zero.
    pub fn of_curvature(kappa: f64) -> Option<Turn> {
        if kappa > 0.0 {
            Some(Turn::Left)
        } else if kappa < 0.0 {
            Some(Turn::Right)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShapePrimitive {
    Line { length: f64 },
    Arc { radius: f64, angle: f64, turn: Turn },
}

impl ShapePrimitive {
    pub fn line(length: f64) -> Self {
        ShapePrimitive::Line { length }
    }

    pub fn arc(radius: f64, angle: f64, turn: Turn) -> Self {
        ShapePrimitive::Arc { radius, angle, turn }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ShapePrimitive::Line { length } => {
                if !(length > 0.0 && length.is_finite()) {
                    return Err(KinematicsError::InvalidPrimitive(format!(
                        "line length {length} mm must be positive"
                    )));
                }
            }
            ShapePrimitive::Arc { radius, angle, .. } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(KinematicsError::InvalidPrimitive(format!(
                        "arc radius {radius} mm must be positive"
                    )));
                }
                if !(angle > 0.0 && angle < TAU) {
                    return Err(KinematicsError::InvalidPrimitive(format!(
                        "arc angle {angle} rad must lie in (0, 2π)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Length traced by the beam centerline.
    pub fn centerline_len(&self) -> f64 {
        match *self {
            ShapePrimitive::Line { length } => length,
            ShapePrimitive::Arc { radius, angle, .. } => radius * angle,
        }
    }

    /// Outer-wall (everted material) length on a beam of radius `r`.
    pub fn material_len(&self, r: f64) -> f64 {
        match *self {
            ShapePrimitive::Line { length } => length,
            ShapePrimitive::Arc { radius, angle, .. } => (radius + r) * angle,
        }
    }

    /// Signed curvature in 1/mm, positive for left turns.
    pub fn curvature(&self) -> f64 {
        match *self {
            ShapePrimitive::Line { .. } => 0.0,
            ShapePrimitive::Arc { radius, turn, .. } => turn.sign() / radius,
        }
    }

    /// Pose reached after travelling `s` millimetres of centerline from `start`.
    pub fn pose_at(&self, start: Pose, s: f64) -> Pose {
        let (x, y, h) = (start.x, start.y, start.heading);
        match *self {
            ShapePrimitive::Line { .. } => Pose::new(x + s * h.cos(), y + s * h.sin(), h),
            ShapePrimitive::Arc { radius, turn, .. } => {
                let sign = turn.sign();
                let swept = s / radius;
                let end_heading = h + sign * swept;
                let cx = x - sign * radius * h.sin();
                let cy = y + sign * radius * h.cos();
                Pose::new(
                    cx + sign * radius * end_heading.sin(),
                    cy - sign * radius * end_heading.cos(),
                    end_heading,
                )
            }
        }
    }

    pub fn end_pose(&self, start: Pose) -> Pose {
        self.pose_at(start, self.centerline_len())
    }
}

/// Planar pose; heading is kept in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: normalize_angle(heading) }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    /// Maps a point expressed in this pose's frame into the world frame.
    pub fn transform_point(&self, p: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.heading.sin_cos();
        [self.x + c * p[0] - s * p[1], self.y + s * p[0] + c * p[1]]
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Pose) -> Pose {
        let [x, y] = self.transform_point([other.x, other.y]);
        Pose::new(x, y, self.heading + other.heading)
    }
}

/// Wraps an angle into (−π, π].
pub fn normalize_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let wrapped = a.rem_euclid(TAU);
    if wrapped > PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Ordered list of planar points with no consecutive duplicates.
///
/// A single point is allowed and stands for a zero-length configuration
/// (e.g. an empty deployment); every metric treats it as a point curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polyline {
    points: Vec<[f64; 2]>,
}

impl Polyline {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.is_empty() {
            return Err(KinematicsError::EmptyPolyline);
        }
        if let Some(i) = points.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(KinematicsError::NonFinitePoint(i));
        }
        let mut deduped: Vec<[f64; 2]> = Vec::with_capacity(points.len());
        for p in points {
            if deduped.last() != Some(&p) {
                deduped.push(p);
            }
        }
        Ok(Self { points: deduped })
    }

    pub fn single(p: [f64; 2]) -> Self {
        Self { points: vec![p] }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> [f64; 2] {
        self.points[0]
    }

    pub fn last(&self) -> [f64; 2] {
        self.points[self.points.len() - 1]
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Polyline {
        Polyline { points: self.points.iter().map(|p| [p[0] + dx, p[1] + dy]).collect() }
    }

    pub fn transformed(&self, pose: &Pose) -> Polyline {
        Polyline { points: self.points.iter().map(|&p| pose.transform_point(p)).collect() }
    }
}

impl TryFrom<Vec<[f64; 2]>> for Polyline {
    type Error = KinematicsError;

    fn try_from(points: Vec<[f64; 2]>) -> Result<Self> {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<[f64; 2]> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Largest heading change across one traced segment, rad.
const MAX_TURN_PER_SEGMENT: f64 = 0.1;

/// Number of segments used to trace a curve of centerline length `total`
/// whose tightest curvature is `max_curvature`.
fn segment_count(total: f64, max_curvature: f64, samples_per_mm: f64) -> usize {
    // The slack keeps the count stable under last-ulp differences in `total`.
    let by_length = (total * samples_per_mm - 1e-9).ceil();
    let by_turn = (total * max_curvature / MAX_TURN_PER_SEGMENT - 1e-9).ceil();
    by_length.max(by_turn).max(1.0) as usize
}

/// Traces the centerline of `shape` starting at `base`.
///
/// Points are spaced uniformly in arc length over the whole shape, at
/// least `samples_per_mm` per millimetre and finely enough that no segment
/// turns by more than 0.1 rad. The trace therefore depends only on the
/// curve, not on how it is split into primitives. The last point is the
/// exact end pose of the final primitive.
pub fn forward_kinematics(
    shape: &[ShapePrimitive],
    base: Pose,
    samples_per_mm: f64,
) -> Result<Polyline> {
    if !(samples_per_mm > 0.0 && samples_per_mm.is_finite()) {
        return Err(KinematicsError::NonPositiveDensity(samples_per_mm));
    }
    for prim in shape {
        prim.validate()?;
    }
    if shape.is_empty() {
        return Ok(Polyline::single(base.position()));
    }
    let total: f64 = shape.iter().map(ShapePrimitive::centerline_len).sum();
    let max_curvature = shape.iter().map(|p| p.curvature().abs()).fold(0.0, f64::max);
    let n = segment_count(total, max_curvature, samples_per_mm);

    let mut points = Vec::with_capacity(n + 1);
    points.push(base.position());
    let mut idx = 0;
    let mut prim_pose = base;
    let mut prim_start = 0.0;
    for k in 1..n {
        let s = total * k as f64 / n as f64;
        while idx + 1 < shape.len() && s > prim_start + shape[idx].centerline_len() {
            prim_pose = shape[idx].end_pose(prim_pose);
            prim_start += shape[idx].centerline_len();
            idx += 1;
        }
        points.push(shape[idx].pose_at(prim_pose, s - prim_start).position());
    }
    points.push(end_pose(shape, base).position());
    Polyline::new(points)
}

/// Pose at the end of `shape`.
pub fn end_pose(shape: &[ShapePrimitive], base: Pose) -> Pose {
    shape.iter().fold(base, |pose, prim| prim.end_pose(pose))
}

/// `n` points at equal arc-length spacing along `p`, endpoints included.
pub fn resample_evenly(p: &Polyline, n: usize) -> Result<Polyline> {
    if n < 2 {
        return Err(KinematicsError::TooFewSamples(n));
    }
    let pts = p.points();
    let total = p.length();
    if pts.len() == 1 || total == 0.0 {
        return Ok(Polyline { points: vec![pts[0]; n] });
    }
    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0;
    let mut seg_start = 0.0;
    let mut seg_len = dist(pts[0], pts[1]);
    for k in 1..n - 1 {
        let target = total * k as f64 / (n - 1) as f64;
        while seg_start + seg_len < target && seg + 2 < pts.len() {
            seg_start += seg_len;
            seg += 1;
            seg_len = dist(pts[seg], pts[seg + 1]);
        }
        let t = ((target - seg_start) / seg_len).clamp(0.0, 1.0);
        let (a, b) = (pts[seg], pts[seg + 1]);
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    out.push(p.last());
    // Equal consecutive points are legal here (e.g. degenerate input), so
    // bypass the dedup in `Polyline::new`.
    Ok(Polyline { points: out })
}

/// Mean distance between index-paired points after resampling both curves to
/// `n` evenly spaced points.
pub fn mean_config_error(deployed: &Polyline, desired: &Polyline, n: usize) -> Result<f64> {
    let a = resample_evenly(deployed, n)?;
    let b = resample_evenly(desired, n)?;
    let sum: f64 = a.points().iter().zip(b.points()).map(|(&p, &q)| dist(p, q)).sum();
    Ok(sum / n as f64)
}
