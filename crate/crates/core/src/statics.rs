//! Bend-holding statics of a pressurised beam whose bend is pinned by a
//! hook-and-loop fastener, plus the empirical stiffness/deflection models.
//!
//! Units at the API boundary: gauge pressure in kPa, lengths in mm, forces
//! in N, torques in N·m, angles in rad (deflections in degrees). Internally
//! everything is converted to SI before the moment balance is formed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lsq::{self, SolverOptions};

const MM: f64 = 1e-3;
const KPA: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StaticsError {
    #[error("bend angle {0} rad is outside the model domain")]
    AngleOutOfDomain(f64),
    #[error("gauge pressure must be non-negative, got {0} kPa")]
    NegativePressure(f64),
    #[error("beam radius must be positive, got {0} mm")]
    NonPositiveRadius(f64),
    #[error("invalid fastener parameters: {0}")]
    InvalidFastener(String),
    #[error("invalid stiffness parameters: {0}")]
    InvalidStiffness(String),
    #[error("need at least {need} samples at distinct angles, got {got}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("sample {index} is invalid: {reason}")]
    InvalidSample { index: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, StaticsError>;

/// Geometry and separation strengths of the locking fastener.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastenerParams {
    /// Fastener width, mm.
    pub width: f64,
    /// Fastener thickness, mm.
    pub thickness: f64,
    /// Pure-normal separation stress, kPa.
    pub sigma_star: f64,
    /// Pure-shear separation stress, kPa.
    pub tau_star: f64,
    /// Moment-arm offset of the fastener tension line, mm.
    pub pinch_offset: f64,
    /// False until the strengths come from [`calibrate_fastener`].
    #[serde(default)]
    pub calibrated: bool,
}

impl Default for FastenerParams {
    fn default() -> Self {
        Self {
            width: 25.0,
            thickness: 3.0,
            sigma_star: 50.0,
            tau_star: 50.0,
            pinch_offset: 5.0,
            calibrated: false,
        }
    }
}

impl FastenerParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(StaticsError::InvalidFastener(format!("{what} = {v}")));
        if !(self.width > 0.0) {
            return bad("width", self.width);
        }
        if !(self.thickness > 0.0) {
            return bad("thickness", self.thickness);
        }
        if !(self.sigma_star > 0.0) {
            return bad("sigma_star", self.sigma_star);
        }
        if !(self.tau_star > 0.0) {
            return bad("tau_star", self.tau_star);
        }
        if !(self.pinch_offset >= 0.0) {
            return bad("pinch_offset", self.pinch_offset);
        }
        Ok(())
    }

    /// Stressed fastener area `8·w·t`, m².
    pub fn stressed_area(&self) -> f64 {
        8.0 * self.width * MM * self.thickness * MM
    }
}

/// Empirical stiffness and tension-deflection slopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessParams {
    /// Tip stiffness without fasteners, N/m.
    pub k_unlocked: f64,
    /// Tip stiffness with a fastener strip, N/m.
    pub k_locked: f64,
    /// Tip-angle slope of an unlocked beam, deg/N.
    pub s_unlocked: f64,
    /// Tip-angle slope of a locked bend loaded against its turn, deg/N.
    pub s_locked: f64,
    /// Cable tension that brings every stopper into contact, N.
    pub t_full: f64,
}

impl Default for StiffnessParams {
    fn default() -> Self {
        Self { k_unlocked: 152.0, k_locked: 199.0, s_unlocked: 9.0, s_locked: 1.0, t_full: 10.0 }
    }
}

impl StiffnessParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_unlocked > 0.0 && self.k_locked > self.k_unlocked) {
            return Err(StaticsError::InvalidStiffness(format!(
                "need k_locked > k_unlocked > 0, got {} and {}",
                self.k_locked, self.k_unlocked
            )));
        }
        if !(self.s_locked > 0.0 && self.s_unlocked > self.s_locked) {
            return Err(StaticsError::InvalidStiffness(format!(
                "need s_unlocked > s_locked > 0, got {} and {}",
                self.s_unlocked, self.s_locked
            )));
        }
        if !(self.t_full > 0.0) {
            return Err(StaticsError::InvalidStiffness(format!("t_full = {}", self.t_full)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Unlocked,
    Locked,
}

/// Magnitude of the straightening torque of a beam of radius `r` bent by
/// `theta` at gauge pressure `pressure`.
pub fn resistance_torque(pressure: f64, r: f64, theta: f64) -> Result<f64> {
    if !(pressure >= 0.0) {
        return Err(StaticsError::NegativePressure(pressure));
    }
    if !(r > 0.0) {
        return Err(StaticsError::NonPositiveRadius(r));
    }
    if !(0.0..PI).contains(&theta) {
        return Err(StaticsError::AngleOutOfDomain(theta));
    }
    let half_tan = (theta / 2.0).tan();
    Ok(PI * (r * MM).powi(3) * pressure * KPA * (half_tan * half_tan + 1.0))
}

/// Angle of the fastener tension line for a bend of `theta`.
pub fn fastener_angle(theta: f64) -> f64 {
    (PI - theta) / 2.0
}

/// Largest fastener tension that still satisfies the elliptical
/// normal/shear separation criterion.
pub fn max_fastener_tension(theta: f64, f: &FastenerParams) -> f64 {
    let (sin_a, cos_a) = fastener_angle(theta).sin_cos();
    let sigma = f.sigma_star * KPA;
    let tau = f.tau_star * KPA;
    f.stressed_area() / ((sin_a / sigma).powi(2) + (cos_a / tau).powi(2)).sqrt()
}

/// Torque of fastener tension `tension` about the bend's centre of rotation.
fn fastener_moment(tension: f64, theta: f64, r: f64, f: &FastenerParams) -> f64 {
    let (sin_a, cos_a) = fastener_angle(theta).sin_cos();
    let r = r * MM;
    let d = f.pinch_offset * MM;
    r * tension * cos_a + (r / (theta / 2.0).tan() + d) * tension * sin_a
}

/// Residual of the moment balance about the centre of rotation, N·m.
///
/// Zero when the pressure torque is exactly carried by the fastener.
pub fn moment_residual(pressure: f64, tension: f64, theta: f64, r: f64, f: &FastenerParams) -> Result<f64> {
    Ok(resistance_torque(pressure, r, theta)? - fastener_moment(tension, theta, r, f))
}

/// Minimum gauge pressure (kPa) at which the fastener holding a bend of
/// `theta` on a beam of radius `r` starts to separate.
///
/// First the largest admissible fastener tension is found, then the moment
/// balance is solved for the pressure that requires exactly that tension.
pub fn separation_pressure(theta: f64, r: f64, f: &FastenerParams) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(StaticsError::AngleOutOfDomain(theta));
    }
    if !(r > 0.0) {
        return Err(StaticsError::NonPositiveRadius(r));
    }
    f.validate()?;
    let tension = max_fastener_tension(theta, f);
    let half_tan = (theta / 2.0).tan();
    let torque_per_pascal = PI * (r * MM).powi(3) * (half_tan * half_tan + 1.0);
    Ok(fastener_moment(tension, theta, r, f) / torque_per_pascal / KPA)
}

/// Tip-angle change (degrees) under cable tension, linear in tension.
///
/// `unlocked_cap_deg` bounds the unlocked response at the geometric
/// full-contraction bend of the window; locked bends are uncapped.
pub fn tip_deflection(
    tension: f64,
    regime: Regime,
    s: &StiffnessParams,
    unlocked_cap_deg: Option<f64>,
) -> f64 {
    let tension = tension.max(0.0);
    match regime {
        Regime::Locked => s.s_locked * tension,
        Regime::Unlocked => {
            let raw = s.s_unlocked * tension;
            unlocked_cap_deg.map_or(raw, |cap| raw.min(cap))
        }
    }
}

/// Tip force (N) of a cantilevered beam displaced by `displacement` metres.
pub fn beam_tip_force(displacement: f64, regime: Regime, s: &StiffnessParams) -> f64 {
    let k = match regime {
        Regime::Unlocked => s.k_unlocked,
        Regime::Locked => s.k_locked,
    };
    k * displacement.max(0.0)
}

/// One separation measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSample {
    #[serde(rename = "theta_rad")]
    pub theta: f64,
    #[serde(rename = "p_sep_kpa")]
    pub p_sep: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub params: FastenerParams,
    /// Root-mean-square pressure residual, kPa.
    pub rmse: f64,
    /// Solver iterations summed over all starts.
    pub iterations: usize,
    /// False when the iteration budget ran out; `params` is then the best
    /// point found.
    pub converged: bool,
}

/// Fits `sigma_star`, `tau_star` (and `pinch_offset` when `fit_offset`) to
/// measured separation pressures by least squares.
///
/// Parameters are optimised in log space so the result stays strictly
/// positive; width and thickness are taken from `init` unchanged.
pub fn calibrate_fastener(
    samples: &[CalibrationSample],
    r: f64,
    init: &FastenerParams,
    fit_offset: bool,
) -> Result<Calibration> {
    if !(r > 0.0) {
        return Err(StaticsError::NonPositiveRadius(r));
    }
    init.validate()?;
    for (index, s) in samples.iter().enumerate() {
        if !(s.theta > 0.0 && s.theta < PI) {
            return Err(StaticsError::InvalidSample {
                index,
                reason: format!("angle {} rad not in (0, π)", s.theta),
            });
        }
        if !(s.p_sep > 0.0 && s.p_sep.is_finite()) {
            return Err(StaticsError::InvalidSample {
                index,
                reason: format!("pressure {} kPa not positive", s.p_sep),
            });
        }
    }
    let need = 3;
    let mut angles: Vec<f64> = samples.iter().map(|s| s.theta).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    if samples.len() < need || angles.len() < need {
        return Err(StaticsError::InsufficientSamples { got: angles.len().min(samples.len()), need });
    }

    let unpack = |x: &[f64]| FastenerParams {
        sigma_star: x[0].exp(),
        tau_star: x[1].exp(),
        pinch_offset: if fit_offset { x[2] } else { init.pinch_offset },
        calibrated: true,
        ..*init
    };
    let residuals = |x: &[f64]| -> Vec<f64> {
        let f = unpack(x);
        samples
            .iter()
            .map(|s| separation_pressure(s.theta, r, &f).map_or(f64::NAN, |p| p - s.p_sep))
            .collect()
    };
    // Keep exp() finite and the offset non-negative.
    let project = |x: &mut [f64]| {
        x[0] = x[0].clamp(-30.0, 30.0);
        x[1] = x[1].clamp(-30.0, 30.0);
        if let Some(d) = x.get_mut(2) {
            *d = d.clamp(0.0, 1e3 * r);
        }
    };

    // A few starts over the strength ratio and offset guard against the
    // shallow valleys of this model.
    let mut starts = Vec::new();
    for ratio in [1.0f64, 3.0, 1.0 / 3.0] {
        let sigma0 = (init.sigma_star * ratio.sqrt()).ln();
        let tau0 = (init.tau_star / ratio.sqrt()).ln();
        if fit_offset {
            for d0 in [init.pinch_offset, 0.25 * r] {
                starts.push(vec![sigma0, tau0, d0]);
            }
        } else {
            starts.push(vec![sigma0, tau0]);
        }
    }
    let mut best: Option<lsq::SolverReport> = None;
    let mut iterations = 0;
    for x0 in &starts {
        let report = lsq::minimize(residuals, x0, project, SolverOptions::default());
        iterations += report.iterations;
        if best.as_ref().is_none_or(|b| report.cost < b.cost) {
            best = Some(report);
        }
    }
    let report = best.expect("at least one start");
    Ok(Calibration {
        params: unpack(&report.params),
        rmse: (report.cost / samples.len() as f64).sqrt(),
        iterations,
        converged: report.converged,
    })
}
