#![allow(dead_code)]

use rand::Rng;
use vinelock_core::{DesignParams, Polyline, ShapePrimitive, Turn};

/// Closed-form trace of a line/arc chain, sampled at `per_prim` points per
/// primitive. Written without the library's pose helpers.
pub fn oracle_points(shape: &[ShapePrimitive], x0: f64, y0: f64, h0: f64, per_prim: usize) -> Vec<[f64; 2]> {
    let (mut x, mut y, mut h) = (x0, y0, h0);
    let mut out = vec![[x, y]];
    for prim in shape {
        for k in 1..=per_prim {
            let f = k as f64 / per_prim as f64;
            let p = match *prim {
                ShapePrimitive::Line { length } => [x + f * length * h.cos(), y + f * length * h.sin()],
                ShapePrimitive::Arc { radius, angle, turn } => {
                    let sgn = if turn == Turn::Left { 1.0 } else { -1.0 };
                    // centre sits a radius to the turning side
                    let cx = x - sgn * radius * h.sin();
                    let cy = y + sgn * radius * h.cos();
                    let phi = h + sgn * f * angle;
                    [cx + sgn * radius * phi.sin(), cy - sgn * radius * phi.cos()]
                }
            };
            out.push(p);
        }
        let end = *out.last().unwrap();
        x = end[0];
        y = end[1];
        if let ShapePrimitive::Arc { angle, turn, .. } = *prim {
            h += if turn == Turn::Left { angle } else { -angle };
        }
    }
    out
}

pub fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn random_turn<R: Rng>(rng: &mut R) -> Turn {
    if rng.gen_bool(0.5) {
        Turn::Left
    } else {
        Turn::Right
    }
}

/// Random primitive within the curvature bound.
pub fn random_primitive<R: Rng>(rng: &mut R, design: &DesignParams, min_material: f64) -> ShapePrimitive {
    let r = design.beam_radius;
    let r_min = design.min_bend_radius();
    if rng.gen_bool(0.4) {
        ShapePrimitive::line(rng.gen_range(min_material.max(20.0)..min_material.max(20.0) + 400.0))
    } else {
        let radius = rng.gen_range(r_min..3.0 * r_min);
        let min_angle = (min_material / (radius + r)).max(0.2);
        ShapePrimitive::arc(radius, rng.gen_range(min_angle..min_angle + 1.2), random_turn(rng))
    }
}

/// Random 3-primitive shape the planner accepts: arcs within the bound and a
/// final primitive long enough to fill the unlocked window.
pub fn random_feasible_shape<R: Rng>(rng: &mut R, design: &DesignParams) -> Vec<ShapePrimitive> {
    vec![
        random_primitive(rng, design, 0.0),
        random_primitive(rng, design, 0.0),
        random_primitive(rng, design, design.leg_len),
    ]
}

/// Like [`random_feasible_shape`] but with minimum-radius arcs only.
pub fn random_binary_shape<R: Rng>(rng: &mut R, design: &DesignParams) -> Vec<ShapePrimitive> {
    let r_min = design.min_bend_radius();
    let r = design.beam_radius;
    (0..3)
        .map(|i| {
            let min_material = if i == 2 { design.leg_len } else { 0.0 };
            match random_primitive(rng, design, min_material) {
                ShapePrimitive::Arc { turn, .. } => {
                    let min_angle = (min_material / (r_min + r)).max(0.2);
                    ShapePrimitive::arc(r_min, rng.gen_range(min_angle..min_angle + 1.2), turn)
                }
                line => line,
            }
        })
        .collect()
}

pub fn material(shape: &[ShapePrimitive], r: f64) -> f64 {
    shape.iter().map(|p| p.material_len(r)).sum()
}

pub fn polyline(points: Vec<[f64; 2]>) -> Polyline {
    Polyline::new(points).expect("valid polyline")
}
