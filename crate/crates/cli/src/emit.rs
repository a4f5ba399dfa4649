//! Trace, CSV and SVG writers. Coordinates are written with Rust's
//! shortest round-trip float formatting, so files reproduce the in-memory
//! geometry exactly.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use vinelock_core::{Command, Event, Snapshot};

/// One line of `trace.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    /// 1-based position of the command in the run.
    pub seq: u64,
    pub cmd: Command,
    pub everted_len: f64,
    /// Locked primitives plus the window.
    pub primitive_count: usize,
    pub events: Vec<Event>,
}

pub fn write_trace_line(w: &mut impl Write, record: &TraceRecord) -> io::Result<()> {
    serde_json::to_writer(&mut *w, record)?;
    w.write_all(b"\n")
}

/// Whether centerline point `i` lies in the locked region.
pub fn is_locked(snapshot: &Snapshot, i: usize) -> bool {
    snapshot.lock_boundary_index > 0 && i <= snapshot.lock_boundary_index
}

pub fn write_centerline_csv(w: &mut impl Write, snapshot: &Snapshot) -> io::Result<()> {
    writeln!(w, "x_mm,y_mm,locked")?;
    for (i, p) in snapshot.centerline.points().iter().enumerate() {
        writeln!(w, "{},{},{}", p[0], p[1], u8::from(is_locked(snapshot, i)))?;
    }
    Ok(())
}

pub const LOCKED_COLOR: &str = "#f28e2b";
pub const UNLOCKED_COLOR: &str = "#4e79a7";

fn points_attr(points: &[[f64; 2]]) -> String {
    let mut s = String::new();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", p[0], p[1]);
    }
    s
}

/// Draws the body as a thick stroke, locked part orange and unlocked part
/// blue, in millimetre user units with +y up.
pub fn write_svg(w: &mut impl Write, snapshot: &Snapshot, beam_radius: f64) -> io::Result<()> {
    let pts = snapshot.centerline.points();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let margin = 2.0 * beam_radius;
    let (x0, y0, x1, y1) = (x0 - margin, y0 - margin, x1 + margin, y1 + margin);
    let (width, height) = (x1 - x0, y1 - y0);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}mm" height="{height}mm" viewBox="{x0} {} {width} {height}">"#,
        -y1
    )?;
    writeln!(w, r#"  <g transform="scale(1,-1)" fill="none" stroke-linecap="round" stroke-linejoin="round">"#)?;
    let stroke = 2.0 * beam_radius;
    let b = snapshot.lock_boundary_index.min(pts.len() - 1);
    if b > 0 {
        writeln!(
            w,
            r#"    <polyline class="locked" stroke="{LOCKED_COLOR}" stroke-width="{stroke}" points="{}"/>"#,
            points_attr(&pts[..=b])
        )?;
    }
    if b + 1 < pts.len() || b == 0 {
        writeln!(
            w,
            r#"    <polyline class="unlocked" stroke="{UNLOCKED_COLOR}" stroke-width="{stroke}" points="{}"/>"#,
            points_attr(&pts[b..])
        )?;
    }
    writeln!(w, r##"    <circle class="base" cx="{}" cy="{}" r="{}" fill="#333"/>"##, pts[0][0], pts[0][1], beam_radius / 4.0)?;
    writeln!(w, "  </g>")?;
    writeln!(w, "</svg>")
}
