//! CSV and SVG export.
//!
//! Numbers are written with 17 significant digits so every `f64` round-trips.

use std::fmt::Write as _;
use std::io::Write;

use crate::analysis::OccupancySeries;
use crate::catcher::CatcherPath;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::geometry::{Point2, Scene};
use crate::tgcc::TgccReport;

/// Round-trip decimal form of `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv output failed: {e}"))
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("output failed: {e}"))
}

/// Rows `(t, x, y, wall)`: the start, every event, and the end point.
pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y", "wall"]).map_err(csv_err)?;
    let mut row = |t: f64, p: Point2, wall: &str| {
        w.write_record([fmt_f64(t), fmt_f64(p.x), fmt_f64(p.y), wall.to_string()])
    };
    row(tr.start.time, tr.start.pos, "").map_err(csv_err)?;
    for e in &tr.events {
        let id = if e.tangential { format!("{}~", e.wall) } else { e.wall.to_string() };
        row(e.time, e.point, &id).map_err(csv_err)?;
    }
    if tr.horizon.is_finite() && tr.events.last().is_none_or(|e| e.time < tr.horizon) {
        row(tr.horizon, tr.position_at(tr.horizon)?, "").map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// Rows `(t, cx, cy)` at the waypoints.
pub fn write_path_csv<W: Write>(path: &CatcherPath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "cx", "cy"]).map_err(csv_err)?;
    for &(t, c) in &path.waypoints {
        w.write_record([fmt_f64(t), fmt_f64(c.x), fmt_f64(c.y)]).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// Rows `(x, y, angle, seeded)` of the uncaught samples.
pub fn write_witness_csv<W: Write>(r: &TgccReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "angle", "seeded"]).map_err(csv_err)?;
    for s in &r.witnesses {
        w.write_record([fmt_f64(s.pos.x), fmt_f64(s.pos.y), fmt_f64(s.angle), s.seeded.to_string()])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// Rows `(T, fraction)`.
pub fn write_occupancy_csv<W: Write>(s: &OccupancySeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "fraction"]).map_err(csv_err)?;
    for (h, f) in s.horizons.iter().zip(&s.fractions) {
        w.write_record([fmt_f64(*h), fmt_f64(*f)]).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// What to draw on top of the scene.
#[derive(Default)]
pub struct Overlay<'a> {
    pub trajectories: Vec<&'a Trajectory>,
    pub path: Option<&'a CatcherPath>,
    /// Draw the three zones of the obstacle scene.
    pub zones: bool,
}

const COLORS: [&str; 4] = ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b"];

fn polyline(out: &mut String, pts: &[Point2], color: &str, width: f64) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|p| format!("{:.5},{:.5}", p.x, -p.y)).collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
        coords.join(" ")
    );
}

/// Vertices of the trajectory drawn in the fundamental domain; torus lines
/// are broken where they wrap.
fn trajectory_strokes(tr: &Trajectory) -> Vec<Vec<Point2>> {
    if let Scene::Torus { side } = tr.scene {
        let mut strokes = Vec::new();
        let d = tr.start.dir.vector();
        let mut t = tr.start.time;
        // at most 400 side lengths of drawing
        let end = tr.horizon.min(tr.start.time + 400.0 * side);
        while t < end {
            let p = tr.position_at(t).unwrap_or(tr.start.pos);
            // time to the next wall of the fundamental square
            let exit = |x: f64, v: f64| {
                if v > 0.0 {
                    (side - x) / v
                } else if v < 0.0 {
                    -x / v
                } else {
                    f64::INFINITY
                }
            };
            let dt = exit(p.x, d.x).min(exit(p.y, d.y)).min(end - t).max(1e-12);
            strokes.push(vec![p, p + d * dt]);
            t += dt;
        }
        return strokes;
    }
    let mut pts = vec![tr.start.pos];
    pts.extend(tr.events.iter().map(|e| e.point));
    if let Ok(p) = tr.position_at(tr.horizon) {
        pts.push(p);
    }
    vec![pts]
}

/// Standalone SVG of the scene with the overlay. Presentation only.
pub fn render_svg(scene: &Scene, overlay: &Overlay) -> String {
    let (lo, hi) = scene.bounding_box();
    let size = hi - lo;
    let pad = 0.05 * size.x.max(size.y);
    let stroke = 0.004 * size.x.max(size.y);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="{}">"#,
        lo.x - pad,
        -hi.y - pad,
        size.x + 2.0 * pad,
        size.y + 2.0 * pad,
        (800.0 * (size.y + 2.0 * pad) / (size.x + 2.0 * pad)).round()
    );
    match *scene {
        Scene::Torus { side } => {
            let _ = writeln!(
                s,
                r#"<rect x="0" y="{}" width="{side}" height="{side}" fill="none" stroke="black" stroke-dasharray="{}" stroke-width="{stroke}"/>"#,
                -side,
                4.0 * stroke
            );
        }
        Scene::Rectangle { width, height } => {
            let _ = writeln!(
                s,
                r#"<rect x="0" y="{}" width="{width}" height="{height}" fill="none" stroke="black" stroke-width="{stroke}"/>"#,
                -height
            );
        }
        Scene::Disk { radius } => {
            let _ = writeln!(
                s,
                r#"<circle cx="0" cy="0" r="{radius}" fill="none" stroke="black" stroke-width="{stroke}"/>"#
            );
        }
        Scene::Obstacle(o) => {
            let _ = writeln!(
                s,
                r#"<circle cx="0" cy="0" r="{}" fill="none" stroke="black" stroke-width="{stroke}"/>"#,
                o.outer_radius
            );
            if overlay.zones {
                for a in 1..=3u8 {
                    let (c1, c2) = o.zone_segment(a);
                    let _ = writeln!(
                        s,
                        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#ffd27f" stroke-opacity="0.6" stroke-linecap="round" stroke-width="{}"/>"##,
                        c1.x,
                        -c1.y,
                        c2.x,
                        -c2.y,
                        2.0 * o.r0
                    );
                }
            }
            for j in 1..=3u8 {
                let c = o.center(j);
                let _ = writeln!(
                    s,
                    r##"<circle cx="{}" cy="{}" r="{}" fill="#444"/>"##,
                    c.x,
                    -c.y,
                    o.r0
                );
                let label = c + (c - o.centroid()) * (2.5 * o.r0 / c.distance(o.centroid()));
                let _ = writeln!(
                    s,
                    r#"<text x="{}" y="{}" font-size="{}" text-anchor="middle">{}</text>"#,
                    label.x,
                    -label.y,
                    3.0 * o.r0,
                    j
                );
            }
        }
    }
    for (k, tr) in overlay.trajectories.iter().enumerate() {
        for stroke_pts in trajectory_strokes(tr) {
            polyline(&mut s, &stroke_pts, COLORS[k % COLORS.len()], stroke);
        }
    }
    if let Some(p) = overlay.path {
        let pts: Vec<Point2> = p.waypoints.iter().map(|w| scene.canonical(w.1)).collect();
        polyline(&mut s, &pts, "#d62728", 1.5 * stroke);
        if let Some(&(_, c)) = p.waypoints.first() {
            let c = scene.canonical(c);
            let _ = writeln!(
                s,
                r##"<circle cx="{}" cy="{}" r="{}" fill="#d62728" fill-opacity="0.25"/>"##,
                c.x,
                -c.y,
                p.eps
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
