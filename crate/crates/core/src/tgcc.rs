//! Time-dependent control condition: first times at which geodesics enter a
//! moving ball, and grid certification over phase space.
//!
//! Hits are computed exactly. Along a straight segment and a linear piece of
//! the ball path the relative motion is linear, so entry is a quadratic root.
//! On the torus a single piece can last for 10⁷ time units; there the entry
//! is found by reducing to the first return of a circle rotation to an
//! interval, solved by a Euclid-like recursion in a handful of steps.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::catcher::CatcherPath;
use crate::error::{Error, Result};
use crate::flow::{trace, wrap_affine, RayState, Trajectory};
use crate::geometry::{Direction, Point2, Scene};

/// Smallest `k ≥ 0` with `frac(alpha + k·s) < len`, for `0 ≤ s < 1`.
fn rotation_first_return(alpha: f64, s: f64, len: f64) -> Option<f64> {
    rotation_rec(alpha, s, len, 0)
}

fn rotation_rec(alpha: f64, s: f64, len: f64, depth: u32) -> Option<f64> {
    if len >= 1.0 {
        return Some(0.0);
    }
    let a = alpha.rem_euclid(1.0);
    if a < len {
        return Some(0.0);
    }
    if s == 0.0 || depth > 64 {
        return None;
    }
    if s > 0.5 {
        // frac(a + k s) < len  ⟺  frac(len - a + k (1 - s)) < len, up to the
        // interval's end points
        return rotation_rec(len - a, 1.0 - s, len, depth + 1);
    }
    if len >= s {
        return Some(((1.0 - a) / s).ceil());
    }
    // the j-th wrap (j ≥ 1) lands inside iff frac((a - j)/s) < len/s
    let i = rotation_rec((a - 1.0) / s, (-1.0 / s).rem_euclid(1.0), len / s, depth + 1)?;
    let j = 1.0 + i;
    Some(((j - a) / s).ceil())
}

/// Entry parameter `τ ∈ [0, dur)` of the line `r + w τ` into the open disc of
/// radius `e` about the origin, if any.
fn disc_entry(r: Point2, w: Point2, e: f64, dur: f64) -> Option<f64> {
    let a = w.norm_sq();
    let c = r.norm_sq() - e * e;
    if c < 0.0 {
        return Some(0.0);
    }
    if a == 0.0 {
        return None;
    }
    let b = r.dot(w);
    if b >= 0.0 {
        return None;
    }
    // b² - a c written without cancellation
    let cr = r.cross(w);
    let disc = a * e * e - cr * cr;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let tau = if sq < -0.5 * b { (-b - sq) / a } else { c / (-b + sq) };
    (tau < dur).then_some(tau)
}

/// First `τ ∈ [0, dur)` with `r + w τ` within `e` of the integer lattice.
/// Requires `e < 1/(2√2)` so each column meets at most one disc.
fn lattice_entry(r: Point2, w: Point2, e: f64, dur: f64) -> Option<f64> {
    let near = |p: Point2| Point2::new(p.x.round(), p.y.round());
    if (r - near(r)).norm() < e {
        return Some(0.0);
    }
    if w.norm_sq() == 0.0 || !(dur > 0.0) {
        return None;
    }
    // work with |w.x| ≥ |w.y| and w.x > 0
    let swap = w.y.abs() > w.x.abs();
    let (mut r, mut w) = if swap {
        (Point2::new(r.y, r.x), Point2::new(w.y, w.x))
    } else {
        (r, w)
    };
    if w.x < 0.0 {
        r.x = -r.x;
        w.x = -w.x;
    }
    let slope = w.y / w.x;
    let speed = w.norm();
    // entry into the disc of column n, solved from one unit of length before
    // the crossing so the numbers stay small
    let hit_at = |n: f64| -> Option<f64> {
        let tn = (n - r.x) / w.x;
        let y = r.y + (n - r.x) * slope;
        let m = y.round();
        let ts = (tn - 1.0 / speed).max(0.0);
        let rel = Point2::new(0.0, y - m) - w * (tn - ts);
        disc_entry(rel, w, e, dur - ts).map(|t| ts + t)
    };
    // columns whose discs reach past the start are checked directly
    let n1 = (r.x - e).floor() + 1.0;
    for n in [n1, n1 + 1.0] {
        if let Some(t) = hit_at(n) {
            return Some(t);
        }
    }
    let delta = e * speed / w.x;
    let s = slope.rem_euclid(1.0);
    let mut n = n1 + 2.0;
    // rounding at the interval ends can make the lattice search and the
    // exact disc test disagree; skip such near-tangent columns
    for _ in 0..8 {
        if (n - r.x - e) / w.x >= dur {
            return None;
        }
        let alpha = r.y + (n - r.x) * slope + delta;
        let k = rotation_first_return(alpha, s, 2.0 * delta)?;
        n += k;
        if (n - r.x - e) / w.x >= dur {
            return None;
        }
        if let Some(t) = hit_at(n) {
            return Some(t);
        }
        n += 1.0;
    }
    None
}

/// First time in `(0, horizon)` at which the trajectory lies in the open ball
/// of `path`. The trajectory must start at time 0.
pub fn first_hit_on(tr: &Trajectory, path: &CatcherPath, horizon: f64) -> Option<f64> {
    let end = horizon.min(tr.horizon).min(path.end_time());
    if let Scene::Torus { side } = tr.scene {
        let d = tr.start.dir.vector();
        let t_start = tr.start.time;
        for (ta, tb, c, u) in path.pieces() {
            let (ta, tb) = (ta.max(t_start), tb.min(end));
            if tb <= ta {
                continue;
            }
            let dt = ta - t_start;
            let p = Point2::new(
                wrap_affine(tr.start.pos.x, dt, d.x, side),
                wrap_affine(tr.start.pos.y, dt, d.y, side),
            );
            let cta = c + u * (ta - path_piece_start(path, ta));
            let rel = (p - cta) * (1.0 / side);
            if let Some(tau) = lattice_entry(rel, (d - u) * (1.0 / side), path.eps / side, tb - ta) {
                return Some(ta + tau);
            }
        }
        return None;
    }
    let mut pieces = path.pieces().peekable();
    for seg in tr.segments() {
        let (s0, s1) = (seg.t0, seg.t1.min(end));
        if s1 <= s0 {
            break;
        }
        while let Some(&(ta, tb, c, u)) = pieces.peek() {
            if tb <= s0 {
                pieces.next();
                continue;
            }
            if ta >= s1 {
                break;
            }
            let lo = s0.max(ta);
            let hi = s1.min(tb);
            let rel = seg.at(lo) - (c + u * (lo - ta));
            if let Some(tau) = disc_entry(rel, seg.dir - u, path.eps, hi - lo) {
                return Some(lo + tau);
            }
            if tb <= s1 {
                pieces.next();
            } else {
                break;
            }
        }
    }
    None
}

/// Start time of the path piece containing `t`.
fn path_piece_start(path: &CatcherPath, t: f64) -> f64 {
    let k = path.waypoints.partition_point(|w| w.0 <= t);
    path.waypoints[k.saturating_sub(1)].0
}

/// First time in `(0, horizon)` at which the geodesic from `s` meets the
/// moving ball, or `None` if it never does. The result for times below both
/// horizons does not depend on the horizon.
pub fn first_hit_time(scene: &Scene, s: RayState, path: &CatcherPath, horizon: f64) -> Result<Option<f64>> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if horizon > path.end_time() {
        return Err(Error::OutOfRange {
            t: horizon,
            lo: 0.0,
            hi: path.end_time(),
        });
    }
    let s = RayState::new(s.pos, s.dir, 0.0);
    let tr = trace(scene, s, horizon, usize::MAX)?;
    Ok(first_hit_on(&tr, path, horizon))
}

/// Initial condition of one grid sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub pos: Point2,
    pub angle: f64,
    /// Supplied trajectory rather than a grid point.
    pub seeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TgccReport {
    pub scene: Scene,
    pub horizon: f64,
    /// Grid points per axis.
    pub n_pos: usize,
    pub n_ang: usize,
    pub samples: Vec<Sample>,
    pub first_hit_times: Vec<Option<f64>>,
    pub caught_fraction: f64,
    /// Largest first-hit time when every sample is caught.
    pub t0_estimate: Option<f64>,
    pub witnesses: Vec<Sample>,
    /// Sampling is evidence, not proof, of the control condition.
    pub note: &'static str,
}

/// Interior grid points: multiples of `side/n` on the torus, cell centers of
/// the bounding box elsewhere.
pub fn grid_positions(scene: &Scene, n: usize) -> Vec<Point2> {
    let (lo, hi) = scene.bounding_box();
    let size = hi - lo;
    let periodic = matches!(scene, Scene::Torus { .. });
    let off = if periodic { 0.0 } else { 0.5 };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let p = Point2::new(
                lo.x + size.x * ((i as f64 + off) / n as f64),
                lo.y + size.y * ((j as f64 + off) / n as f64),
            );
            if scene.contains(p) && !on_obstacle(scene, p) {
                out.push(p);
            }
        }
    }
    out
}

fn on_obstacle(scene: &Scene, p: Point2) -> bool {
    scene
        .as_obstacle()
        .is_some_and(|o| o.centers.iter().any(|c| p.distance(*c) <= o.r0))
}

/// First-hit times over an `n_pos² × n_ang` grid of initial conditions plus
/// the supplied `seeds`.
pub fn check_tgcc_seeded(
    scene: &Scene,
    path: &CatcherPath,
    horizon: f64,
    n_pos: usize,
    n_ang: usize,
    seeds: &[Trajectory],
) -> Result<TgccReport> {
    if n_pos == 0 || n_ang == 0 {
        return Err(Error::InvalidArgument("grid sizes must be at least 1".into()));
    }
    if !(horizon > 0.0) || horizon > path.end_time() {
        return Err(Error::OutOfRange {
            t: horizon,
            lo: 0.0,
            hi: path.end_time(),
        });
    }
    let mut samples: Vec<Sample> = grid_positions(scene, n_pos)
        .into_iter()
        .flat_map(|pos| {
            (0..n_ang).map(move |k| Sample {
                pos,
                angle: TAU * k as f64 / n_ang as f64,
                seeded: false,
            })
        })
        .collect();
    let grid_len = samples.len();
    samples.extend(seeds.iter().map(|tr| Sample {
        pos: tr.start.pos,
        angle: tr.start.dir.angle(),
        seeded: true,
    }));
    let first_hit_times: Vec<Option<f64>> = (0..samples.len())
        .into_par_iter()
        .map(|k| {
            if k < grid_len {
                let s = samples[k];
                let st = RayState::new(s.pos, Direction::from_angle(s.angle), 0.0);
                first_hit_time(scene, st, path, horizon)
            } else {
                let tr = &seeds[k - grid_len];
                if tr.horizon < horizon {
                    return Err(Error::OutOfRange {
                        t: horizon,
                        lo: tr.start.time,
                        hi: tr.horizon,
                    });
                }
                Ok(first_hit_on(tr, path, horizon))
            }
        })
        .collect::<Result<_>>()?;
    let caught = first_hit_times.iter().filter(|t| t.is_some()).count();
    let caught_fraction = caught as f64 / samples.len().max(1) as f64;
    let t0_estimate = (caught == samples.len() && caught > 0).then(|| {
        first_hit_times
            .iter()
            .map(|t| t.expect("all caught"))
            .fold(0.0, f64::max)
    });
    let witnesses = samples
        .iter()
        .zip(&first_hit_times)
        .filter(|(_, t)| t.is_none())
        .map(|(s, _)| *s)
        .collect();
    Ok(TgccReport {
        scene: *scene,
        horizon,
        n_pos,
        n_ang,
        samples,
        first_hit_times,
        caught_fraction,
        t0_estimate,
        witnesses,
        note: "a full catch on a finite grid is evidence for the control condition, not a proof",
    })
}

/// [`check_tgcc_seeded`] without extra trajectories.
pub fn check_tgcc(scene: &Scene, path: &CatcherPath, horizon: f64, n_pos: usize, n_ang: usize) -> Result<TgccReport> {
    check_tgcc_seeded(scene, path, horizon, n_pos, n_ang, &[])
}
