//! Long itineraries by the variational principle.
//!
//! Billiard orbits are critical points of total path length over the bounce
//! positions. With the start point and a final aim point fixed, the length
//! as a function of the bounce angles has a tridiagonal, diagonally dominant
//! Hessian, so Newton's method converges from a crude guess. The solution is
//! a pseudo-orbit whose reflection law holds to rounding at every bounce; by
//! hyperbolicity it is shadowed by a true orbit, which sidesteps the
//! exponential precision loss of shooting.

use std::f64::consts::PI;

use serde::Serialize;

use super::Itinerary;
use crate::error::{Error, Result};
use crate::flow::{first_collision, obstacle_coords, BounceEvent, RayState, Trajectory, Wall};
use crate::geometry::{Direction, ObstacleScene, Point2, Scene};

const MAX_NEWTON: usize = 60;
const GRAD_TOL: f64 = 1e-13;

/// Bounce points of a long itinerary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongOrbit {
    pub start: Point2,
    /// Point the ray heads for after the last bounce.
    pub aim: Point2,
    pub word: Itinerary,
    pub points: Vec<Point2>,
    /// Arrival time at each bounce.
    pub times: Vec<f64>,
    /// Largest deviation from the reflection law, `|e_out - R(e_in)|`.
    pub reflection_residual: f64,
}

fn unit(v: Point2) -> Point2 {
    v * (1.0 / v.norm())
}

struct Legs {
    len: Vec<f64>,
    dir: Vec<Point2>,
}

fn legs(start: Point2, aim: Point2, q: &[Point2]) -> Legs {
    let n = q.len();
    let mut len = Vec::with_capacity(n + 1);
    let mut dir = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let a = if k == 0 { start } else { q[k - 1] };
        let b = if k == n { aim } else { q[k] };
        let d = b - a;
        let l = d.norm();
        len.push(l);
        dir.push(d * (1.0 / l));
    }
    Legs { len, dir }
}

/// Solves the tridiagonal system with sub-diagonal `a`, diagonal `b`,
/// super-diagonal `c`. Returns `None` on a non-positive pivot.
fn thomas(a: &[f64], b: &[f64], c: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut piv = b[0];
    if !(piv > 0.0) {
        return None;
    }
    cp[0] = c[0] / piv;
    dp[0] = rhs[0] / piv;
    for i in 1..n {
        piv = b[i] - a[i] * cp[i - 1];
        if !(piv > 0.0) {
            return None;
        }
        cp[i] = if i + 1 < n { c[i] / piv } else { 0.0 };
        dp[i] = (rhs[i] - a[i] * dp[i - 1]) / piv;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Some(x)
}

/// `q'ᵀ (I - e eᵀ) p' / ℓ`.
fn transverse(qa: Point2, qb: Point2, e: Point2, l: f64) -> f64 {
    (qa.dot(qb) - e.dot(qa) * e.dot(qb)) / l
}

/// Orbit from `start` bouncing on the obstacles of `word` in order, leaving
/// the last bounce towards `aim`.
pub fn realize_long(scene: &Scene, start: Point2, word: &Itinerary, aim: Point2) -> Result<LongOrbit> {
    let o = *scene
        .as_obstacle()
        .ok_or_else(|| Error::UnsupportedScene("itineraries need the obstacle scene".into()))?;
    let w = word.symbols();
    let n = w.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty itinerary".into()));
    }
    let centers: Vec<Point2> = w.iter().map(|&j| o.center(j)).collect();
    // initial guess: bisect the directions to the neighbours
    let mut psi: Vec<f64> = (0..n)
        .map(|k| {
            let prev = if k == 0 { start } else { centers[k - 1] };
            let next = if k + 1 == n { aim } else { centers[k + 1] };
            let u = unit(prev - centers[k]) + unit(next - centers[k]);
            let u = if u.norm() < 1e-9 { unit(prev - centers[k]) } else { u };
            u.y.atan2(u.x)
        })
        .collect();
    let point = |psi: &[f64]| -> Vec<Point2> {
        psi.iter()
            .zip(&centers)
            .map(|(&a, &c)| c + Point2::new(a.cos(), a.sin()) * o.r0)
            .collect()
    };
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let q = point(&psi);
        let lg = legs(start, aim, &q);
        let mut grad = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        for k in 0..n {
            let (s, c) = psi[k].sin_cos();
            let dq = Point2::new(-s, c) * o.r0;
            let ddq = Point2::new(-c, -s) * o.r0;
            let (e_in, l_in) = (lg.dir[k], lg.len[k]);
            let (e_out, l_out) = (lg.dir[k + 1], lg.len[k + 1]);
            grad[k] = e_in.dot(dq) - e_out.dot(dq);
            diag[k] = transverse(dq, dq, e_in, l_in) + e_in.dot(ddq)
                + transverse(dq, dq, e_out, l_out)
                - e_out.dot(ddq);
            if k + 1 < n {
                let (s1, c1) = psi[k + 1].sin_cos();
                let dq1 = Point2::new(-s1, c1) * o.r0;
                off[k] = -transverse(dq, dq1, e_out, l_out);
            }
        }
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax < GRAD_TOL {
            converged = true;
            break;
        }
        let sub: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { off[i - 1] }).collect();
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let Some(step) = thomas(&sub, &diag, &off, &rhs) else {
            return Err(Error::RealizationFailure(format!(
                "length Hessian lost positivity for word {word}"
            )));
        };
        let smax = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let scale = if smax > 0.5 { 0.5 / smax } else { 1.0 };
        for (p, s) in psi.iter_mut().zip(&step) {
            *p += s * scale;
        }
    }
    if !converged {
        return Err(Error::RealizationFailure(format!(
            "Newton iteration did not converge for word of length {n}"
        )));
    }
    let points = point(&psi);
    let lg = legs(start, aim, &points);
    let mut residual = 0.0f64;
    for k in 0..n {
        let u = unit(points[k] - centers[k]);
        if lg.dir[k].dot(u) >= 0.0 || lg.dir[k + 1].dot(u) <= 0.0 {
            return Err(Error::RealizationFailure(format!(
                "bounce {k} of {word} is not a reflection off the facing side"
            )));
        }
        let refl = lg.dir[k] - u * (2.0 * lg.dir[k].dot(u));
        residual = residual.max(refl.distance(lg.dir[k + 1]));
    }
    // the first leg must not clip another obstacle
    let first = first_collision(
        scene,
        &RayState::new(start, Direction::from_vector(lg.dir[0]).expect("unit"), 0.0),
    )?;
    if first.wall != Wall::Obstacle(w[0]) || first.point.distance(points[0]) > 1e-9 {
        return Err(Error::RealizationFailure(format!(
            "first leg from {start} meets {} before obstacle {}",
            first.wall, w[0]
        )));
    }
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    for k in 0..n {
        t += lg.len[k];
        times.push(t);
    }
    Ok(LongOrbit {
        start,
        aim,
        word: word.clone(),
        points,
        times,
        reflection_residual: residual,
    })
}

impl LongOrbit {
    /// Geodesic following the bounces, continued by the exact flow after the
    /// last one until `horizon`.
    pub fn to_trajectory(&self, scene: &Scene, horizon: f64) -> Result<Trajectory> {
        let o: &ObstacleScene = scene
            .as_obstacle()
            .ok_or_else(|| Error::UnsupportedScene("itineraries need the obstacle scene".into()))?;
        let n = self.points.len();
        let dir_of = |a: Point2, b: Point2| Direction::from_vector(b - a).expect("distinct points");
        let mut events = Vec::with_capacity(n + 4);
        for k in 0..n {
            let from = if k == 0 { self.start } else { self.points[k - 1] };
            let to = if k + 1 == n { self.aim } else { self.points[k + 1] };
            let incoming = dir_of(from, self.points[k]);
            let outgoing = dir_of(self.points[k], to);
            let j = self.word.symbols()[k];
            events.push(BounceEvent {
                time: self.times[k],
                point: self.points[k],
                wall: Wall::Obstacle(j),
                incoming,
                outgoing,
                tangential: false,
                coords: Some(obstacle_coords(o, j, self.points[k], outgoing.vector())),
            });
        }
        let last = *events.last().expect("non-empty");
        if horizon > last.time {
            let tail = crate::flow::trace(
                scene,
                RayState::new(last.point, last.outgoing, last.time),
                horizon - last.time,
                usize::MAX,
            )?;
            events.extend(tail.events);
        }
        let start_dir = dir_of(self.start, self.points[0]);
        Ok(Trajectory {
            scene: *scene,
            start: RayState::new(self.start, start_dir, 0.0),
            events,
            horizon: horizon.max(last.time),
        })
    }

    /// Initial direction angle at the start point.
    pub fn start_angle(&self) -> f64 {
        let d = self.points[0] - self.start;
        let a = d.y.atan2(d.x);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }
}
