//! Recurrence and equidistribution diagnostics: exact occupancy of balls,
//! periodic-or-equidistributed classification, disk chord structure, and a
//! finite-sample search for a recurrent ball.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{trace, wrap_affine, RayState, Segment, Trajectory};
use crate::geometry::{normalize_angle, Direction, Point2, Scene};

/// Denominators above this are treated as irrational.
pub const MAX_DENOMINATOR: i64 = 1000;
/// Relative tolerance of rational detection.
pub const RATIONAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancySeries {
    pub center: Point2,
    pub radius: f64,
    pub horizons: Vec<f64>,
    /// Time in the ball up to each horizon, divided by the horizon.
    pub fractions: Vec<f64>,
}

/// Time `t ∈ [t0, t1]` the segment spends in the open disc.
fn chord_time(seg: &Segment, t1: f64, center: Point2, radius: f64) -> f64 {
    let r = seg.start - center;
    let w = seg.dir;
    let a = w.norm_sq();
    let b = r.dot(w);
    let cr = r.cross(w);
    let disc = a * radius * radius - cr * cr;
    if disc <= 0.0 || a == 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let lo = (-b - sq) / a;
    let hi = (-b + sq) / a;
    let s0 = lo.max(0.0);
    let s1 = hi.min(t1 - seg.t0);
    (s1 - s0).max(0.0)
}

/// Straight pieces of the trajectory up to `horizon`. On the torus the single
/// straight line is cut into pieces of length at most the side, each started
/// from its canonical position.
fn pieces(tr: &Trajectory, horizon: f64) -> Vec<Segment> {
    match tr.scene {
        Scene::Torus { side } => {
            let d = tr.start.dir.vector();
            let t_start = tr.start.time;
            let n = ((horizon - t_start) / side).ceil().max(0.0) as usize;
            (0..n)
                .map(|k| {
                    let dt = k as f64 * side;
                    let t0 = t_start + dt;
                    Segment {
                        t0,
                        t1: (t0 + side).min(horizon),
                        start: Point2::new(
                            wrap_affine(tr.start.pos.x, dt, d.x, side),
                            wrap_affine(tr.start.pos.y, dt, d.y, side),
                        ),
                        dir: d,
                    }
                })
                .collect()
        }
        _ => tr
            .segments()
            .take_while(|s| s.t0 < horizon)
            .map(|s| Segment {
                t1: s.t1.min(horizon),
                ..s
            })
            .collect(),
    }
}

/// Exact time spent in `B(center, radius)` up to `horizon`.
fn time_in_ball(tr: &Trajectory, center: Point2, radius: f64, horizon: f64) -> f64 {
    let segs = pieces(tr, horizon);
    match tr.scene {
        Scene::Torus { side } => {
            let c = tr.scene.canonical(center);
            // a piece of length ≤ side from the fundamental square stays in [-side, 2 side]²
            let copies: Vec<Point2> = (-1..=2)
                .flat_map(|i| (-1..=2).map(move |j| c + Point2::new(i as f64 * side, j as f64 * side)))
                .collect();
            segs.iter()
                .map(|s| copies.iter().map(|&cc| chord_time(s, s.t1, cc, radius)).sum::<f64>())
                .sum()
        }
        _ => segs.iter().map(|s| chord_time(s, s.t1, center, radius)).sum(),
    }
}

/// Occupancy fractions of the ball at each horizon.
pub fn occupancy(tr: &Trajectory, center: Point2, radius: f64, horizons: &[f64]) -> Result<OccupancySeries> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if let Scene::Torus { side } = tr.scene {
        if radius >= side / 2.0 {
            return Err(Error::InvalidArgument("ball must be smaller than half the torus".into()));
        }
    }
    for &h in horizons {
        if !(h > tr.start.time) || h > tr.horizon {
            return Err(Error::OutOfRange {
                t: h,
                lo: tr.start.time,
                hi: tr.horizon,
            });
        }
    }
    let fractions = horizons
        .par_iter()
        .map(|&h| time_in_ball(tr, center, radius, h) / (h - tr.start.time))
        .collect();
    Ok(OccupancySeries {
        center,
        radius,
        horizons: horizons.to_vec(),
        fractions,
    })
}

/// Best rational approximation `p/q` (with `q > 0`) of `x` within relative
/// tolerance, by continued fractions.
pub fn rational_approx(x: f64, tol: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        if (x - h as f64 / k as f64).abs() <= tol * x.abs().max(1.0) {
            return Some((h, k));
        }
        let f = y - a as f64;
        if f == 0.0 {
            return None;
        }
        y = 1.0 / f;
    }
    None
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Dichotomy {
    Periodic {
        period: f64,
    },
    Equidistributed {
        fraction: f64,
        expected: f64,
        deviation: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub scene: Scene,
    pub direction: Direction,
    pub center: Point2,
    pub radius: f64,
    pub horizon: f64,
    #[serde(flatten)]
    pub result: Dichotomy,
}

/// Classifies the direction on a torus or rectangle: closed geodesic with its
/// period when the (unfolded) slope is rational, otherwise the occupancy of
/// `B(center, radius)` against its area fraction.
pub fn dichotomy_check(
    scene: &Scene,
    start: Point2,
    dir: Direction,
    center: Point2,
    radius: f64,
    horizon: f64,
) -> Result<DichotomyReport> {
    let d = dir.vector();
    // unfolded periods of the flow
    let (lx, ly) = match *scene {
        Scene::Torus { side } => (side, side),
        Scene::Rectangle { width, height } => (2.0 * width, 2.0 * height),
        _ => {
            return Err(Error::UnsupportedScene(
                "dichotomy check needs a torus or a rectangle".into(),
            ))
        }
    };
    // closes after m turns in x and n in y: d.y / d.x = (n ly) / (m lx)
    let rational = if d.x == 0.0 {
        Some((1, 0))
    } else if d.y == 0.0 {
        Some((0, 1))
    } else {
        rational_approx((d.y * lx / (d.x * ly)).abs(), RATIONAL_TOL, MAX_DENOMINATOR)
    };
    let result = match rational {
        Some((n, m)) => {
            let g = gcd(n, m).max(1);
            let (n, m) = (n / g, m / g);
            let period = ((m as f64 * lx).powi(2) + (n as f64 * ly).powi(2)).sqrt();
            Dichotomy::Periodic { period }
        }
        None => {
            let tr = trace(scene, RayState::new(start, dir, 0.0), horizon, usize::MAX)?;
            let fraction = time_in_ball(&tr, center, radius, horizon) / horizon;
            let expected = PI * radius * radius / scene.area();
            Dichotomy::Equidistributed {
                fraction,
                expected,
                deviation: (fraction - expected).abs(),
            }
        }
    };
    Ok(DichotomyReport {
        scene: *scene,
        direction: dir,
        center,
        radius,
        horizon,
        result,
    })
}

/// Star discrepancy of points in `[0, 1)`.
pub fn star_discrepancy(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiskReport {
    pub alpha: f64,
    pub theta0: f64,
    /// Boundary angles `θ_k = θ0 + 2αk mod 2π` of the unit disk.
    pub angles: Vec<f64>,
    /// `cos α`: every chord is tangent to this circle.
    pub inner_radius: f64,
    /// Largest `| |chord midpoint| − cos α |` over the chords.
    pub chord_deviation: f64,
    /// Star discrepancy of `(θ_k mod π)/π`.
    pub discrepancy: f64,
    pub periodic: bool,
    /// Number of distinct bounce points when periodic.
    pub period: Option<u64>,
}

/// Chord structure of the unit-disk billiard whose chords make the angle
/// `alpha` with the boundary tangent, so each subtends `2α`.
pub fn disk_structure(alpha: f64, theta0: f64, n: usize) -> Result<DiskReport> {
    if !(alpha > 0.0 && alpha < PI / 2.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, π/2), got {alpha}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one bounce".into()));
    }
    let angles: Vec<f64> = (0..n)
        .map(|k| normalize_angle(theta0 + 2.0 * alpha * k as f64))
        .collect();
    let inner_radius = alpha.cos();
    let chord_deviation = angles
        .windows(2)
        .map(|w| {
            let a = Point2::new(w[0].cos(), w[0].sin());
            let b = Point2::new(w[1].cos(), w[1].sin());
            (a.lerp(b, 0.5).norm() - inner_radius).abs()
        })
        .fold(0.0, f64::max);
    let folded: Vec<f64> = angles.iter().map(|t| t.rem_euclid(PI) / PI).collect();
    let ratio = rational_approx(alpha / PI, RATIONAL_TOL, MAX_DENOMINATOR);
    Ok(DiskReport {
        alpha,
        theta0,
        inner_radius,
        chord_deviation,
        discrepancy: star_discrepancy(&folded),
        periodic: ratio.is_some(),
        period: ratio.map(|(_, q)| q as u64),
        angles,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsequenceReport {
    pub eps: f64,
    /// Integer sample times `1..=n` of the empirical measure.
    pub samples: usize,
    /// Center of the heaviest radius-`ε/4` ball on the candidate grid.
    pub center: Point2,
    pub mass: f64,
    pub occupancy: OccupancySeries,
    /// Smallest fraction over the tested horizons.
    pub min_fraction: f64,
    pub positive: bool,
}

/// Finite-sample stand-in for a recurrent ball: the radius-`ε/4` ball on an
/// `ε/4` grid carrying the most mass of `(1/n) Σ δ_{y(i)}`, then the
/// occupancy of the concentric radius-`ε` ball along `horizons`.
pub fn subsequence_grc(tr: &Trajectory, eps: f64, horizons: &[f64]) -> Result<SubsequenceReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let h_max = horizons.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if horizons.is_empty() || h_max > tr.horizon {
        return Err(Error::OutOfRange {
            t: h_max,
            lo: tr.start.time,
            hi: tr.horizon,
        });
    }
    let n = (h_max - tr.start.time).floor() as usize;
    if n == 0 {
        return Err(Error::InvalidArgument("horizon shorter than one time unit".into()));
    }
    let pts: Vec<Point2> = (1..=n)
        .map(|i| tr.position_at(tr.start.time + i as f64))
        .collect::<Result<_>>()?;
    let (lo, hi) = tr.scene.bounding_box();
    let step = eps / 4.0;
    let nx = ((hi.x - lo.x) / step).ceil() as usize;
    let ny = ((hi.y - lo.y) / step).ceil() as usize;
    let scene = tr.scene;
    let (best, count) = (0..nx * ny)
        .into_par_iter()
        .filter_map(|k| {
            let c = Point2::new(lo.x + (k / ny) as f64 * step, lo.y + (k % ny) as f64 * step);
            scene.contains(c).then(|| {
                let m = pts.iter().filter(|p| scene.distance(**p, c) < step).count();
                (k, m)
            })
        })
        .reduce(
            || (usize::MAX, 0),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    if best == usize::MAX {
        return Err(Error::InvalidArgument("no candidate ball inside the domain".into()));
    }
    let center = Point2::new(lo.x + (best / ny) as f64 * step, lo.y + (best % ny) as f64 * step);
    let occ = occupancy(tr, center, eps, horizons)?;
    let min_fraction = occ.fractions.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(SubsequenceReport {
        eps,
        samples: n,
        center,
        mass: count as f64 / n as f64,
        positive: min_fraction > 0.0,
        min_fraction,
        occupancy: occ,
    })
}

/// Traced bounce angles of the unit-disk billiard started at the midpoint of
/// the chord from `theta0` to `theta0 + 2α`, for cross-checking
/// [`disk_structure`].
pub fn traced_disk_angles(alpha: f64, theta0: f64, n: usize) -> Result<Vec<f64>> {
    let scene = Scene::disk(1.0)?;
    let mid = theta0 + alpha;
    let start = Point2::new(mid.cos(), mid.sin()) * alpha.cos();
    let dir = Direction::from_angle(normalize_angle(mid + PI / 2.0));
    let tr = trace(&scene, RayState::new(start, dir, 0.0), f64::INFINITY, n)?;
    Ok(tr.events.iter().map(|e| e.point.y.atan2(e.point.x).rem_euclid(TAU)).collect())
}
