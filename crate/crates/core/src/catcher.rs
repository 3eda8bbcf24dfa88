//! Moving-ball catchers: the dense-site parking schedule for recurrent
//! scenes, and piecewise-linear ball paths in general.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wrap_centered, Point2, Scene};

/// Parking time at site 1 before the dwell rule engages.
pub const T_INIT: f64 = 1.0;

/// Deepest dyadic level searched by [`dense_sites`].
const MAX_LEVEL: u32 = 24;

/// Timestamped center path of a moving open ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatcherPath {
    /// `(time, center)`, times strictly increasing from 0. On the torus the
    /// centers are unwrapped so consecutive waypoints differ by the shortest
    /// displacement.
    pub waypoints: Vec<(f64, Point2)>,
    pub eps: f64,
    pub v: f64,
}

/// One parking step of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// 1-based step number `j`.
    pub ordinal: u32,
    /// 1-based index into the site list.
    pub site: usize,
    pub arrival: f64,
    pub departure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    pub sites: Vec<Point2>,
    pub steps: Vec<Step>,
    pub v: f64,
    pub horizon: f64,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

fn interior(scene: &Scene, p: Point2) -> bool {
    match *scene {
        Scene::Torus { .. } => true,
        Scene::Rectangle { width, height } => p.x > 0.0 && p.x < width && p.y > 0.0 && p.y < height,
        Scene::Disk { radius } => p.norm() < radius,
        Scene::Obstacle(o) => {
            p.norm() < o.outer_radius && o.centers.iter().all(|c| p.distance(*c) > o.r0)
        }
    }
}

/// The first `count` points of the dyadic enumeration of the domain: level
/// `ℓ` lists the grid of spacing `2^-ℓ` times the bounding box, first
/// coordinate major, skipping points of coarser levels and points outside
/// the open domain.
pub fn dense_sites(scene: &Scene, count: usize) -> Result<Vec<Point2>> {
    if count == 0 {
        return Err(Error::InvalidArgument("site count must be at least 1".into()));
    }
    let (lo, hi) = scene.bounding_box();
    let size = hi - lo;
    let periodic = matches!(scene, Scene::Torus { .. });
    let mut out = Vec::with_capacity(count);
    for level in 0..=MAX_LEVEL {
        let n = 1u64 << level;
        // the torus grid excludes the far edge, which is identified with 0
        let last = if periodic { n - 1 } else { n };
        for i in 0..=last {
            for j in 0..=last {
                if level > 0 && i % 2 == 0 && j % 2 == 0 {
                    continue;
                }
                let p = Point2::new(
                    lo.x + size.x * (i as f64 / n as f64),
                    lo.y + size.y * (j as f64 / n as f64),
                );
                if interior(scene, p) {
                    out.push(p);
                    if out.len() == count {
                        return Ok(out);
                    }
                }
            }
        }
    }
    Err(Error::InvalidArgument(format!("domain too thin for {count} dyadic sites")))
}

/// Site visited at each step: `1, 2; 1..4; 1..8; …`, with each round capped
/// at the number of sites available.
fn site_order(n_sites: usize) -> impl Iterator<Item = usize> {
    (1u32..).flat_map(move |round| {
        let len = if round >= 63 { n_sites } else { (1usize << round).min(n_sites) };
        1..=len
    })
}

/// Shortest displacement, ties broken towards the positive direction.
fn transit(scene: &Scene, a: Point2, b: Point2) -> Point2 {
    match *scene {
        Scene::Torus { side } => {
            let f = |d: f64| {
                let w = wrap_centered(d, side);
                if w == -side / 2.0 {
                    side / 2.0
                } else {
                    w
                }
            };
            Point2::new(f(b.x - a.x), f(b.y - a.y))
        }
        _ => b - a,
    }
}

/// Earliest time `≥ t0 + dist / v` whose gap to `t0`, as rounded, keeps the
/// speed at most `v`.
fn arrival_after(t0: f64, dist: f64, v: f64) -> f64 {
    let mut t = t0 + dist / v;
    while dist / (t - t0) > v {
        t = t.next_up();
    }
    t
}

/// Parking schedule over the first `sites` dyadic sites of `scene`, truncated
/// at `horizon`.
pub fn synthesize_schedule(sites: usize, v: f64, scene: &Scene, horizon: f64) -> Result<StepSchedule> {
    check_positive("v", v)?;
    check_positive("horizon", horizon)?;
    let pts = dense_sites(scene, sites)?;
    let mut steps = Vec::new();
    let mut arrival = T_INIT;
    let mut pos = pts[0];
    let mut order = site_order(pts.len());
    let mut ordinal = 0u32;
    let mut site = order.next().expect("non-empty order");
    loop {
        ordinal += 1;
        if arrival >= horizon {
            break;
        }
        let dwell = arrival * 2f64.powi(ordinal as i32);
        let departure = (arrival + dwell).min(horizon);
        steps.push(Step {
            ordinal,
            site,
            arrival,
            departure,
        });
        if departure >= horizon {
            break;
        }
        let next = order.next().expect("endless order");
        let d = transit(scene, pos, pts[next - 1]);
        pos += d;
        arrival = arrival_after(departure, d.norm(), v);
        site = next;
    }
    if steps.len() < 2 {
        let needed = steps
            .first()
            .map_or(T_INIT, |s| arrival.max(s.departure));
        return Err(Error::HorizonTooShort { horizon, needed });
    }
    Ok(StepSchedule {
        sites: pts,
        steps,
        v,
        horizon,
    })
}

impl StepSchedule {
    /// Total time spent parked (including the initial parking) over the
    /// horizon, as a fraction.
    pub fn parked_fraction(&self) -> f64 {
        let parked: f64 = T_INIT.min(self.horizon)
            + self.steps.iter().map(|s| s.departure - s.arrival).sum::<f64>();
        parked / self.horizon
    }

    /// A window `[T', T'']` with `T < T'`, `(T'' − T')/T'' > k` and the ball
    /// parked at `site` throughout, if the truncated schedule has one.
    pub fn parking_window(&self, site: usize, k: f64, t: f64) -> Option<(f64, f64)> {
        self.steps.iter().filter(|s| s.site == site).find_map(|s| {
            let t1 = s.arrival.max(t.next_up());
            let t2 = s.departure;
            (t2 > t1 && (t2 - t1) / t2 > k).then_some((t1, t2))
        })
    }

    /// Center path realizing the schedule with straight transits at speed `v`.
    pub fn to_path(&self, scene: &Scene, eps: f64) -> Result<CatcherPath> {
        check_positive("eps", eps)?;
        let mut wp = vec![(0.0, self.sites[0])];
        let mut pos = self.sites[0];
        for (k, s) in self.steps.iter().enumerate() {
            if k > 0 {
                let d = transit(scene, pos, self.sites[s.site - 1]);
                pos += d;
                wp.push((s.arrival, pos));
            }
            wp.push((s.departure, pos));
        }
        let last = *self.steps.last().expect("non-empty schedule");
        if last.departure < self.horizon {
            // cut inside the transit that follows
            let next = site_order(self.sites.len())
                .nth(last.ordinal as usize)
                .expect("endless order");
            let d = transit(scene, pos, self.sites[next - 1]);
            let frac = ((self.horizon - last.departure) * self.v / d.norm()).min(1.0);
            wp.push((self.horizon, pos + d * frac));
        }
        CatcherPath::new(wp, eps, self.v)
    }
}

/// Catcher path of the parking schedule over all dyadic sites reachable
/// before `horizon`.
pub fn build_catcher(scene: &Scene, eps: f64, v: f64, horizon: f64) -> Result<CatcherPath> {
    check_positive("eps", eps)?;
    check_positive("v", v)?;
    check_positive("horizon", horizon)?;
    if scene.as_obstacle().is_some() {
        return Err(Error::UnsupportedScene(
            "the parking catcher needs a recurrent scene (torus, rectangle or disk)".into(),
        ));
    }
    // the schedule never gets past a few dozen steps before overflowing any
    // sensible horizon, so 2^12 sites is more than enough
    let sched = synthesize_schedule(1 << 12, v, scene, horizon)?;
    sched.to_path(scene, eps)
}

impl CatcherPath {
    pub fn new(waypoints: Vec<(f64, Point2)>, eps: f64, v: f64) -> Result<Self> {
        check_positive("eps", eps)?;
        check_positive("v", v)?;
        let Some(&(t0, _)) = waypoints.first() else {
            return Err(Error::InvalidArgument("path needs at least one waypoint".into()));
        };
        if t0 != 0.0 {
            return Err(Error::InvalidArgument(format!("path must start at t = 0, got {t0}")));
        }
        for w in waypoints.windows(2) {
            let (ta, a) = w[0];
            let (tb, b) = w[1];
            if !(tb > ta) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "waypoint times must increase, got {ta} then {tb}"
                )));
            }
            if a.distance(b) / (tb - ta) > v + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "leg from t = {ta} to {tb} exceeds speed {v}"
                )));
            }
        }
        Ok(CatcherPath { waypoints, eps, v })
    }

    /// A ball parked at `center` on `[0, horizon]`.
    pub fn parked(center: Point2, eps: f64, v: f64, horizon: f64) -> Result<Self> {
        check_positive("horizon", horizon)?;
        CatcherPath::new(vec![(0.0, center), (horizon, center)], eps, v)
    }

    pub fn end_time(&self) -> f64 {
        self.waypoints.last().map_or(0.0, |w| w.0)
    }

    /// Center at time `t`, unwrapped on the torus.
    pub fn center(&self, t: f64) -> Result<Point2> {
        let end = self.end_time();
        if !(0.0..=end).contains(&t) {
            return Err(Error::OutOfRange { t, lo: 0.0, hi: end });
        }
        Ok(self.center_clamped(t))
    }

    /// Center at `t`, held at the end points outside the path's domain.
    pub fn center_clamped(&self, t: f64) -> Point2 {
        let wp = &self.waypoints;
        let k = wp.partition_point(|w| w.0 <= t);
        if k == 0 {
            return wp[0].1;
        }
        if k == wp.len() {
            return wp[k - 1].1;
        }
        let (ta, a) = wp[k - 1];
        let (tb, b) = wp[k];
        a.lerp(b, (t - ta) / (tb - ta))
    }

    /// Linear pieces `(t0, t1, center(t0), velocity)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, Point2, Point2)> + '_ {
        self.waypoints.windows(2).map(|w| {
            let (ta, a) = w[0];
            let (tb, b) = w[1];
            (ta, tb, a, (b - a) * (1.0 / (tb - ta)))
        })
    }

    /// Largest speed over all legs.
    pub fn max_speed(&self) -> f64 {
        self.pieces().map(|p| p.3.norm()).fold(0.0, f64::max)
    }
}

/// Whether `p` lies in the open ball of the path at time `t`.
pub fn ball_contains(path: &CatcherPath, t: f64, p: Point2, scene: &Scene) -> Result<bool> {
    let c = path.center(t)?;
    Ok(scene.distance(c, p) < path.eps)
}

/// A wandering ball: straight legs at speeds in `[v/2, v]` between random
/// points of the domain within `reach` of the origin, with random pauses.
pub fn random_path<R: Rng>(
    rng: &mut R,
    scene: &Scene,
    eps: f64,
    v: f64,
    horizon: f64,
    reach: f64,
) -> Result<CatcherPath> {
    check_positive("horizon", horizon)?;
    check_positive("reach", reach)?;
    let draw = |rng: &mut R| loop {
        let p = Point2::new(rng.gen_range(-reach..reach), rng.gen_range(-reach..reach));
        if p.norm() <= reach && interior(scene, p) {
            return p;
        }
    };
    let mut pos = draw(rng);
    let mut t = 0.0;
    let mut wp = vec![(0.0, pos)];
    while t < horizon {
        let pause = rng.gen_range(0.0..20.0);
        if pause > 0.0 {
            t += pause;
            wp.push((t, pos));
        }
        let target = draw(rng);
        let speed = rng.gen_range(0.5 * v..=v);
        let d = target.distance(pos);
        if d > 0.0 {
            t = arrival_after(t, d, speed);
            pos = target;
            wp.push((t, pos));
        }
    }
    CatcherPath::new(wp, eps, v)
}
