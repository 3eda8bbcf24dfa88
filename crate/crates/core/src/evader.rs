//! Geodesics escaping a slow moving ball in the three-disc domain.
//!
//! A geodesic bouncing between the two obstacles of zone `Z_a` stays inside
//! that stadium. The planner splits `[0, T]` into long intervals on each of
//! which some zone stays clear of the ball (with a three-unit pad either
//! side); the realizer then bounces inside the planned zones, pivoting on the
//! obstacle shared by consecutive zones, with bounce counts tuned so the
//! pivots land near the planned switch times.

use rayon::prelude::*;
use serde::Serialize;

use crate::catcher::CatcherPath;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::geometry::{ObstacleScene, Point2, Scene, ZoneSet};
use crate::symbolic::relax::{realize_long, LongOrbit};
use crate::symbolic::Itinerary;

/// Zones `a_j` in force from `times[j]` until the next switch (or `horizon`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZoneSchedule {
    pub times: Vec<f64>,
    pub zones: Vec<u8>,
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlannerOptions {
    /// Sampling step of the ball path.
    pub dt: f64,
    /// Extra clearance required beyond `eps`.
    pub margin: f64,
    /// A new zone must stay clear this long after a switch.
    pub lookahead: f64,
    pub min_gap: f64,
    /// Allowed drift of realized switches, and the padding of every window.
    pub pad: f64,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            dt: 0.05,
            margin: 0.01,
            lookahead: 20.0,
            min_gap: 10.0,
            pad: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvasionCertificate {
    pub schedule: ZoneSchedule,
    pub itinerary: Itinerary,
    pub start: Point2,
    pub start_angle: f64,
    /// `T'_j`: time 0, then the time of every pivot bounce.
    pub realized_switches: Vec<f64>,
    /// Certified lower bound on the distance to the ball center over `[0, T]`.
    pub min_distance: f64,
    /// `min_distance − eps`.
    pub margin: f64,
    pub reflection_residual: f64,
    #[serde(skip)]
    pub geodesic: Trajectory,
}

fn obstacle(scene: &Scene) -> Result<&ObstacleScene> {
    scene
        .as_obstacle()
        .ok_or_else(|| Error::UnsupportedScene("zones exist only in the obstacle scene".into()))
}

/// Zones met by the ball at time `t` (held at the path's ends outside its
/// domain).
pub fn prohibited_zones(path: &CatcherPath, t: f64, scene: &Scene) -> ZoneSet {
    let Some(o) = scene.as_obstacle() else {
        return ZoneSet::EMPTY;
    };
    let c = path.center_clamped(t);
    (1..=3u8)
        .filter(|&a| o.distance_to_zone(c, a) < path.eps)
        .collect()
}

/// Clearance table: `free[a-1][i]` for sample times `t_i = (i - i0)·dt`.
struct Clearance {
    /// Index of time 0.
    i0: usize,
    dt: f64,
    free: [Vec<bool>; 3],
}

impl Clearance {
    fn new(path: &CatcherPath, scene: &Scene, t_end: f64, opts: &PlannerOptions) -> Result<Self> {
        let o = obstacle(scene)?;
        let i0 = (opts.pad / opts.dt).ceil() as usize;
        let t0 = -(i0 as f64) * opts.dt;
        let n = ((t_end - t0) / opts.dt).ceil() as usize + 1;
        // between samples the center moves at most v·dt/2 from the nearer one
        let need = path.eps + opts.margin + path.v * opts.dt / 2.0;
        let mut free: [Vec<bool>; 3] = Default::default();
        for i in 0..n {
            let c = path.center_clamped(t0 + i as f64 * opts.dt);
            for a in 1..=3u8 {
                free[usize::from(a - 1)].push(o.distance_to_zone(c, a) >= need);
            }
        }
        Ok(Clearance { i0, dt: opts.dt, free })
    }

    fn index(&self, t: f64) -> usize {
        ((t / self.dt).round() + self.i0 as f64).max(0.0).min((self.free[0].len() - 1) as f64) as usize
    }

    fn time(&self, i: usize) -> f64 {
        (i as f64 - self.i0 as f64) * self.dt
    }

    fn clear(&self, a: u8, lo: usize, hi: usize) -> bool {
        self.free[usize::from(a - 1)][lo..=hi].iter().all(|&f| f)
    }

    fn first_blocked(&self, a: u8, lo: usize, hi: usize) -> Option<usize> {
        (lo..=hi).find(|&i| !self.free[usize::from(a - 1)][i])
    }
}

/// Admissible zone for a switch at sample `i`, by preference: the zone named
/// after the obstacle nearest the ball at the end of the lookahead, then the
/// lowest index.
fn pick_zone(
    cl: &Clearance,
    o: &ObstacleScene,
    path: &CatcherPath,
    i: usize,
    exclude: Option<u8>,
    opts: &PlannerOptions,
    last: usize,
) -> Option<u8> {
    let lo = cl.index(cl.time(i) - opts.pad);
    let hi = cl.index(cl.time(i) + opts.lookahead).min(last);
    let ok = |b: u8| Some(b) != exclude && cl.clear(b, lo, hi);
    let forecast = path.center_clamped(cl.time(hi));
    let preferred = o.nearest_obstacle(forecast);
    if ok(preferred) {
        return Some(preferred);
    }
    (1..=3u8).find(|&b| ok(b))
}

/// Greedy zone schedule for `[0, horizon]` with default options.
pub fn plan_schedule(path: &CatcherPath, horizon: f64, scene: &Scene) -> Result<ZoneSchedule> {
    plan_schedule_with(path, horizon, scene, &PlannerOptions::default())
}

/// Sweeps forward keeping the current zone until the ball is about to come
/// within reach of it, then switches as late as the padding allows to a zone
/// clear for the lookahead.
pub fn plan_schedule_with(
    path: &CatcherPath,
    horizon: f64,
    scene: &Scene,
    opts: &PlannerOptions,
) -> Result<ZoneSchedule> {
    let o = obstacle(scene)?;
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    let cl = Clearance::new(path, scene, horizon + opts.pad + opts.lookahead, opts)?;
    let last = cl.index(horizon + opts.pad);
    let gap = (opts.min_gap / opts.dt).round() as usize;
    let pad = (opts.pad / opts.dt).round() as usize;
    let mut i_switch = cl.index(0.0);
    let mut zone = pick_zone(&cl, o, path, i_switch, None, opts, last).ok_or_else(|| {
        Error::PlanningFailure {
            t: 0.0,
            reason: "no zone is clear of the ball at the start".into(),
        }
    })?;
    let mut times = vec![0.0];
    let mut zones = vec![zone];
    while let Some(bad) = cl.first_blocked(zone, i_switch - pad, last) {
        let t_bad = cl.time(bad);
        // the window of the current zone must end `pad` before the blockage
        let latest = bad.checked_sub(pad + 1).filter(|&i| i >= i_switch + gap).ok_or_else(|| {
            Error::PlanningFailure {
                t: t_bad,
                reason: format!("zone {zone} is blocked less than {} after the last switch", opts.min_gap),
            }
        })?;
        let found = (i_switch + gap..=latest)
            .rev()
            .find_map(|i| pick_zone(&cl, o, path, i, Some(zone), opts, last).map(|b| (i, b)));
        let Some((i, b)) = found else {
            return Err(Error::PlanningFailure {
                t: t_bad,
                reason: format!("no zone other than {zone} stays clear for the lookahead"),
            });
        };
        times.push(cl.time(i));
        zones.push(b);
        i_switch = i;
        zone = b;
    }
    Ok(ZoneSchedule { times, zones, horizon })
}

/// Checks the schedule invariants against the path on a grid of step `dt`
/// with the Lipschitz allowance `v·dt/2`.
pub fn validate_schedule(s: &ZoneSchedule, path: &CatcherPath, scene: &Scene, pad: f64, min_gap: f64) -> Result<()> {
    let o = obstacle(scene)?;
    let bad = |msg: String| Err(Error::PlanningFailure { t: 0.0, reason: msg });
    if s.times.len() != s.zones.len() || s.times.first() != Some(&0.0) {
        return bad("schedule must start at time 0 with one zone per time".into());
    }
    let dt = 0.01;
    for j in 0..s.times.len() {
        let end = s.times.get(j + 1).copied().unwrap_or(s.horizon);
        if j + 1 < s.times.len() {
            if s.times[j + 1] - s.times[j] < min_gap - 1e-9 {
                return bad(format!("switch {j} gap below {min_gap}"));
            }
            if s.zones[j] == s.zones[j + 1] {
                return bad(format!("repeated zone at switch {}", j + 1));
            }
            if s.times[j + 1] >= s.horizon {
                return bad("switch at or after the horizon".into());
            }
        }
        let (lo, hi) = (s.times[j] - pad, end + pad);
        let n = ((hi - lo) / dt).ceil() as usize;
        for k in 0..=n {
            let t = (lo + k as f64 * dt).min(hi);
            let c = path.center_clamped(t);
            if o.distance_to_zone(c, s.zones[j]) < path.eps + path.v * dt / 2.0 {
                return bad(format!("ball meets zone {} at t = {t}", s.zones[j]));
            }
        }
    }
    Ok(())
}

/// Obstacle shared by zones `a` and `b`.
fn pivot(a: u8, b: u8) -> u8 {
    6 - a - b
}

fn other(zone: u8, j: u8) -> u8 {
    let (p, q) = ObstacleScene::zone_circles(zone);
    if p == j {
        q
    } else {
        p
    }
}

/// Alternating run inside `zone` of `m` bounces ending on `last`.
fn run(zone: u8, m: usize, last: u8) -> impl Iterator<Item = u8> {
    let o = other(zone, last);
    (0..m).map(move |k| if (m - 1 - k).is_multiple_of(2) { last } else { o })
}

/// Nearest count to `target` that is at least `min` with the given parity.
fn count_with_parity(target: f64, odd: bool, min: usize) -> usize {
    let mut m = target.round().max(min as f64) as usize;
    if (m % 2 == 1) != odd {
        m = if (m as f64) < target || m <= min { m + 1 } else { m - 1 };
    }
    m.max(min)
}

/// Realization of a zone schedule: the geodesic and its pivot times.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub itinerary: Itinerary,
    pub orbit: LongOrbit,
    pub geodesic: Trajectory,
    pub realized_switches: Vec<f64>,
}

/// Builds the zone-block itinerary and realizes it. Each block's bounce count
/// is chosen from the realized time of the previous pivot.
pub fn realize_schedule(s: &ZoneSchedule, scene: &Scene) -> Result<Realization> {
    let o = *obstacle(scene)?;
    let n = s.zones.len();
    let (p0, q0) = o.zone_segment(s.zones[0]);
    let start = p0.lerp(q0, 0.5);
    let mut word: Vec<u8> = Vec::new();
    let mut pivot_idx: Vec<usize> = Vec::new();
    let mut realized = vec![0.0];
    let realize = |w: &[u8], aim_zone: u8| -> Result<LongOrbit> {
        let last = *w.last().expect("non-empty");
        let it = Itinerary::new(w.to_vec())?;
        realize_long(scene, start, &it, o.center(other(aim_zone, last)))
    };
    for j in 0..n {
        let zone = s.zones[j];
        let t_now = realized[j];
        let is_last = j + 1 == n;
        let (end, target) = if is_last {
            // bounce on until past the horizon
            let (p, _) = ObstacleScene::zone_circles(zone);
            let last = word.last().map_or(p, |&l| other(zone, l));
            (last, s.horizon - t_now + 2.0)
        } else {
            (pivot(zone, s.zones[j + 1]), s.times[j + 1] - t_now)
        };
        // first block: the leg from the start is about half a gap
        let (odd, min, target) = match word.last() {
            None => (true, 1, target + 0.5),
            Some(&prev) => (end != prev, if end == prev { 2 } else { 1 }, target),
        };
        let odd_free = word.is_empty();
        let mut m = if odd_free {
            target.round().max(1.0) as usize
        } else {
            count_with_parity(target, odd, min)
        };
        let base = word.len();
        let mut attempt = 0;
        loop {
            word.truncate(base);
            word.extend(run(zone, m, end));
            if is_last {
                break;
            }
            let orbit = realize(&word, s.zones[j + 1])?;
            let t = orbit.times[word.len() - 1];
            let err = t - s.times[j + 1];
            attempt += 1;
            if err.abs() <= 2.0 || attempt > 4 {
                realized.push(t);
                break;
            }
            let step = if odd_free { 1 } else { 2 };
            m = if err > 0.0 { m.saturating_sub(step).max(min) } else { m + step };
        }
        if !is_last {
            pivot_idx.push(word.len() - 1);
        }
    }
    let last_zone = *s.zones.last().expect("non-empty schedule");
    let orbit = realize(&word, last_zone)?;
    let realized_switches: Vec<f64> = std::iter::once(0.0)
        .chain(pivot_idx.iter().map(|&k| orbit.times[k]))
        .collect();
    for (j, (&t, &want)) in realized_switches.iter().zip(&s.times).enumerate() {
        if (t - want).abs() > 3.0 {
            return Err(Error::RealizationFailure(format!(
                "switch {j} realized at {t}, planned {want}"
            )));
        }
    }
    if orbit.times[word.len() - 1] < s.horizon {
        return Err(Error::RealizationFailure("itinerary ends before the horizon".into()));
    }
    let geodesic = orbit.to_trajectory(scene, s.horizon)?;
    Ok(Realization {
        itinerary: orbit.word.clone(),
        orbit,
        geodesic,
        realized_switches,
    })
}

/// Certified lower bound on `|y(t) − x(t)|` over `[0, horizon]` from samples
/// of step `delta`: between samples the distance changes by at most
/// `(1 + v)·delta/2`.
pub fn certified_min_distance(tr: &Trajectory, path: &CatcherPath, horizon: f64, delta: f64) -> Result<f64> {
    let n = (horizon / delta).ceil() as usize;
    let min = (0..=n)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let t = (k as f64 * delta).min(horizon);
            let y = tr.position_at(t)?;
            Ok(tr.scene.distance(y, path.center_clamped(t)))
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;
    Ok(min - (1.0 + path.v) * delta / 2.0)
}

/// Grid step used for certification.
pub const VERIFY_STEP: f64 = 1e-3;

/// Whether the certified distance stays at least `eps` over `[0, horizon]`.
pub fn verify_evasion(cert: &EvasionCertificate, path: &CatcherPath, horizon: f64) -> bool {
    certified_min_distance(&cert.geodesic, path, horizon, VERIFY_STEP)
        .is_ok_and(|d| d >= path.eps)
}

/// Plans, realizes and certifies an escape from `path` over `[0, horizon]`.
pub fn evade(path: &CatcherPath, horizon: f64, scene: &Scene) -> Result<EvasionCertificate> {
    let schedule = plan_schedule(path, horizon, scene)?;
    let r = realize_schedule(&schedule, scene)?;
    let min_distance = certified_min_distance(&r.geodesic, path, horizon, VERIFY_STEP)?;
    Ok(EvasionCertificate {
        itinerary: r.itinerary,
        start: r.orbit.start,
        start_angle: r.orbit.start_angle(),
        realized_switches: r.realized_switches,
        min_distance,
        margin: min_distance - path.eps,
        reflection_residual: r.orbit.reflection_residual,
        geodesic: r.geodesic,
        schedule,
    })
}
