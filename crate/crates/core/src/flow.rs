//! Event-driven billiard and geodesic propagation with closed-form collision
//! solving.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, wrap, Direction, ObstacleScene, Point2, Scene};

/// `|incoming · n|` below this marks a tangential hit.
pub const TANGENCY_TOL: f64 = 1e-9;
/// Collisions closer than this to the current position are ignored.
pub const MIN_FLIGHT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayState {
    pub pos: Point2,
    pub dir: Direction,
    pub time: f64,
}

impl RayState {
    pub fn new(pos: Point2, dir: Direction, time: f64) -> Self {
        RayState { pos, dir, time }
    }

    pub fn at_angle(pos: Point2, angle: f64) -> Self {
        RayState::new(pos, Direction::from_angle(angle), 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RectSide {
    Left,
    Right,
    Bottom,
    Top,
    /// Simultaneous hit on a vertical and a horizontal side.
    Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    /// Obstacle circle `C^j`, `j ∈ {1, 2, 3}`.
    Obstacle(u8),
    /// Outer circular wall Γ.
    Outer,
    Rect(RectSide),
    DiskBoundary,
}

impl Wall {
    pub fn obstacle_index(self) -> Option<u8> {
        match self {
            Wall::Obstacle(j) => Some(j),
            _ => None,
        }
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wall::Obstacle(j) => write!(f, "C{j}"),
            Wall::Outer => write!(f, "outer"),
            Wall::Rect(RectSide::Left) => write!(f, "left"),
            Wall::Rect(RectSide::Right) => write!(f, "right"),
            Wall::Rect(RectSide::Bottom) => write!(f, "bottom"),
            Wall::Rect(RectSide::Top) => write!(f, "top"),
            Wall::Rect(RectSide::Corner) => write!(f, "corner"),
            Wall::DiskBoundary => write!(f, "disk"),
        }
    }
}

/// Boundary coordinates `(j, r, φ)` of an obstacle bounce.
///
/// `r` is the clockwise arclength from the marked point `q_j`, in
/// `[0, 2π r0)`. `φ` is the angle from the inner normal (pointing into the
/// domain, away from the obstacle center) to the outgoing velocity, measured
/// counterclockwise, in `[0, 2π)`. The incoming velocity sits at `π − φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilliardCoords {
    pub j: u8,
    pub r: f64,
    pub phi: f64,
}

impl BilliardCoords {
    /// Incidence angle `π − φ` (mod 2π), which lies in `[π/2, 3π/2]`.
    pub fn incidence_phi(&self) -> f64 {
        normalize_angle(PI - self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BounceEvent {
    pub time: f64,
    pub point: Point2,
    pub wall: Wall,
    pub incoming: Direction,
    /// Direction after the event (equal to `incoming` for tangential hits).
    pub outgoing: Direction,
    pub tangential: bool,
    /// Present for obstacle bounces.
    pub coords: Option<BilliardCoords>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub scene: Scene,
    pub start: RayState,
    pub events: Vec<BounceEvent>,
    /// Final time traced.
    pub horizon: f64,
}

/// A straight piece of a trajectory, `start + (t − t0)·dir` for `t ∈ [t0, t1]`.
/// On the torus the start is a canonical representative and the piece may
/// leave the fundamental square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub start: Point2,
    pub dir: Point2,
}

impl Segment {
    pub fn end(&self) -> Point2 {
        self.start + self.dir * (self.t1 - self.t0)
    }

    pub fn at(&self, t: f64) -> Point2 {
        self.start + self.dir * (t - self.t0)
    }
}

impl Trajectory {
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        let first = std::iter::once((self.start.time, self.start.pos, self.start.dir));
        let rest = self.events.iter().map(|e| (e.time, e.point, e.outgoing));
        let starts: Vec<_> = first.chain(rest).collect();
        let horizon = self.horizon;
        (0..starts.len()).filter_map(move |k| {
            let (t0, p, d) = starts[k];
            let t1 = starts.get(k + 1).map_or(horizon, |s| s.0);
            (t1 > t0).then_some(Segment {
                t0,
                t1,
                start: p,
                dir: d.vector(),
            })
        })
    }

    /// Obstacle bounces (tangential grazes excluded).
    pub fn obstacle_bounces(&self) -> impl Iterator<Item = &BounceEvent> {
        self.events
            .iter()
            .filter(|e| !e.tangential && matches!(e.wall, Wall::Obstacle(_)))
    }

    pub fn position_at(&self, t: f64) -> Result<Point2> {
        position_at(self, t)
    }
}

fn validate_start(scene: &Scene, s: &RayState) -> Result<()> {
    if !s.pos.is_finite() || !s.time.is_finite() {
        return Err(Error::InvalidArgument("non-finite start state".into()));
    }
    // a start on a wall lies within rounding of the closed domain
    let slack = 1e-9;
    let inside = match scene {
        Scene::Obstacle(o) => {
            s.pos.norm() <= o.outer_radius + slack
                && o.centers.iter().all(|c| s.pos.distance(*c) >= o.r0 - slack)
        }
        Scene::Rectangle { width, height } => {
            (-slack..=width + slack).contains(&s.pos.x)
                && (-slack..=height + slack).contains(&s.pos.y)
        }
        Scene::Disk { radius } => s.pos.norm() <= radius + slack,
        Scene::Torus { .. } => true,
    };
    if inside {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "start {} lies outside the {} domain",
            s.pos,
            scene.kind_name()
        )))
    }
}

/// Entry time of the ray `p + t d` (|d| = 1) into the circle `(c, r)` from
/// outside, with `|d · n|` at the entry point.
fn circle_entry(p: Point2, d: Point2, c: Point2, r: f64) -> Option<(f64, f64)> {
    let w = p - c;
    let b = d.dot(w);
    if b >= 0.0 {
        return None;
    }
    let cc = w.norm_sq() - r * r;
    let disc = b * b - cc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t = cc / (-b + sq);
    Some((t, sq / r))
}

/// Exit time of the ray from inside the circle `(c, r)`.
fn circle_exit(p: Point2, d: Point2, c: Point2, r: f64) -> Option<(f64, f64)> {
    let w = p - c;
    let b = d.dot(w);
    let cc = w.norm_sq() - r * r;
    let disc = (b * b - cc).max(0.0);
    let sq = disc.sqrt();
    let t = if b >= 0.0 {
        if b + sq == 0.0 {
            return None;
        }
        -cc / (b + sq)
    } else {
        -b + sq
    };
    Some((t, sq / r))
}

fn rect_hit(p: Point2, d: Point2, width: f64, height: f64) -> Option<(f64, RectSide)> {
    let tx = if d.x > 0.0 {
        Some(((width - p.x) / d.x, RectSide::Right))
    } else if d.x < 0.0 {
        Some((-p.x / d.x, RectSide::Left))
    } else {
        None
    };
    let ty = if d.y > 0.0 {
        Some(((height - p.y) / d.y, RectSide::Top))
    } else if d.y < 0.0 {
        Some((-p.y / d.y, RectSide::Bottom))
    } else {
        None
    };
    let valid = |h: Option<(f64, RectSide)>| h.filter(|(t, _)| *t > MIN_FLIGHT);
    match (valid(tx), valid(ty)) {
        (Some(a), Some(b)) => {
            let scale = a.0.abs().max(b.0.abs()).max(1.0);
            if (a.0 - b.0).abs() <= 1e-12 * scale {
                Some((a.0.min(b.0), RectSide::Corner))
            } else if a.0 < b.0 {
                Some(a)
            } else {
                Some(b)
            }
        }
        (a, b) => a.or(b),
    }
}

fn rect_normal(side: RectSide, d: Point2) -> Point2 {
    match side {
        RectSide::Left => Point2::new(-1.0, 0.0),
        RectSide::Right => Point2::new(1.0, 0.0),
        RectSide::Bottom => Point2::new(0.0, -1.0),
        RectSide::Top => Point2::new(0.0, 1.0),
        // a corner acts as both sides at once; callers handle it separately
        RectSide::Corner => -d,
    }
}

/// Outward unit normal of the boundary at `e.point` (pointing out of the
/// domain).
fn outward_normal(scene: &Scene, wall: Wall, point: Point2, incoming: Point2) -> Point2 {
    match (scene, wall) {
        (Scene::Obstacle(o), Wall::Obstacle(j)) => {
            let n = point - o.center(j);
            n * (-1.0 / n.norm())
        }
        (_, Wall::Outer) | (_, Wall::DiskBoundary) => point * (1.0 / point.norm()),
        (_, Wall::Rect(side)) => rect_normal(side, incoming),
        _ => -incoming,
    }
}

/// Boundary coordinates of a point on obstacle `j` with outgoing velocity `out`.
pub fn obstacle_coords(o: &ObstacleScene, j: u8, point: Point2, out: Point2) -> BilliardCoords {
    let c = o.center(j);
    let q = o.marked_point(j);
    let theta_q = (q.y - c.y).atan2(q.x - c.x);
    let theta = (point.y - c.y).atan2(point.x - c.x);
    let r = o.r0 * normalize_angle(theta_q - theta);
    let r = if r >= TAU * o.r0 { 0.0 } else { r };
    let n_in = (point - c) * (1.0 / o.r0);
    let phi = normalize_angle(n_in.cross(out).atan2(n_in.dot(out)));
    BilliardCoords { j, r, phi }
}

/// Earliest wall hit at positive time.
pub fn first_collision(scene: &Scene, s: &RayState) -> Result<BounceEvent> {
    validate_start(scene, s)?;
    let p = s.pos;
    let d = s.dir.vector();
    let (t, wall, tangent_measure) = match *scene {
        Scene::Torus { .. } => return Err(Error::NoCollision),
        Scene::Obstacle(o) => {
            let mut best: Option<(f64, Wall, f64)> = None;
            for j in 1..=3u8 {
                if let Some((t, m)) = circle_entry(p, d, o.center(j), o.r0) {
                    if t > MIN_FLIGHT && best.is_none_or(|b| t < b.0) {
                        best = Some((t, Wall::Obstacle(j), m));
                    }
                }
            }
            if let Some((t, m)) = circle_exit(p, d, Point2::ORIGIN, o.outer_radius) {
                if t > MIN_FLIGHT && best.is_none_or(|b| t < b.0) {
                    best = Some((t, Wall::Outer, m));
                }
            }
            best.ok_or(Error::NoCollision)?
        }
        Scene::Rectangle { width, height } => {
            let (t, side) = rect_hit(p, d, width, height).ok_or(Error::NoCollision)?;
            let m = match side {
                RectSide::Left | RectSide::Right => d.x.abs(),
                RectSide::Bottom | RectSide::Top => d.y.abs(),
                RectSide::Corner => d.x.abs().min(d.y.abs()),
            };
            (t, Wall::Rect(side), m)
        }
        Scene::Disk { radius } => {
            let (t, m) = circle_exit(p, d, Point2::ORIGIN, radius).ok_or(Error::NoCollision)?;
            if t <= MIN_FLIGHT {
                return Err(Error::NoCollision);
            }
            (t, Wall::DiskBoundary, m)
        }
    };
    let point = p + d * t;
    let tangential = tangent_measure < TANGENCY_TOL;
    let mut event = BounceEvent {
        time: s.time + t,
        point,
        wall,
        incoming: s.dir,
        outgoing: s.dir,
        tangential,
        coords: None,
    };
    if !tangential {
        event.outgoing = reflect(scene, &event, s.dir)?;
    }
    if let (Scene::Obstacle(o), Wall::Obstacle(j)) = (scene, wall) {
        event.coords = Some(obstacle_coords(o, j, point, event.outgoing.vector()));
    }
    Ok(event)
}

/// Specular reflection of `incoming` at the wall point of `e`.
pub fn reflect(scene: &Scene, e: &BounceEvent, incoming: Direction) -> Result<Direction> {
    let v = incoming.vector();
    if e.wall == Wall::Rect(RectSide::Corner) {
        return Ok(incoming.reversed());
    }
    let n = outward_normal(scene, e.wall, e.point, v);
    let vn = v.dot(n);
    if vn.abs() < TANGENCY_TOL {
        return Err(Error::TangentialHit(vn.abs()));
    }
    let out = v - n * (2.0 * vn);
    // axis-aligned normals give exact results; otherwise renormalize
    if n.x == 0.0 || n.y == 0.0 {
        return Ok(Direction::from_vector(out).expect("unit vector"));
    }
    Direction::from_vector(out).ok_or_else(|| Error::NumericFailure("degenerate reflection".into()))
}

/// Traces the generalized geodesic from `s` for a duration `horizon`, or until
/// `max_bounces` events have been recorded.
pub fn trace(scene: &Scene, s: RayState, horizon: f64, max_bounces: usize) -> Result<Trajectory> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    validate_start(scene, &s)?;
    let end = s.time + horizon;
    match *scene {
        Scene::Torus { side } => return flow_torus_from(side, s, horizon),
        Scene::Disk { radius } => return trace_disk(scene, radius, s, end, max_bounces),
        _ => {}
    }
    let mut events = Vec::new();
    let mut state = s;
    let mut final_time = end;
    while events.len() < max_bounces {
        let e = first_collision(scene, &state)?;
        if e.time > end {
            break;
        }
        state = RayState::new(e.point, e.outgoing, e.time);
        events.push(e);
        if events.len() == max_bounces {
            final_time = e.time;
        }
    }
    Ok(Trajectory {
        scene: *scene,
        start: s,
        events,
        horizon: final_time,
    })
}

/// Disk flow by its chord map: bounce angles form an arithmetic progression
/// and every chord has the same length.
fn trace_disk(
    scene: &Scene,
    radius: f64,
    s: RayState,
    end: f64,
    max_bounces: usize,
) -> Result<Trajectory> {
    let mut events = Vec::new();
    let mut final_time = end;
    if max_bounces == 0 {
        return Ok(Trajectory {
            scene: *scene,
            start: s,
            events,
            horizon: end,
        });
    }
    let first = first_collision(scene, &s)?;
    if first.time > end {
        return Ok(Trajectory {
            scene: *scene,
            start: s,
            events,
            horizon: end,
        });
    }
    let theta1 = first.point.y.atan2(first.point.x);
    let n = first.point * (1.0 / first.point.norm());
    let u = first.outgoing.vector();
    let inward = -u.dot(n);
    let tangential = n.cross(u);
    let sigma = if tangential < 0.0 { -1.0 } else { 1.0 };
    let alpha = inward.atan2(tangential.abs());
    let chord = 2.0 * radius * alpha.sin();
    let step = 2.0 * alpha * sigma;
    events.push(first);
    let mut k = 1.0;
    while events.len() < max_bounces {
        let time = first.time + k * chord;
        if time > end || !(chord > 0.0) {
            break;
        }
        let theta = theta1 + k * step;
        let point = Point2::new(radius * theta.cos(), radius * theta.sin());
        let incoming = Direction::from_angle(theta + sigma * (FRAC_PI_2 - alpha));
        let outgoing = Direction::from_angle(theta + sigma * (FRAC_PI_2 + alpha));
        events.push(BounceEvent {
            time,
            point,
            wall: Wall::DiskBoundary,
            incoming,
            outgoing,
            tangential: first.tangential,
            coords: None,
        });
        k += 1.0;
    }
    if events.len() == max_bounces {
        final_time = events.last().map_or(end, |e| e.time);
    }
    Ok(Trajectory {
        scene: *scene,
        start: s,
        events,
        horizon: final_time,
    })
}

/// Straight-line flow on the flat torus of side `l`.
pub fn flow_torus(l: f64, start: Point2, dir: Direction, horizon: f64) -> Result<Trajectory> {
    if !(l > 0.0) {
        return Err(Error::InvalidScene(format!("torus side must be positive, got {l}")));
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    flow_torus_from(l, RayState::new(start, dir, 0.0), horizon)
}

fn flow_torus_from(l: f64, s: RayState, horizon: f64) -> Result<Trajectory> {
    let scene = Scene::torus(l)?;
    let start = RayState::new(scene.canonical(s.pos), s.dir, s.time);
    Ok(Trajectory {
        scene,
        start,
        events: Vec::new(),
        horizon: s.time + horizon,
    })
}

/// `(x0 + t·d) mod l`, accurate for large `t`.
pub fn wrap_affine(x0: f64, t: f64, d: f64, l: f64) -> f64 {
    let hi = t * d;
    let lo = t.mul_add(d, -hi);
    let r = hi % l;
    wrap(r + (lo + x0), l)
}

pub fn position_at(tr: &Trajectory, t: f64) -> Result<Point2> {
    let lo = tr.start.time;
    if !(t >= lo && t <= tr.horizon) {
        return Err(Error::OutOfRange {
            t,
            lo,
            hi: tr.horizon,
        });
    }
    if let Scene::Torus { side } = tr.scene {
        let d = tr.start.dir.vector();
        let dt = t - lo;
        return Ok(Point2::new(
            wrap_affine(tr.start.pos.x, dt, d.x, side),
            wrap_affine(tr.start.pos.y, dt, d.y, side),
        ));
    }
    let k = tr.events.partition_point(|e| e.time <= t);
    let (t0, p0, d) = if k == 0 {
        (lo, tr.start.pos, tr.start.dir)
    } else {
        let e = &tr.events[k - 1];
        if e.time == t {
            return Ok(e.point);
        }
        (e.time, e.point, e.outgoing)
    };
    Ok(p0 + d.vector() * (t - t0))
}

/// Boundary coordinates of an obstacle bounce.
pub fn billiard_coordinates(scene: &Scene, e: &BounceEvent) -> Result<BilliardCoords> {
    match (scene, e.wall) {
        (Scene::Obstacle(o), Wall::Obstacle(j)) => {
            Ok(e.coords
                .unwrap_or_else(|| obstacle_coords(o, j, e.point, e.outgoing.vector())))
        }
        _ => Err(Error::NotObstacleBounce),
    }
}
