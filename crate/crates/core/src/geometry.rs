//! Plane primitives, scene descriptors and the zone predicates of the
//! three-disc scattering domain.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest obstacle radius accepted by [`Scene::obstacle`].
pub const MAX_OBSTACLE_RADIUS: f64 = 0.2;
/// Default obstacle radius.
pub const DEFAULT_R0: f64 = 0.05;
/// Default radius of the circular outer wall.
pub const DEFAULT_OUTER_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation about the origin.
    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point2, s: f64) -> Point2 {
        Point2::new(
            self.x + (other.x - self.x) * s,
            self.y + (other.y - self.y) * s,
        )
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Unit-speed direction of travel.
///
/// Stored as a unit vector so that axis-aligned directions stay exact; the
/// angle in `[0, 2π)` is derived on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    v: Point2,
}

impl Direction {
    /// Direction making `angle` radians with the positive x-axis.
    ///
    /// Multiples of π/2 (as represented in `f64`) map to exact axis vectors.
    pub fn from_angle(angle: f64) -> Self {
        let a = normalize_angle(angle);
        let v = if a == 0.0 {
            Point2::new(1.0, 0.0)
        } else if a == FRAC_PI_2 {
            Point2::new(0.0, 1.0)
        } else if a == PI {
            Point2::new(-1.0, 0.0)
        } else if a == 3.0 * FRAC_PI_2 {
            Point2::new(0.0, -1.0)
        } else {
            let (s, c) = a.sin_cos();
            Point2::new(c, s)
        };
        Direction { v }
    }

    /// Normalizes `v`. Returns `None` for a zero or non-finite vector.
    pub fn from_vector(v: Point2) -> Option<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        Some(Direction { v: v * (1.0 / n) }.renormalized())
    }

    fn renormalized(self) -> Self {
        // hypot keeps (±a, 0) exact
        let n = self.v.norm();
        if n == 1.0 {
            self
        } else {
            Direction {
                v: Point2::new(self.v.x / n, self.v.y / n),
            }
        }
    }

    pub fn angle(self) -> f64 {
        normalize_angle(self.v.y.atan2(self.v.x))
    }

    pub fn vector(self) -> Point2 {
        self.v
    }

    pub fn reversed(self) -> Self {
        Direction { v: -self.v }
    }
}

impl Serialize for Direction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.angle())
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = f64::deserialize(d)?;
        Ok(Direction::from_angle(a))
    }
}

/// Reduces an angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces `x` into `[0, period)`.
pub fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Signed representative of `x` modulo `period` in `[-period/2, period/2)`.
pub fn wrap_centered(x: f64, period: f64) -> f64 {
    wrap(x + 0.5 * period, period) - 0.5 * period
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let s = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * s)
}

/// Minimum distance between segments `[a, b]` and `[c, d]`.
pub fn segment_segment_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// The three-disc scattering domain: three obstacles of radius `r0` whose
/// centers form an equilateral triangle of side `1 + 2 r0`, enclosed by a
/// circular outer wall centered at the triangle's centroid (the origin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleScene {
    pub r0: f64,
    pub outer_radius: f64,
    /// Obstacle centers, index 0 holding obstacle 1. Counterclockwise, with
    /// obstacle 1 on the positive y-axis and obstacles 2, 3 sharing a y value.
    pub centers: [Point2; 3],
}

impl ObstacleScene {
    pub fn new(r0: f64, outer_radius: f64) -> Result<Self> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::InvalidScene(format!(
                "obstacle radius must be positive, got {r0}"
            )));
        }
        if r0 > MAX_OBSTACLE_RADIUS {
            return Err(Error::InvalidScene(format!(
                "obstacle radius {r0} exceeds {MAX_OBSTACLE_RADIUS}"
            )));
        }
        let side = 1.0 + 2.0 * r0;
        let circumradius = side / 3f64.sqrt();
        if !(outer_radius > circumradius + r0) || !outer_radius.is_finite() {
            return Err(Error::InvalidScene(format!(
                "outer radius {outer_radius} does not enclose the obstacles (needs > {})",
                circumradius + r0
            )));
        }
        let centers = [
            Point2::new(0.0, circumradius),
            Point2::new(-0.5 * side, -0.5 * circumradius),
            Point2::new(0.5 * side, -0.5 * circumradius),
        ];
        Ok(ObstacleScene {
            r0,
            outer_radius,
            centers,
        })
    }

    pub fn side(&self) -> f64 {
        1.0 + 2.0 * self.r0
    }

    pub fn centroid(&self) -> Point2 {
        Point2::ORIGIN
    }

    /// Center of obstacle `j` (1-based).
    pub fn center(&self, j: u8) -> Point2 {
        self.centers[usize::from(j - 1)]
    }

    /// The two obstacles whose convex hull is zone `a`, in increasing order.
    pub fn zone_circles(a: u8) -> (u8, u8) {
        match a {
            1 => (2, 3),
            2 => (1, 3),
            3 => (1, 2),
            _ => panic!("zone index {a} outside 1..=3"),
        }
    }

    /// Segment joining the centers of the two obstacles defining zone `a`.
    pub fn zone_segment(&self, a: u8) -> (Point2, Point2) {
        let (i, j) = Self::zone_circles(a);
        (self.center(i), self.center(j))
    }

    /// Distance from `p` to the closed zone `Z_a` (0 inside).
    pub fn distance_to_zone(&self, p: Point2, a: u8) -> f64 {
        let (c1, c2) = self.zone_segment(a);
        (point_segment_distance(p, c1, c2) - self.r0).max(0.0)
    }

    /// Marked point `q_j`: the point of obstacle `j` nearest the centroid.
    pub fn marked_point(&self, j: u8) -> Point2 {
        let c = self.center(j);
        let u = (self.centroid() - c) * (1.0 / c.distance(self.centroid()));
        c + u * self.r0
    }

    /// Index of the obstacle whose center is nearest `p` (lowest index on ties).
    pub fn nearest_obstacle(&self, p: Point2) -> u8 {
        let mut best = 1;
        let mut best_d = f64::INFINITY;
        for j in 1..=3u8 {
            let d = p.distance(self.center(j));
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        best
    }
}

/// A flat 2D domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneSpec", into = "SceneSpec")]
pub enum Scene {
    /// Flat torus `[0, side)²` with periodic identification.
    Torus { side: f64 },
    /// Rectangle `[0, width] × [0, height]`.
    Rectangle { width: f64, height: f64 },
    /// Disk of the given radius centered at the origin.
    Disk { radius: f64 },
    /// Three-disc scattering domain.
    Obstacle(ObstacleScene),
}

/// Serialized form of [`Scene`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SceneSpec {
    Torus { side: f64 },
    Rectangle { width: f64, height: f64 },
    Disk { radius: f64 },
    Obstacle { r0: f64, outer_radius: f64 },
}

impl TryFrom<SceneSpec> for Scene {
    type Error = Error;
    fn try_from(spec: SceneSpec) -> Result<Scene> {
        match spec {
            SceneSpec::Torus { side } => Scene::torus(side),
            SceneSpec::Rectangle { width, height } => Scene::rectangle(width, height),
            SceneSpec::Disk { radius } => Scene::disk(radius),
            SceneSpec::Obstacle { r0, outer_radius } => Scene::obstacle(r0, outer_radius),
        }
    }
}

impl From<Scene> for SceneSpec {
    fn from(s: Scene) -> SceneSpec {
        match s {
            Scene::Torus { side } => SceneSpec::Torus { side },
            Scene::Rectangle { width, height } => SceneSpec::Rectangle { width, height },
            Scene::Disk { radius } => SceneSpec::Disk { radius },
            Scene::Obstacle(o) => SceneSpec::Obstacle {
                r0: o.r0,
                outer_radius: o.outer_radius,
            },
        }
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidScene(format!("{name} must be positive, got {v}")))
    }
}

impl Scene {
    pub fn torus(side: f64) -> Result<Scene> {
        Ok(Scene::Torus {
            side: positive("torus side", side)?,
        })
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Scene> {
        Ok(Scene::Rectangle {
            width: positive("width", width)?,
            height: positive("height", height)?,
        })
    }

    pub fn disk(radius: f64) -> Result<Scene> {
        Ok(Scene::Disk {
            radius: positive("radius", radius)?,
        })
    }

    pub fn obstacle(r0: f64, outer_radius: f64) -> Result<Scene> {
        Ok(Scene::Obstacle(ObstacleScene::new(r0, outer_radius)?))
    }

    /// Obstacle scene with the default parameters.
    pub fn default_obstacle() -> Scene {
        Scene::obstacle(DEFAULT_R0, DEFAULT_OUTER_RADIUS).expect("default obstacle scene")
    }

    pub fn as_obstacle(&self) -> Option<&ObstacleScene> {
        match self {
            Scene::Obstacle(o) => Some(o),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Scene::Torus { .. } => "torus",
            Scene::Rectangle { .. } => "rectangle",
            Scene::Disk { .. } => "disk",
            Scene::Obstacle(_) => "obstacle",
        }
    }

    /// Period of the identification, for the torus only.
    pub fn torus_side(&self) -> Option<f64> {
        match self {
            Scene::Torus { side } => Some(*side),
            _ => None,
        }
    }

    /// Whether `p` lies in the closed domain.
    pub fn contains(&self, p: Point2) -> bool {
        if !p.is_finite() {
            return false;
        }
        match *self {
            Scene::Torus { .. } => true,
            Scene::Rectangle { width, height } => {
                (0.0..=width).contains(&p.x) && (0.0..=height).contains(&p.y)
            }
            Scene::Disk { radius } => p.norm() <= radius,
            Scene::Obstacle(o) => {
                p.norm() <= o.outer_radius
                    && o.centers.iter().all(|c| p.distance(*c) >= o.r0)
            }
        }
    }

    /// Distance in the domain's flat metric (modular on the torus).
    pub fn distance(&self, a: Point2, b: Point2) -> f64 {
        self.displacement(a, b).norm()
    }

    /// Shortest displacement from `a` to `b`; on the torus each component is
    /// reduced to `[-L/2, L/2)`.
    pub fn displacement(&self, a: Point2, b: Point2) -> Point2 {
        let d = b - a;
        match *self {
            Scene::Torus { side } => {
                Point2::new(wrap_centered(d.x, side), wrap_centered(d.y, side))
            }
            _ => d,
        }
    }

    /// Canonical representative of `p` (reduced modulo `L` on the torus).
    pub fn canonical(&self, p: Point2) -> Point2 {
        match *self {
            Scene::Torus { side } => Point2::new(wrap(p.x, side), wrap(p.y, side)),
            _ => p,
        }
    }

    /// Area of the domain.
    pub fn area(&self) -> f64 {
        match *self {
            Scene::Torus { side } => side * side,
            Scene::Rectangle { width, height } => width * height,
            Scene::Disk { radius } => PI * radius * radius,
            Scene::Obstacle(o) => PI * (o.outer_radius.powi(2) - 3.0 * o.r0 * o.r0),
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        match *self {
            Scene::Torus { side } => (Point2::ORIGIN, Point2::new(side, side)),
            Scene::Rectangle { width, height } => (Point2::ORIGIN, Point2::new(width, height)),
            Scene::Disk { radius } => (Point2::new(-radius, -radius), Point2::new(radius, radius)),
            Scene::Obstacle(o) => (
                Point2::new(-o.outer_radius, -o.outer_radius),
                Point2::new(o.outer_radius, o.outer_radius),
            ),
        }
    }
}

/// A subset of the zone indices `{1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct ZoneSet(u8);

impl ZoneSet {
    pub const EMPTY: ZoneSet = ZoneSet(0);

    pub fn insert(&mut self, a: u8) {
        debug_assert!((1..=3).contains(&a));
        self.0 |= 1 << (a - 1);
    }

    pub fn contains(self, a: u8) -> bool {
        (1..=3).contains(&a) && self.0 & (1 << (a - 1)) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1..=3u8).filter(move |a| self.contains(*a))
    }

    pub fn union(self, other: ZoneSet) -> ZoneSet {
        ZoneSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: ZoneSet) -> bool {
        self.0 & !other.0 == 0
    }
}

impl FromIterator<u8> for ZoneSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut s = ZoneSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl Serialize for ZoneSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl fmt::Display for ZoneSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Builds the three-disc scattering domain.
pub fn build_obstacle_scene(r0: f64, outer_radius: f64) -> Result<Scene> {
    Scene::obstacle(r0, outer_radius)
}

/// Every zone `a` whose closed stadium contains `p`. Empty for scenes without
/// zones.
pub fn zone_membership(scene: &Scene, p: Point2) -> ZoneSet {
    match scene {
        Scene::Obstacle(o) => (1..=3u8)
            .filter(|&a| {
                let (c1, c2) = o.zone_segment(a);
                point_segment_distance(p, c1, c2) <= o.r0
            })
            .collect(),
        _ => ZoneSet::EMPTY,
    }
}

/// Whether the open ball `B(center, eps)` meets the closed zone `Z_a`.
pub fn ball_intersects_zone(scene: &Scene, center: Point2, eps: f64, a: u8) -> bool {
    match scene {
        Scene::Obstacle(o) => {
            let (c1, c2) = o.zone_segment(a);
            point_segment_distance(center, c1, c2) < o.r0 + eps
        }
        _ => false,
    }
}
