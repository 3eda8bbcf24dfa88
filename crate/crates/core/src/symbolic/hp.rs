//! 237-bit arithmetic for the itinerary solver.

use std::ops::{Add, Mul, Neg, Sub};

use f256::f256;

use crate::geometry::{ObstacleScene, Point2};

/// Extended-precision float used by the itinerary solver.
pub type Hp = f256;

const HI_FRACTION_BITS: u32 = 108;
const EXP_BIAS: i64 = 262_143;

/// Nearest-ish `f64` (truncating below the 53rd bit, then rounding half up).
pub fn to_f64(v: f256) -> f64 {
    if v.is_nan() {
        return f64::NAN;
    }
    if v.is_infinite() {
        return if v.is_sign_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let (hi, _) = v.to_bits();
    let negative = hi >> 127 == 1;
    let biased = ((hi >> HI_FRACTION_BITS) & 0x7ffff) as i64;
    if biased == 0 {
        return if negative { -0.0 } else { 0.0 };
    }
    let frac = hi & ((1u128 << HI_FRACTION_BITS) - 1);
    let shift = HI_FRACTION_BITS - 52;
    let mut mant = (frac >> shift) as u64 | (1u64 << 52);
    let mut exp = biased - EXP_BIAS;
    if (frac >> (shift - 1)) & 1 == 1 {
        mant += 1;
        if mant == 1u64 << 53 {
            mant >>= 1;
            exp += 1;
        }
    }
    let m = mant as f64;
    let e = exp - 52;
    let mag = if e > 1100 {
        f64::INFINITY
    } else if e < -1200 {
        0.0
    } else {
        // two steps keep intermediate powers of two in range
        let h = e / 2;
        m * 2f64.powi(h as i32) * 2f64.powi((e - h) as i32)
    };
    if negative {
        -mag
    } else {
        mag
    }
}

pub fn hp(x: f64) -> f256 {
    f256::from(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpPoint {
    pub x: f256,
    pub y: f256,
}

impl HpPoint {
    pub fn new(x: f256, y: f256) -> Self {
        HpPoint { x, y }
    }

    pub fn from_f64(p: Point2) -> Self {
        HpPoint::new(hp(p.x), hp(p.y))
    }

    pub fn to_f64(self) -> Point2 {
        Point2::new(to_f64(self.x), to_f64(self.y))
    }

    pub fn dot(self, o: HpPoint) -> f256 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: HpPoint) -> f256 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f256 {
        self.dot(self).sqrt()
    }
}

impl Add for HpPoint {
    type Output = HpPoint;
    fn add(self, o: HpPoint) -> HpPoint {
        HpPoint::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for HpPoint {
    type Output = HpPoint;
    fn sub(self, o: HpPoint) -> HpPoint {
        HpPoint::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f256> for HpPoint {
    type Output = HpPoint;
    fn mul(self, s: f256) -> HpPoint {
        HpPoint::new(self.x * s, self.y * s)
    }
}

impl Neg for HpPoint {
    type Output = HpPoint;
    fn neg(self) -> HpPoint {
        HpPoint::new(-self.x, -self.y)
    }
}

/// The obstacle configuration rebuilt in 237-bit arithmetic from the same
/// `r0`, so that the high-precision centers are the exact ones.
#[derive(Debug, Clone, Copy)]
pub struct HpObstacles {
    pub r0: f256,
    pub r0_sq: f256,
    pub inv_r0: f256,
    pub centers: [HpPoint; 3],
}

impl HpObstacles {
    pub fn new(o: &ObstacleScene) -> Self {
        let r0 = hp(o.r0);
        let side = f256::ONE + f256::TWO * r0;
        let circ = side / f256::from(3).sqrt();
        let half = f256::ONE / f256::TWO;
        let centers = [
            HpPoint::new(f256::ZERO, circ),
            HpPoint::new(-(half * side), -(half * circ)),
            HpPoint::new(half * side, -(half * circ)),
        ];
        HpObstacles {
            r0,
            r0_sq: r0 * r0,
            inv_r0: f256::ONE / r0,
            centers,
        }
    }

    pub fn center(&self, j: u8) -> HpPoint {
        self.centers[usize::from(j - 1)]
    }
}

/// Geometry of the line `p + t d` relative to a circle center `c`.
#[derive(Debug, Clone, Copy)]
pub struct Approach {
    /// Signed distance of the center from the line (positive to the left).
    pub miss: f256,
    /// Parameter of the closest approach.
    pub along: f256,
}

pub fn approach(p: HpPoint, d: HpPoint, c: HpPoint) -> Approach {
    let w = c - p;
    Approach {
        miss: d.cross(w),
        along: d.dot(w),
    }
}

impl Approach {
    pub fn hits(&self, r0: f256) -> bool {
        self.along > f256::ZERO && self.miss.abs() < r0
    }
}

/// Entry point and reflected direction for a ray known to hit the circle.
pub fn bounce(
    obs: &HpObstacles,
    p: HpPoint,
    d: HpPoint,
    c: HpPoint,
    a: Approach,
) -> (f256, HpPoint, HpPoint) {
    let t = a.along - (obs.r0_sq - a.miss * a.miss).sqrt();
    let q = p + d * t;
    let n = (q - c) * obs.inv_r0;
    let dn = d.dot(n);
    let out = d - n * (f256::TWO * dn);
    (t, q, out)
}
