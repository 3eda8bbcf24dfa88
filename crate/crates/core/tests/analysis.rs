use std::f64::consts::{PI, TAU};

use geocatch::analysis::{dichotomy_check, disk_structure, occupancy, rational_approx, star_discrepancy, Dichotomy};
use geocatch::flow::flow_torus;
use geocatch::geometry::{Direction, Point2, Scene};
use proptest::prelude::*;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `sup_t |#{x < t}/n − t|` evaluated at every jump, written out directly.
fn brute_discrepancy(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for &t in xs.iter().chain(std::iter::once(&1.0)) {
        let below = xs.iter().filter(|&&x| x < t).count() as f64;
        let upto = xs.iter().filter(|&&x| x <= t).count() as f64;
        d = d.max((below / n - t).abs()).max((upto / n - t).abs());
    }
    d
}

#[test]
fn horizontal_line_through_the_ball() {
    let tr = flow_torus(1.0, Point2::new(0.0, 0.5), Direction::from_angle(0.0), 50.0).unwrap();
    let s = occupancy(&tr, Point2::new(0.5, 0.5), 0.1, &[1.0, 10.0, 50.0]).unwrap();
    for f in s.fractions {
        assert!((f - 0.2).abs() < 1e-12);
    }
}

#[test]
fn inscribed_triangle() {
    let r = disk_structure(PI / 3.0, 0.0, 9).unwrap();
    assert_eq!(r.period, Some(3));
    assert!((r.inner_radius - 0.5).abs() < 1e-12);
    for k in 3..9 {
        let d = (r.angles[k] - r.angles[k - 3]).abs();
        assert!(d.min(2.0 * PI - d) < 1e-12);
    }
}

proptest! {
    #[test]
    fn rational_slopes_close(p in 0i64..12, q in 1i64..12) {
        prop_assume!(gcd(p, q) == 1);
        let s = Scene::torus(1.0).unwrap();
        let dir = Direction::from_vector(Point2::new(q as f64, p as f64)).unwrap();
        let r = dichotomy_check(&s, Point2::new(0.1, 0.2), dir, Point2::new(0.5, 0.5), 0.1, 100.0).unwrap();
        let want = ((p * p + q * q) as f64).sqrt();
        match r.result {
            Dichotomy::Periodic { period } => prop_assert!((period - want).abs() < 1e-12),
            other => prop_assert!(false, "{:?}", other),
        }
        let tr = flow_torus(1.0, Point2::new(0.1, 0.2), dir, 2.0 * want).unwrap();
        prop_assert!(s.distance(tr.position_at(want).unwrap(), Point2::new(0.1, 0.2)) < 1e-9);
    }

    #[test]
    fn convergents_are_exact(p in 1i64..500, q in 1i64..500) {
        let g = gcd(p, q);
        let (a, b) = rational_approx(p as f64 / q as f64, 1e-10, 1000).unwrap();
        prop_assert_eq!((a, b), (p / g, q / g));
    }

    #[test]
    fn discrepancy_matches_brute_force(xs in prop::collection::vec(0.0..1.0f64, 1..60)) {
        prop_assert!((star_discrepancy(&xs) - brute_discrepancy(&xs)).abs() < 1e-12);
    }

    #[test]
    fn disk_chords_keep_their_distance(alpha in 0.05..1.5f64, theta0 in 0.0..TAU) {
        let r = disk_structure(alpha, theta0, 500).unwrap();
        for w in r.angles.windows(2) {
            let p = Point2::new(w[0].cos(), w[0].sin());
            let q = Point2::new(w[1].cos(), w[1].sin());
            let d = p.cross(q).abs() / p.distance(q);
            prop_assert!((d - alpha.cos()).abs() < 1e-12);
        }
    }
}
