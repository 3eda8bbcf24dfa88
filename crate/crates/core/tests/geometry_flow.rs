use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use geocatch::flow::{flow_torus, trace, RayState, Wall};
use geocatch::geometry::{ball_intersects_zone, zone_membership, Direction, Point2, Scene};
use proptest::prelude::*;

fn seg_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    // closest point by projection, written out independently
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let s = (((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p.x - a.x - s * dx).powi(2) + (p.y - a.y - s * dy).powi(2)).sqrt()
}

#[test]
fn obstacle_layout() {
    let s = Scene::obstacle(0.05, 2.0).unwrap();
    let o = s.as_obstacle().unwrap();
    for (i, j) in [(1, 2), (2, 3), (1, 3)] {
        assert_abs_diff_eq!(o.center(i).distance(o.center(j)), 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(o.center(i).distance(o.center(j)) - 2.0 * o.r0, 1.0, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(o.centroid().norm(), 0.0, epsilon = 1e-15);
    assert_eq!(o.center(1).x, 0.0);
    assert!(o.center(1).y > 0.0);
    assert!(Scene::obstacle(0.0, 2.0).is_err());
    assert!(Scene::obstacle(0.05, 0.5).is_err());
}

#[test]
fn scene_json_round_trip() {
    for s in [
        Scene::torus(1.0).unwrap(),
        Scene::rectangle(2.0, 0.5).unwrap(),
        Scene::disk(3.0).unwrap(),
        Scene::default_obstacle(),
    ] {
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<Scene>(&text).unwrap(), s);
    }
}

proptest! {
    #[test]
    fn zones_match_segment_distance(x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let s = Scene::default_obstacle();
        let o = *s.as_obstacle().unwrap();
        let p = Point2::new(x, y);
        let z = zone_membership(&s, p);
        for (a, (i, j)) in [(1u8, (2u8, 3u8)), (2, (1, 3)), (3, (1, 2))] {
            let d = seg_dist(p, o.center(i), o.center(j));
            if (d - o.r0).abs() > 1e-12 {
                prop_assert_eq!(z.contains(a), d <= o.r0);
            }
        }
    }

    #[test]
    fn zones_rotate_with_the_scene(x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let s = Scene::default_obstacle();
        let o = *s.as_obstacle().unwrap();
        let p = Point2::new(x, y);
        let q = p.rotate(TAU / 3.0);
        // rotating by 2π/3 sends circle 1 to 2, 2 to 3 and 3 to 1
        for (a, b) in [(1u8, 2u8), (2, 3), (3, 1)] {
            let (c1, c2) = o.zone_segment(a);
            if (seg_dist(p, c1, c2) - o.r0).abs() > 1e-9 {
                prop_assert_eq!(zone_membership(&s, p).contains(a), zone_membership(&s, q).contains(b));
            }
        }
    }

    #[test]
    fn ball_intersection_is_monotone(x in -1.5..1.5f64, y in -1.5..1.5f64, e1 in 0.001..0.5f64, e2 in 0.001..0.5f64) {
        let s = Scene::default_obstacle();
        let c = Point2::new(x, y);
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        for a in 1..=3 {
            if ball_intersects_zone(&s, c, lo, a) {
                prop_assert!(ball_intersects_zone(&s, c, hi, a));
            }
        }
    }

    #[test]
    fn disk_bounces_are_specular(x in -0.7..0.7f64, y in -0.7..0.7f64, th in 0.0..TAU) {
        let r = 1.3;
        let s = Scene::disk(r).unwrap();
        let tr = trace(&s, RayState::at_angle(Point2::new(x, y), th), 60.0, usize::MAX).unwrap();
        let mut prev = (tr.start.time, tr.start.pos);
        for e in &tr.events {
            prop_assert!((e.point.norm() - r).abs() < 1e-9);
            // unit speed between events
            prop_assert!((e.point.distance(prev.1) - (e.time - prev.0)).abs() < 1e-9);
            let n = e.point * (1.0 / e.point.norm());
            let (i, o) = (e.incoming.vector(), e.outgoing.vector());
            prop_assert!((i.dot(n) + o.dot(n)).abs() < 1e-9);
            prop_assert!((i.cross(n) - o.cross(n)).abs() < 1e-9);
            prev = (e.time, e.point);
        }
    }

    #[test]
    fn obstacle_events_lie_on_walls(x in -0.25..0.25f64, y in -0.25..0.25f64, th in 0.0..TAU) {
        let s = Scene::default_obstacle();
        let o = *s.as_obstacle().unwrap();
        let tr = trace(&s, RayState::at_angle(Point2::new(x, y), th), 30.0, usize::MAX).unwrap();
        let mut prev = (tr.start.time, tr.start.pos);
        for e in &tr.events {
            match e.wall {
                Wall::Obstacle(j) => prop_assert!((e.point.distance(o.center(j)) - o.r0).abs() < 1e-9),
                Wall::Outer => prop_assert!((e.point.norm() - o.outer_radius).abs() < 1e-9),
                other => prop_assert!(false, "unexpected wall {:?}", other),
            }
            prop_assert!((e.point.distance(prev.1) - (e.time - prev.0)).abs() < 1e-9);
            prev = (e.time, e.point);
        }
    }

    #[test]
    fn torus_is_a_straight_line_mod_l(x in 0.0..2.0f64, y in 0.0..2.0f64, th in 0.0..TAU, t in 0.0..1e4f64) {
        let l = 2.0;
        let d = Direction::from_angle(th);
        let tr = flow_torus(l, Point2::new(x, y), d, 1e4).unwrap();
        let p = tr.position_at(t).unwrap();
        let want = Point2::new(x + t * d.vector().x, y + t * d.vector().y);
        let s = Scene::torus(l).unwrap();
        prop_assert!(s.distance(p, want) < 1e-9);
        prop_assert!(tr.events.is_empty());
    }

    #[test]
    fn rectangle_retraces_when_reversed(x in 0.01..0.99f64, y in 0.01..1.99f64, th in 0.0..TAU) {
        let s = Scene::rectangle(1.0, 2.0).unwrap();
        let fwd = trace(&s, RayState::at_angle(Point2::new(x, y), th), 40.0, usize::MAX).unwrap();
        let end = fwd.position_at(40.0).unwrap();
        let last = fwd.events.last().map_or(fwd.start.dir, |e| e.outgoing);
        let back = trace(&s, RayState::new(end, last.reversed(), 0.0), 40.0, usize::MAX).unwrap();
        prop_assert!(back.position_at(40.0).unwrap().distance(Point2::new(x, y)) < 1e-9);
    }
}

#[test]
fn square_diagonal_closes() {
    let s = Scene::rectangle(1.0, 1.0).unwrap();
    let tr = trace(&s, RayState::at_angle(Point2::new(0.5, 0.25), PI / 4.0), 2.0 * 2f64.sqrt(), 100).unwrap();
    let end = tr.position_at(2.0 * 2f64.sqrt()).unwrap();
    assert!(end.distance(Point2::new(0.5, 0.25)) < 1e-12);
}
