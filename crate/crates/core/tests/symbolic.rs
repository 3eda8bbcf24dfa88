use geocatch::geometry::{Point2, Scene};
use geocatch::symbolic::{itinerary_of, realize, solve_itinerary, solve_nested, Itinerary};
use proptest::prelude::*;

fn word(max: usize) -> impl Strategy<Value = Itinerary> {
    (1u8..=3, prop::collection::vec(1u8..=2, 0..max)).prop_map(|(first, steps)| {
        let mut w = vec![first];
        for s in steps {
            let last = *w.last().unwrap();
            // step 1 or 2 around the cycle never repeats a symbol
            w.push((last - 1 + s) % 3 + 1);
        }
        Itinerary::new(w).unwrap()
    })
}

#[test]
fn single_circle_interval_is_the_tangent_cone() {
    let s = Scene::default_obstacle();
    let o = *s.as_obstacle().unwrap();
    for a in [Point2::new(0.0, 0.0), Point2::new(0.1, -0.05), Point2::new(-0.2, 0.1)] {
        for j in 1..=3u8 {
            let iv = solve_itinerary(&s, a, &Itinerary::new(vec![j]).unwrap()).unwrap();
            let want = 2.0 * (o.r0 / a.distance(o.center(j))).asin();
            assert!((iv.width_f64() - want).abs() < 1e-12, "{} vs {want}", iv.width_f64());
        }
    }
}

#[test]
fn repeated_symbols_are_rejected() {
    assert!("11".parse::<Itinerary>().is_err());
    assert!("1231".parse::<Itinerary>().is_ok());
    assert!("124".parse::<Itinerary>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn intervals_nest(w in word(10), x in -0.15..0.15f64, y in -0.15..0.15f64) {
        let s = Scene::default_obstacle();
        let ivs = solve_nested(&s, Point2::new(x, y), &w).unwrap();
        prop_assert_eq!(ivs.len(), w.len());
        for k in 1..ivs.len() {
            prop_assert!(ivs[k].is_subset(&ivs[k - 1]));
            prop_assert!(ivs[k].width_f64() < ivs[k - 1].width_f64());
        }
    }

    #[test]
    fn realized_words_round_trip(w in word(16), x in -0.15..0.15f64, y in -0.15..0.15f64) {
        let s = Scene::default_obstacle();
        let tr = realize(&s, Point2::new(x, y), &w).unwrap();
        prop_assert_eq!(itinerary_of(&tr, w.len()).unwrap(), w);
    }
}
