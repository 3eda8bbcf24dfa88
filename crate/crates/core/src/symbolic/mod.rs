//! Itinerary coding of scattering trajectories in the three-disc domain.

mod hp;
pub mod relax;

mod solver;
mod stability;


use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{Trajectory, Wall};

pub use hp::{hp, to_f64, Hp};
pub use stability::{
    measure_stability, measure_stability_random, stability_report, stability_report_random, PairSample,
    StabilityOptions, StabilityReport,
};
pub use solver::{
    precise_bounces, realize, realize_at, solve_itinerary, solve_nested, AngleInterval,
    PreciseBounce,
};


/// Finite word over `{1, 2, 3}` with no immediate repetition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Itinerary(Vec<u8>);

impl Itinerary {
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if let Some(&s) = word.iter().find(|s| !(1..=3).contains(*s)) {
            return Err(Error::Inadmissible(format!("symbol {s} outside 1..=3")));
        }
        if let Some(k) = word.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Inadmissible(format!(
                "repeated symbol {} at positions {k} and {}",
                word[k],
                k + 1
            )));
        }
        Ok(Itinerary(word))
    }

    /// Alternating word `a, b, a, b, …` of the given length.
    pub fn alternating(a: u8, b: u8, len: usize) -> Result<Self> {
        Itinerary::new((0..len).map(|k| if k % 2 == 0 { a } else { b }).collect())
    }

    /// Uniformly random admissible word: the first symbol uniform over the
    /// three (or `after`-excluded two), each next uniform over the other two.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize, after: Option<u8>) -> Self {
        let mut word = Vec::with_capacity(len);
        let mut prev = after;
        for _ in 0..len {
            let s = match prev {
                None => rng.gen_range(1..=3u8),
                Some(p) => {
                    let k = rng.gen_range(0..2u8);
                    let others: Vec<u8> = (1..=3).filter(|&x| x != p).collect();
                    others[usize::from(k)]
                }
            };
            word.push(s);
            prev = Some(s);
        }
        Itinerary(word)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// First `n` symbols.
    pub fn prefix(&self, n: usize) -> Itinerary {
        Itinerary(self.0[..n.min(self.0.len())].to_vec())
    }

    /// Concatenation, rejected if the junction repeats a symbol.
    pub fn concat(&self, tail: &Itinerary) -> Result<Itinerary> {
        let mut w = self.0.clone();
        w.extend_from_slice(&tail.0);
        Itinerary::new(w)
    }
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Itinerary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(1),
                '2' => Ok(2),
                '3' => Ok(3),
                other => Err(Error::Inadmissible(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Itinerary::new(word)
    }
}

impl Serialize for Itinerary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Itinerary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Obstacle indices of the first `n` bounces of `tr`.
pub fn itinerary_of(tr: &Trajectory, n: usize) -> Result<Itinerary> {
    let mut word = Vec::with_capacity(n);
    for e in &tr.events {
        if word.len() == n {
            break;
        }
        match e.wall {
            Wall::Obstacle(j) if !e.tangential => word.push(j),
            Wall::Obstacle(_) => {}
            Wall::Outer => return Err(Error::TouchesOuterWall(word.len())),
            _ => return Err(Error::UnsupportedScene(tr.scene.kind_name().into())),
        }
    }
    if word.len() < n {
        return Err(Error::TooFewBounces {
            have: word.len(),
            need: n,
        });
    }
    Itinerary::new(word)
}

/// `ρ^n` with `n` the first index where the words disagree on their common
/// range; 0 if they agree there.
pub fn d_rho(xi: &Itinerary, eta: &Itinerary, rho: f64) -> f64 {
    match xi.0.iter().zip(&eta.0).position(|(a, b)| a != b) {
        Some(n) => rho.powi(n as i32),
        None => 0.0,
    }
}

/// `ρ = r0 / (1 + r0)`.
pub fn rho_for(r0: f64) -> f64 {
    r0 / (1.0 + r0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn admissibility() {
        assert!("11".parse::<Itinerary>().is_err());
        assert!("1231".parse::<Itinerary>().is_ok());
        assert!("124".parse::<Itinerary>().is_err());
        assert_eq!("121312".parse::<Itinerary>().unwrap().to_string(), "121312");
        assert!(Itinerary::alternating(1, 2, 5).unwrap().to_string() == "12121");
    }

    #[test]
    fn d_rho_examples() {
        let rho = rho_for(0.05);
        assert!((rho - 1.0 / 21.0).abs() < 1e-15);
        let a: Itinerary = "12312".parse().unwrap();
        let b: Itinerary = "12131".parse().unwrap();
        assert_eq!(d_rho(&a, &a, rho), 0.0);
        assert_eq!(d_rho(&a, &"21".parse().unwrap(), rho), 1.0);
        assert!((d_rho(&a, &b, rho) - 0.002_267_573_696_145_124).abs() < 1e-15);
    }

    #[test]
    fn random_words_are_admissible() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let w = Itinerary::random(&mut rng, 40, Some(2));
            assert!(Itinerary::new(w.symbols().to_vec()).is_ok());
            assert_ne!(w.symbols()[0], 2);
        }
    }

    fn word(len: usize) -> impl Strategy<Value = Itinerary> {
        (any::<u64>()).prop_map(move |s| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
            Itinerary::random(&mut rng, len, None)
        })
    }

    proptest! {
        #[test]
        fn d_rho_is_ultrametric(a in word(12), b in word(12), c in word(12)) {
            let rho = 1.0 / 21.0;
            let ac = d_rho(&a, &c, rho);
            prop_assert!(ac <= d_rho(&a, &b, rho).max(d_rho(&b, &c, rho)));
        }
    }
}
