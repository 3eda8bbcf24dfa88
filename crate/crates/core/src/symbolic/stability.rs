//! Empirical check of the bounce-time stability of geodesics sharing an
//! itinerary prefix.

use f256::f256;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::solver::{precise_bounces, solve_itinerary};
use super::{rho_for, Itinerary};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Scene};
use crate::symbolic::to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityOptions {
    pub trials: usize,
    /// Random symbols appended after the shared prefix.
    pub continuation: usize,
    /// Start points are drawn uniformly from this disc around the centroid.
    pub start_radius: f64,
    pub seed: u64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            trials: 50,
            continuation: 10,
            start_radius: 0.2,
            seed: 0,
        }
    }
}

/// One pair of geodesics sharing the prefix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSample {
    pub prefix: Itinerary,
    pub start_a: Point2,
    pub start_b: Point2,
    pub word_a: Itinerary,
    pub word_b: Itinerary,
    /// `|(t_{n-1} - t_0) - (t'_{n-1} - t'_0)|` for a prefix of length `n`.
    pub spread: f64,
    /// `|(t_{k+1} - t_k) - (t'_{k+1} - t'_k)|` for `k < n - 1`.
    pub interval_spreads: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// The shared prefix, or `None` when each pair drew its own.
    pub word: Option<Itinerary>,
    pub depth: usize,
    pub r0: f64,
    pub rho: f64,
    /// `3 r0`, the bound with unit constant.
    pub bound: f64,
    pub options: StabilityOptions,
    pub max_spread: f64,
    pub within_bound: bool,
    /// Largest interval spread over all pairs, per depth.
    pub per_depth_max: Vec<f64>,
    /// Depths `[first, last]` used for the log-linear fit.
    pub fit_range: (usize, usize),
    pub fit_slope: f64,
    pub log_rho: f64,
    /// `fit_slope / ln ρ`.
    pub slope_ratio: f64,
    pub pairs: Vec<PairSample>,
}

fn random_start(rng: &mut ChaCha8Rng, radius: f64) -> Point2 {
    loop {
        let p = Point2::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
        if p.norm() <= radius {
            return p;
        }
    }
}

fn bounce_times(scene: &Scene, a: Point2, word: &Itinerary) -> Result<Vec<f256>> {
    let iv = solve_itinerary(scene, a, word)?;
    Ok(precise_bounces(scene, a, iv.mid(), word)?
        .into_iter()
        .map(|b| b.time)
        .collect())
}

fn sample_pair(scene: &Scene, w: Option<&Itinerary>, depth: usize, opts: &StabilityOptions, k: usize) -> Result<PairSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(k as u64);
    let w = match w {
        Some(w) => w.clone(),
        None => Itinerary::random(&mut rng, depth, None),
    };
    let start_a = random_start(&mut rng, opts.start_radius);
    let start_b = random_start(&mut rng, opts.start_radius);
    let word_a = w.concat(&Itinerary::random(&mut rng, opts.continuation, w.last()))?;
    let word_b = w.concat(&Itinerary::random(&mut rng, opts.continuation, w.last()))?;
    let ta = bounce_times(scene, start_a, &word_a)?;
    let tb = bounce_times(scene, start_b, &word_b)?;
    let n = w.len();
    let spread = to_f64(((ta[n - 1] - ta[0]) - (tb[n - 1] - tb[0])).abs());
    let interval_spreads = (0..n - 1)
        .map(|k| to_f64(((ta[k + 1] - ta[k]) - (tb[k + 1] - tb[k])).abs()))
        .collect();
    Ok(PairSample {
        prefix: w,
        start_a,
        start_b,
        word_a,
        word_b,
        spread,
        interval_spreads,
    })
}

/// Least-squares slope of `ln y` against `x`.
fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), &(x, y)| {
        (num + (x - mx) * (y.ln() - my), den + (x - mx) * (x - mx))
    });
    num / den
}

/// Samples pairs of geodesics sharing the prefix `w` (different start points
/// near the centroid and different random continuations) and measures how far
/// apart their bounce times drift.
pub fn measure_stability(scene: &Scene, w: &Itinerary, opts: StabilityOptions) -> Result<StabilityReport> {
    scene
        .as_obstacle()
        .ok_or_else(|| Error::UnsupportedScene("stability needs the obstacle scene".into()))?;
    if w.len() < 2 {
        return Err(Error::InvalidArgument("prefix needs at least two symbols".into()));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    run(scene, Some(w), w.len(), opts)
}

/// Like [`measure_stability`], but every pair shares its own random prefix of
/// length `depth`. Averages out words whose geometry is atypical, such as
/// the alternating ones which bounce at normal incidence.
pub fn measure_stability_random(scene: &Scene, depth: usize, opts: StabilityOptions) -> Result<StabilityReport> {
    if scene.as_obstacle().is_none() {
        return Err(Error::UnsupportedScene("stability needs the obstacle scene".into()));
    }
    if depth < 2 {
        return Err(Error::InvalidArgument("prefix needs at least two symbols".into()));
    }
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    run(scene, None, depth, opts)
}

fn run(scene: &Scene, w: Option<&Itinerary>, n: usize, opts: StabilityOptions) -> Result<StabilityReport> {
    let o = *scene.as_obstacle().expect("checked by callers");
    let pairs: Vec<PairSample> = (0..opts.trials)
        .into_par_iter()
        .map(|k| sample_pair(scene, w, n, &opts, k))
        .collect::<Result<_>>()?;
    let per_depth_max: Vec<f64> = (0..n - 1)
        .map(|k| pairs.iter().map(|p| p.interval_spreads[k]).fold(0.0, f64::max))
        .collect();
    // the early depths, where the differing starts dominate
    let last = ((n - 1) / 2).saturating_sub(1).max(1).min(n - 2);
    let fit_range = (0, last);
    let pts: Vec<(f64, f64)> = (fit_range.0..=fit_range.1)
        .filter(|&k| per_depth_max[k] > 0.0)
        .map(|k| (k as f64, per_depth_max[k]))
        .collect();
    let fit_slope = if pts.len() >= 2 { log_slope(&pts) } else { f64::NAN };
    let rho = rho_for(o.r0);
    let bound = 3.0 * o.r0;
    let max_spread = pairs.iter().map(|p| p.spread).fold(0.0, f64::max);
    Ok(StabilityReport {
        word: w.cloned(),
        depth: n,
        r0: o.r0,
        rho,
        bound,
        options: opts,
        max_spread,
        within_bound: max_spread <= bound,
        per_depth_max,
        fit_range,
        fit_slope,
        log_rho: rho.ln(),
        slope_ratio: fit_slope / rho.ln(),
        pairs,
    })
}

/// [`measure_stability`], failing with the offending pair when some spread
/// exceeds `3 r0`.
pub fn stability_report(scene: &Scene, w: &Itinerary, opts: StabilityOptions) -> Result<StabilityReport> {
    check(measure_stability(scene, w, opts)?)
}

/// [`measure_stability_random`] with the same failure rule.
pub fn stability_report_random(scene: &Scene, depth: usize, opts: StabilityOptions) -> Result<StabilityReport> {
    check(measure_stability_random(scene, depth, opts)?)
}

fn check(report: StabilityReport) -> Result<StabilityReport> {
    if let Some(p) = report.pairs.iter().find(|p| p.spread > report.bound) {
        return Err(Error::StabilityViolation(format!(
            "spread {} > {} for starts {} / {} with words {} / {}",
            p.spread, report.bound, p.start_a, p.start_b, p.word_a, p.word_b
        )));
    }
    Ok(report)
}
