use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use clap::Args;
use geocatch::analysis::{
    dichotomy_check, disk_structure, occupancy, star_discrepancy, subsequence_grc, traced_disk_angles,
};
use geocatch::catcher::{random_path, synthesize_schedule, CatcherPath};
use geocatch::evader::{evade, verify_evasion};
use geocatch::flow::{trace, RayState, Trajectory};
use geocatch::geometry::{wrap_centered, Direction, Point2, Scene};
use geocatch::io::{render_svg, write_path_csv, write_trajectory_csv, write_witness_csv, Overlay};
use geocatch::symbolic::{itinerary_of, realize, solve_itinerary, Itinerary};
use geocatch::tgcc::{check_tgcc_seeded, first_hit_on, Sample};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{pick, positive, read, Common, Envelope, Pt, Resolved};
use crate::Failure;

/// Dyadic sites offered to the catcher schedule.
const CATCHER_SITES: usize = 1 << 12;
/// Witnesses listed in `tgcc.json`; all of them go to `witnesses.csv`.
const LISTED_WITNESSES: usize = 100;

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    let p = dir.join(name);
    fs::write(&p, bytes).map_err(|e| Failure::io(format!("{}: {e}", p.display())))
}

fn write_json<C: Serialize, R: Serialize>(dir: &Path, command: &str, config: C, result: R) -> Result<(), Failure> {
    let env = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| Failure::io(e.to_string()))?;
    text.push('\n');
    write(dir, &format!("{command}.json"), text.as_bytes())
}

fn csv_bytes<F>(f: F) -> Result<Vec<u8>, Failure>
where
    F: FnOnce(&mut Vec<u8>) -> geocatch::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn default_eps_v(scene: &Scene) -> (f64, f64) {
    if scene.as_obstacle().is_some() {
        (0.05, 0.01)
    } else {
        (0.2, 0.05)
    }
}

/// A point a little off the middle of the scene.
fn default_start(scene: &Scene) -> Point2 {
    match scene {
        // the horizontal two-circle orbit, exact in floating point
        Scene::Obstacle(o) => o.center(2).lerp(o.center(3), 0.5),
        _ => {
            let (lo, hi) = scene.bounding_box();
            let size = hi - lo;
            Point2::new(lo.x + 0.3 * size.x, lo.y + 0.4 * size.y)
        }
    }
}

fn default_angle(scene: &Scene, start: Point2) -> f64 {
    match scene {
        Scene::Obstacle(o) => Direction::from_vector(o.center(3) - start).map_or(0.0, |d| d.angle()),
        _ => (2f64.sqrt() - 1.0).atan(),
    }
}

fn obstacle_word(tr: &Trajectory) -> String {
    tr.obstacle_bounces()
        .filter_map(|e| e.wall.obstacle_index())
        .map(|j| char::from(b'0' + j))
        .collect()
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Start point `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<Pt>,
    /// Initial direction, radians counter-clockwise from the x-axis.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    #[arg(long)]
    pub max_bounces: Option<usize>,
}

#[derive(Serialize)]
struct SimulateConfig {
    scene: Scene,
    start: Point2,
    angle: f64,
    horizon: f64,
    max_bounces: usize,
}

#[derive(Serialize)]
struct SimulateResult {
    events: usize,
    end_time: f64,
    end_position: Point2,
    end_angle: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    itinerary: Option<String>,
    /// Extremes of the gaps between consecutive obstacle bounces.
    #[serde(skip_serializing_if = "Option::is_none")]
    bounce_interval: Option<(f64, f64)>,
}

pub fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let r = Resolved::new(a.common, Scene::default_obstacle())?;
    let scene = r.scene;
    let start = a.start.or(r.file.start).map_or(default_start(&scene), Point2::from);
    let angle = pick(a.angle, r.file.angle, default_angle(&scene, start));
    let cfg = SimulateConfig {
        scene,
        start,
        angle,
        horizon: positive("horizon", r.horizon(10.0))?,
        max_bounces: pick(a.max_bounces, r.file.max_bounces, 1_000_000),
    };
    let tr = trace(
        &scene,
        RayState::new(start, Direction::from_angle(angle), 0.0),
        cfg.horizon,
        cfg.max_bounces,
    )?;
    let end = tr.position_at(tr.horizon)?;
    let end_angle = tr.events.last().map_or(tr.start.dir, |e| e.outgoing).angle();
    let times: Vec<f64> = tr.obstacle_bounces().map(|e| e.time).collect();
    let gaps = times.windows(2).map(|w| w[1] - w[0]);
    let bounce_interval = (times.len() >= 2).then(|| {
        gaps.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| (lo.min(g), hi.max(g)))
    });
    let res = SimulateResult {
        events: tr.events.len(),
        end_time: tr.horizon,
        end_position: scene.canonical(end),
        end_angle,
        itinerary: scene.as_obstacle().map(|_| obstacle_word(&tr)),
        bounce_interval,
    };
    let out = r.out();
    write(&out, "trajectory.csv", &csv_bytes(|b| write_trajectory_csv(&tr, b))?)?;
    let overlay = Overlay {
        trajectories: vec![&tr],
        ..Default::default()
    };
    write(&out, "trajectory.svg", render_svg(&scene, &overlay).as_bytes())?;
    write_json(&out, "simulate", cfg, res)
}

#[derive(Debug, Clone, Args)]
pub struct ItineraryArgs {
    #[command(flatten)]
    pub common: Common,
    /// Admissible word over {1,2,3}, e.g. 12312.
    #[arg(long)]
    pub word: Option<String>,
    /// Start point `x,y` inside the triangle of centers.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<Pt>,
}

#[derive(Serialize)]
struct ItineraryConfig {
    scene: Scene,
    start: Point2,
    word: Itinerary,
}

#[derive(Serialize)]
struct Bounce {
    obstacle: u8,
    time: f64,
    point: Point2,
}

#[derive(Serialize)]
struct ItineraryResult {
    /// Initial angles realizing the word, as decimal strings of the
    /// high-precision endpoints.
    interval: (String, String),
    interval_f64: (f64, f64),
    width: f64,
    angle: f64,
    realized: String,
    verified: bool,
    bounces: Vec<Bounce>,
}

pub fn itinerary(a: ItineraryArgs) -> Result<(), Failure> {
    let r = Resolved::new(a.common, Scene::default_obstacle())?;
    let scene = r.scene;
    let o = *scene
        .as_obstacle()
        .ok_or_else(|| Failure::invalid("itineraries need the obstacle scene"))?;
    let word: Itinerary = a
        .word
        .or(r.file.word.clone())
        .ok_or_else(|| Failure::invalid("--word is required"))?
        .parse()?;
    let start = a.start.or(r.file.start).map_or(o.centroid(), Point2::from);
    let iv = solve_itinerary(&scene, start, &word)?;
    let tr = realize(&scene, start, &word)?;
    let realized = itinerary_of(&tr, word.len())?;
    let res = ItineraryResult {
        interval: (iv.lo.to_string(), iv.hi.to_string()),
        interval_f64: (iv.lo_f64(), iv.hi_f64()),
        width: iv.width_f64(),
        angle: tr.start.dir.angle(),
        verified: realized == word,
        realized: realized.to_string(),
        bounces: tr
            .obstacle_bounces()
            .filter_map(|e| {
                e.wall.obstacle_index().map(|j| Bounce {
                    obstacle: j,
                    time: e.time,
                    point: e.point,
                })
            })
            .collect(),
    };
    let verified = res.verified;
    let out = r.out();
    write(&out, "trajectory.csv", &csv_bytes(|b| write_trajectory_csv(&tr, b))?)?;
    let overlay = Overlay {
        trajectories: vec![&tr],
        zones: true,
        ..Default::default()
    };
    write(&out, "trajectory.svg", render_svg(&scene, &overlay).as_bytes())?;
    write_json(&out, "itinerary", ItineraryConfig { scene, start, word }, res)?;
    if verified {
        Ok(())
    } else {
        Err(Failure::other("realized itinerary differs from the requested word"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CatchArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct CatchConfig {
    scene: Scene,
    eps: f64,
    v: f64,
    #[serde(rename = "T")]
    t: f64,
    sites: usize,
}

#[derive(Serialize)]
struct StepOut {
    ordinal: u32,
    site: usize,
    center: Point2,
    arrival: f64,
    departure: f64,
}

#[derive(Serialize)]
struct CatchResult {
    steps: Vec<StepOut>,
    parked_fraction: f64,
    waypoints: usize,
    max_speed: f64,
}

fn catch_config(r: &Resolved) -> Result<CatchConfig, Failure> {
    let (eps, v) = default_eps_v(&r.scene);
    Ok(CatchConfig {
        scene: r.scene,
        eps: positive("eps", r.eps(eps))?,
        v: positive("v", r.v(v))?,
        t: positive("T", r.t(1e8))?,
        sites: CATCHER_SITES,
    })
}

fn catcher_path(cfg: &CatchConfig) -> Result<(geocatch::catcher::StepSchedule, CatcherPath), Failure> {
    if cfg.scene.as_obstacle().is_some() {
        return Err(Failure::invalid("the parking catcher needs a torus, rectangle or disk"));
    }
    let sched = synthesize_schedule(cfg.sites, cfg.v, &cfg.scene, cfg.t)?;
    let path = sched.to_path(&cfg.scene, cfg.eps)?;
    Ok((sched, path))
}

pub fn catch(a: CatchArgs) -> Result<(), Failure> {
    let r = Resolved::new(a.common, Scene::torus(1.0)?)?;
    let cfg = catch_config(&r)?;
    let (sched, path) = catcher_path(&cfg)?;
    let res = CatchResult {
        steps: sched
            .steps
            .iter()
            .map(|s| StepOut {
                ordinal: s.ordinal,
                site: s.site,
                center: sched.sites[s.site - 1],
                arrival: s.arrival,
                departure: s.departure,
            })
            .collect(),
        parked_fraction: sched.parked_fraction(),
        waypoints: path.waypoints.len(),
        max_speed: path.max_speed(),
    };
    let out = r.out();
    write(&out, "path.csv", &csv_bytes(|b| write_path_csv(&path, b))?)?;
    write(&out, "path.json", path_json(&path)?.as_bytes())?;
    let overlay = Overlay {
        path: Some(&path),
        ..Default::default()
    };
    write(&out, "catch.svg", render_svg(&cfg.scene, &overlay).as_bytes())?;
    write_json(&out, "catch", cfg, res)
}

fn path_json(path: &CatcherPath) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(path).map_err(|e| Failure::io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Where the ball of `tgcc` and `evade` comes from.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Ball {
    Catcher,
    Static { center: Point2 },
    Random { seed: u64, reach: f64 },
    File { path: String },
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    /// catcher | static | random; ignored when --path is given.
    #[arg(long)]
    pub ball: Option<String>,
    /// Ball path as JSON (the `path.json` written by `catch`).
    #[arg(long)]
    pub path: Option<std::path::PathBuf>,
    /// Center of the static ball.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<Pt>,
    /// Random waypoints are drawn within this distance of the origin.
    #[arg(long)]
    pub reach: Option<f64>,
}

#[derive(Serialize)]
struct BallConfig {
    ball: Ball,
    eps: f64,
    v: f64,
    #[serde(rename = "T")]
    t: f64,
}

fn resolve_ball(r: &Resolved, a: &BallArgs, default_kind: &str) -> Result<(BallConfig, CatcherPath), Failure> {
    let (eps, v) = default_eps_v(&r.scene);
    let eps = positive("eps", r.eps(eps))?;
    let v = positive("v", r.v(v))?;
    if let Some(p) = a.path.clone().or(r.file.path.clone()) {
        let loaded: CatcherPath =
            serde_json::from_str(&read(&p)?).map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))?;
        let path = CatcherPath::new(loaded.waypoints, loaded.eps, loaded.v)?;
        let cfg = BallConfig {
            ball: Ball::File {
                path: p.display().to_string(),
            },
            eps: path.eps,
            v: path.v,
            t: path.end_time(),
        };
        return Ok((cfg, path));
    }
    let kind = pick(a.ball.clone(), r.file.ball.clone(), default_kind.to_string());
    let t_default = if kind == "catcher" { 1e8 } else { 200.0 };
    let t = positive("T", r.t(t_default))?;
    let (ball, path) = match kind.as_str() {
        "catcher" => {
            let cfg = CatchConfig {
                scene: r.scene,
                eps,
                v,
                t,
                sites: CATCHER_SITES,
            };
            (Ball::Catcher, catcher_path(&cfg)?.1)
        }
        "static" => {
            let (lo, hi) = r.scene.bounding_box();
            let center = a.center.or(r.file.center).map_or(lo.lerp(hi, 0.5), Point2::from);
            (Ball::Static { center }, CatcherPath::parked(center, eps, v, t)?)
        }
        "random" => {
            let seed = r.seed();
            let reach = positive("reach", pick(a.reach, r.file.reach, 0.8))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let path = random_path(&mut rng, &r.scene, eps, v, t, reach)?;
            (Ball::Random { seed, reach }, path)
        }
        other => return Err(Failure::invalid(format!("unknown ball kind {other:?}"))),
    };
    Ok((BallConfig { ball, eps, v, t }, path))
}

#[derive(Debug, Clone, Args)]
pub struct TgccArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub ball: BallArgs,
    /// Also test the evader's geodesic against the ball (obstacle scene).
    #[arg(long)]
    pub evader: bool,
}

#[derive(Serialize)]
struct TgccConfig {
    scene: Scene,
    #[serde(flatten)]
    ball: BallConfig,
    horizon: f64,
    grid_pos: usize,
    grid_ang: usize,
    evader: bool,
}

#[derive(Serialize)]
struct EvaderSample {
    start: Point2,
    angle: f64,
    first_hit: Option<f64>,
    among_witnesses: bool,
}

#[derive(Serialize)]
struct TgccResult {
    samples: usize,
    caught: usize,
    caught_fraction: f64,
    t0_estimate: Option<f64>,
    witness_count: usize,
    witnesses: Vec<Sample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evader: Option<EvaderSample>,
    note: &'static str,
}

pub fn tgcc(a: TgccArgs) -> Result<(), Failure> {
    let r = Resolved::new(a.common, Scene::torus(1.0)?)?;
    let scene = r.scene;
    let default_kind = if scene.as_obstacle().is_some() { "random" } else { "catcher" };
    let (ball, path) = resolve_ball(&r, &a.ball, default_kind)?;
    let use_evader = a.evader || r.file.evader.unwrap_or(false);
    let cfg = TgccConfig {
        scene,
        horizon: positive("horizon", r.horizon(path.end_time()))?,
        ball,
        grid_pos: r.grid_pos(32),
        grid_ang: r.grid_ang(256),
        evader: use_evader,
    };
    let cert = if use_evader {
        if scene.as_obstacle().is_none() {
            return Err(Failure::invalid("--evader needs the obstacle scene"));
        }
        Some(evade(&path, cfg.horizon, &scene)?)
    } else {
        None
    };
    let seeds: Vec<Trajectory> = cert.iter().map(|c| c.geodesic.clone()).collect();
    let rep = check_tgcc_seeded(&scene, &path, cfg.horizon, cfg.grid_pos, cfg.grid_ang, &seeds)?;
    let evader = cert.as_ref().map(|c| {
        let first_hit = first_hit_on(&c.geodesic, &path, cfg.horizon);
        EvaderSample {
            start: c.start,
            angle: c.start_angle,
            first_hit,
            among_witnesses: rep
                .witnesses
                .iter()
                .any(|w| w.seeded && w.pos == c.start && w.angle == c.start_angle),
        }
    });
    let samples = rep.samples.len();
    let caught = rep.first_hit_times.iter().filter(|t| t.is_some()).count();
    let res = TgccResult {
        samples,
        caught,
        caught_fraction: rep.caught_fraction,
        t0_estimate: rep.t0_estimate,
        witness_count: rep.witnesses.len(),
        witnesses: rep.witnesses.iter().take(LISTED_WITNESSES).copied().collect(),
        evader,
        note: rep.note,
    };
    let refuted = caught < samples;
    let out = r.out();
    write(&out, "witnesses.csv", &csv_bytes(|b| write_witness_csv(&rep, b))?)?;
    let overlay = Overlay {
        trajectories: cert.iter().map(|c| &c.geodesic).collect(),
        path: Some(&path),
        zones: scene.as_obstacle().is_some(),
    };
    write(&out, "tgcc.svg", render_svg(&scene, &overlay).as_bytes())?;
    write_json(&out, "tgcc", cfg, res)?;
    if refuted {
        Err(Failure::refuted(format!(
            "{} of {samples} samples never meet the ball",
            samples - caught
        )))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvadeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub ball: BallArgs,
}

#[derive(Serialize)]
struct EvadeConfig {
    scene: Scene,
    #[serde(flatten)]
    ball: BallConfig,
}

#[derive(Serialize)]
struct EvadeResult {
    certificate: geocatch::evader::EvasionCertificate,
    /// `|T'_j − T_j|` per switch.
    switch_deviations: Vec<f64>,
    max_deviation: f64,
    verified: bool,
}

pub fn evade_cmd(a: EvadeArgs) -> Result<(), Failure> {
    let r = Resolved::new(a.common, Scene::default_obstacle())?;
    let scene = r.scene;
    if scene.as_obstacle().is_none() {
        return Err(Failure::invalid("the evader needs the obstacle scene"));
    }
    let (ball, path) = resolve_ball(&r, &a.ball, "random")?;
    let horizon = ball.t;
    let cert = evade(&path, horizon, &scene)?;
    let verified = verify_evasion(&cert, &path, horizon);
    let switch_deviations: Vec<f64> = cert
        .schedule
        .times
        .iter()
        .zip(&cert.realized_switches)
        .map(|(t, s)| (s - t).abs())
        .collect();
    let max_deviation = switch_deviations.iter().copied().fold(0.0, f64::max);
    let out = r.out();
    write(&out, "geodesic.csv", &csv_bytes(|b| write_trajectory_csv(&cert.geodesic, b))?)?;
    write(&out, "path.csv", &csv_bytes(|b| write_path_csv(&path, b))?)?;
    let overlay = Overlay {
        trajectories: vec![&cert.geodesic],
        path: Some(&path),
        zones: true,
    };
    write(&out, "evade.svg", render_svg(&scene, &overlay).as_bytes())?;
    let res = EvadeResult {
        certificate: cert,
        switch_deviations,
        max_deviation,
        verified,
    };
    write_json(&out, "evade", EvadeConfig { scene, ball }, res)?;
    if verified {
        Ok(())
    } else {
        Err(Failure::evasion("certified distance fell below eps"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct GrcArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<Pt>,
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    /// Center of the test ball.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<Pt>,
    /// Radius of the test ball.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Disk: angle between chords and the boundary tangent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Disk: first boundary angle.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    /// Disk: number of bounces.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum GrcConfig {
    Flat {
        scene: Scene,
        start: Point2,
        angle: f64,
        center: Point2,
        radius: f64,
        horizon: f64,
    },
    Disk {
        scene: Scene,
        alpha: f64,
        theta0: f64,
        n: usize,
    },
}

#[derive(Serialize)]
struct DiskResult {
    #[serde(flatten)]
    report: geocatch::analysis::DiskReport,
    /// `(n, discrepancy)` over growing prefixes.
    discrepancy_series: Vec<(usize, f64)>,
    /// Largest gap between the closed form and the traced flow, over the
    /// first bounces.
    traced_deviation: f64,
}

/// `10, 100, …` up to `h`, then `h` itself.
fn decades(h: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (1..).map(|k| 10f64.powi(k)).take_while(|&x| x < h).collect();
    v.push(h);
    v
}

pub fn grc(a: GrcArgs) -> Result<(), Failure> {
    let r = Resolved::new(a.common, Scene::torus(1.0)?)?;
    let scene = r.scene;
    let out = r.out();
    match scene {
        Scene::Torus { .. } | Scene::Rectangle { .. } => {
            let start = a.start.or(r.file.start).map_or(default_start(&scene), Point2::from);
            let angle = pick(a.angle, r.file.angle, default_angle(&scene, start));
            let (lo, hi) = scene.bounding_box();
            let center = a.center.or(r.file.center).map_or(lo.lerp(hi, 0.5), Point2::from);
            let radius = positive("radius", pick(a.radius, r.file.radius, 0.1))?;
            let horizon = positive("horizon", r.horizon(1e4))?;
            let dir = Direction::from_angle(angle);
            let dicho = dichotomy_check(&scene, start, dir, center, radius, horizon)?;
            let tr = trace(&scene, RayState::new(start, dir, 0.0), horizon, usize::MAX)?;
            let series = occupancy(&tr, center, radius, &decades(horizon))?;
            let sub = subsequence_grc(&tr, radius, &decades(horizon))?;
            write(
                &out,
                "occupancy.csv",
                &csv_bytes(|b| geocatch::io::write_occupancy_csv(&series, b))?,
            )?;
            let overlay = Overlay {
                trajectories: vec![&tr],
                ..Default::default()
            };
            write(&out, "grc.svg", render_svg(&scene, &overlay).as_bytes())?;
            #[derive(Serialize)]
            struct FlatResult {
                dichotomy: geocatch::analysis::DichotomyReport,
                occupancy: geocatch::analysis::OccupancySeries,
                subsequence: geocatch::analysis::SubsequenceReport,
            }
            let cfg = GrcConfig::Flat {
                scene,
                start,
                angle,
                center,
                radius,
                horizon,
            };
            let res = FlatResult {
                dichotomy: dicho,
                occupancy: series,
                subsequence: sub,
            };
            write_json(&out, "grc", cfg, res)
        }
        Scene::Disk { .. } => {
            let alpha = pick(a.alpha, r.file.alpha, PI / 3.0);
            let theta0 = pick(a.theta0, r.file.theta0, 0.0);
            let n = pick(a.n, r.file.n, 1000);
            if n < 2 {
                return Err(Failure::invalid("--n must be at least 2"));
            }
            let report = disk_structure(alpha, theta0, n)?;
            let folded: Vec<f64> = report.angles.iter().map(|t| t.rem_euclid(PI) / PI).collect();
            let discrepancy_series = decades(n as f64)
                .into_iter()
                .map(|m| (m as usize, star_discrepancy(&folded[..m as usize])))
                .collect();
            // the traced flow starts mid-chord, so its first bounce is θ_1
            let traced = traced_disk_angles(alpha, theta0, n.min(200) - 1)?;
            let traced_deviation = traced
                .iter()
                .zip(&report.angles[1..])
                .map(|(x, y)| wrap_centered(x - y, 2.0 * PI).abs())
                .fold(0.0, f64::max);
            let res = DiskResult {
                report,
                discrepancy_series,
                traced_deviation,
            };
            write_json(&out, "grc", GrcConfig::Disk { scene, alpha, theta0, n }, res)
        }
        Scene::Obstacle(_) => Err(Failure::invalid("grc needs a torus, rectangle or disk")),
    }
}
