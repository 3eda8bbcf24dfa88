//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use geocatch::analysis::{disk_structure, occupancy, traced_disk_angles};
use geocatch::catcher::{build_catcher, random_path, CatcherPath};
use geocatch::evader::evade;
use geocatch::flow::{flow_torus, trace, RayState, Wall};
use geocatch::geometry::{Direction, Point2, Scene};
use geocatch::symbolic::{itinerary_of, measure_stability_random, realize, rho_for, Itinerary, StabilityOptions};
use geocatch::tgcc::{check_tgcc, check_tgcc_seeded};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_geocatch");

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(failures: &mut Vec<String>, ok: bool, what: String) {
    if !ok {
        failures.push(what);
    }
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { ok: true, detail: summary }
    } else {
        Outcome {
            ok: false,
            detail: format!("{summary}; {}", failures.join("; ")),
        }
    }
}

fn run_cli(args: &[&str], out: &Path, threads: Option<&str>) -> (i32, Option<Value>) {
    let mut cmd = Command::new(BIN);
    cmd.args(args).arg("--out").arg(out);
    if let Some(n) = threads {
        cmd.env("GEOCATCH_THREADS", n);
    }
    let st = cmd.output().expect("run geocatch");
    let name = args[0];
    let json = std::fs::read_to_string(out.join(format!("{name}.json")))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok());
    (st.status.code().unwrap_or(-1), json)
}

/// Triangle-wave fold of the unfolded coordinate into `[0, w]`.
fn fold(u: f64, w: f64) -> f64 {
    let m = u.rem_euclid(2.0 * w);
    if m > w {
        2.0 * w - m
    } else {
        m
    }
}

/// Times in `(0, h]` at which `x0 + t d` crosses a multiple of `w`.
fn crossings(x0: f64, d: f64, w: f64, h: f64) -> Vec<f64> {
    if d == 0.0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut k = if d > 0.0 { (x0 / w).floor() + 1.0 } else { (x0 / w).ceil() - 1.0 };
    loop {
        let t = (k * w - x0) / d;
        if t > h {
            return out;
        }
        out.push(t);
        k += d.signum();
    }
}

fn a1() -> Outcome {
    let mut f = Vec::new();
    let s = Scene::default_obstacle();
    let o = *s.as_obstacle().unwrap();
    let m = o.center(2).lerp(o.center(3), 0.5);
    let tr = trace(&s, RayState::at_angle(m, 0.0), f64::INFINITY, 10_000).unwrap();
    check(&mut f, tr.events.len() == 10_000, format!("{} bounces", tr.events.len()));
    let worst = tr
        .events
        .windows(2)
        .map(|w| (w[1].time - w[0].time - 1.0).abs())
        .fold(0.0, f64::max);
    check(&mut f, worst <= 1e-9, format!("period-2 interval error {worst:e}"));
    let alternates = tr.events.iter().enumerate().all(|(k, e)| {
        e.wall == Wall::Obstacle(if k % 2 == 0 { 3 } else { 2 })
    });
    check(&mut f, alternates, "period-2 orbit leaves the circles 2, 3".into());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut rect_err: f64 = 0.0;
    let mut count_mismatch = 0;
    for _ in 0..100 {
        let (w, h) = (rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0));
        let sc = Scene::rectangle(w, h).unwrap();
        let p = Point2::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
        let th: f64 = rng.gen_range(0.0..TAU);
        let horizon = 50.0;
        let tr = trace(&sc, RayState::at_angle(p, th), horizon, usize::MAX).unwrap();
        let (dx, dy) = (th.cos(), th.sin());
        let mut want: Vec<f64> = crossings(p.x, dx, w, horizon);
        want.extend(crossings(p.y, dy, h, horizon));
        want.sort_by(f64::total_cmp);
        if want.len() != tr.events.len() {
            count_mismatch += 1;
            continue;
        }
        for (e, t) in tr.events.iter().zip(&want) {
            rect_err = rect_err.max((e.time - t).abs());
            let q = Point2::new(fold(p.x + e.time * dx, w), fold(p.y + e.time * dy, h));
            rect_err = rect_err.max(q.distance(e.point));
        }
        for k in 0..=100 {
            let t = horizon * k as f64 / 100.0;
            let q = Point2::new(fold(p.x + t * dx, w), fold(p.y + t * dy, h));
            rect_err = rect_err.max(q.distance(tr.position_at(t).unwrap()));
        }
    }
    check(&mut f, count_mismatch == 0, format!("{count_mismatch} rectangle traces miss bounces"));
    check(&mut f, rect_err <= 1e-9, format!("rectangle unfolding error {rect_err:e}"));
    outcome(f, format!("period-2 error {worst:.1e}, rectangle error {rect_err:.1e}"))
}

fn a2() -> Outcome {
    let mut f = Vec::new();
    let s = Scene::default_obstacle();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..200 {
        let w = Itinerary::random(&mut rng, 30, None);
        let start = loop {
            let p = Point2::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
            if p.norm() <= 0.2 {
                break p;
            }
        };
        let tr = realize(&s, start, &w).unwrap();
        let walls: Vec<u8> = tr.obstacle_bounces().filter_map(|e| e.wall.obstacle_index()).collect();
        let first_wall = tr.events.iter().take(30).all(|e| e.wall.obstacle_index().is_some());
        if !first_wall || walls.get(..30) != Some(w.symbols()) || itinerary_of(&tr, 30).ok() != Some(w.clone()) {
            mismatches += 1;
        }
    }
    check(&mut f, mismatches == 0, format!("{mismatches} of 200 words fail the round trip"));

    let opts = StabilityOptions {
        trials: 50,
        continuation: 10,
        start_radius: 0.2,
        seed: 20,
    };
    let rep = measure_stability_random(&s, 20, opts).unwrap();
    let bound = 3.0 * 0.05;
    check(&mut f, rep.max_spread <= bound, format!("spread {} > {bound}", rep.max_spread));
    let log_rho = rho_for(0.05).ln();
    check(
        &mut f,
        (log_rho - (1.0f64 / 21.0).ln()).abs() < 1e-12,
        "rho differs from 1/21".into(),
    );
    let ratio = rep.fit_slope / log_rho;
    check(
        &mut f,
        (ratio - 1.0).abs() <= 0.3,
        format!("fit slope {:.3} is {ratio:.3} × ln ρ, outside ±30%", rep.fit_slope),
    );
    outcome(
        f,
        format!(
            "200/200 words round-trip, max spread {:.2e} ≤ {bound:.2}, slope {:.3} vs ln ρ {:.3} (ratio {ratio:.3})",
            rep.max_spread, rep.fit_slope, log_rho
        ),
    )
}

/// Smallest raw distance from `p(t)` to the ball center sampled on `[0, t1)`.
fn sampled_gap(scene: &Scene, pos: impl Fn(f64) -> Point2, path: &CatcherPath, t1: f64, step: f64) -> f64 {
    let n = (t1 / step).ceil() as usize;
    (0..n)
        .map(|k| k as f64 * step)
        .filter(|&t| t < t1)
        .map(|t| scene.distance(pos(t), path.center(t).unwrap()))
        .fold(f64::INFINITY, f64::min)
}

fn a3(tmp: &Path) -> Outcome {
    let mut f = Vec::new();
    let s = Scene::torus(1.0).unwrap();
    let (eps, v, horizon) = (0.2, 0.05, 1e8);
    let path = build_catcher(&s, eps, v, horizon).unwrap();
    let speed = path
        .waypoints
        .windows(2)
        .map(|w| s.distance(w[0].1, w[1].1) / (w[1].0 - w[0].0))
        .fold(0.0, f64::max);
    check(&mut f, speed <= v, format!("path speed {speed} > {v}"));
    let rep = check_tgcc(&s, &path, horizon, 32, 256).unwrap();
    check(&mut f, rep.samples.len() == 32 * 32 * 256, format!("{} samples", rep.samples.len()));
    check(&mut f, rep.caught_fraction == 1.0, format!("caught fraction {}", rep.caught_fraction));
    check(&mut f, rep.t0_estimate.is_some_and(f64::is_finite), "t0 not finite".into());

    // spot-check reported first hits against the ball directly
    let mut bad_hits = 0;
    for k in (0..rep.samples.len()).step_by(1009) {
        let (sm, Some(t)) = (rep.samples[k], rep.first_hit_times[k]) else {
            continue;
        };
        let d = Direction::from_angle(sm.angle).vector();
        let pos = |t: f64| sm.pos + d * t;
        let at_hit = s.distance(pos(t), path.center(t).unwrap());
        let earlier = if t < 50.0 { sampled_gap(&s, pos, &path, t, 1e-3) } else { f64::INFINITY };
        // a start inside the open ball counts as caught at time 0
        let boundary_ok = if t == 0.0 { at_hit < eps } else { (at_hit - eps).abs() <= 1e-6 };
        if !boundary_ok || earlier < eps - 1e-9 {
            bad_hits += 1;
        }
    }
    check(&mut f, bad_hits == 0, format!("{bad_hits} reported hits disagree with the ball"));

    let parked = CatcherPath::parked(Point2::new(0.5, 0.5), eps, v, horizon).unwrap();
    let stat = check_tgcc(&s, &parked, horizon, 32, 256).unwrap();
    let axis: Vec<_> = stat
        .witnesses
        .iter()
        .filter(|w| (w.angle / (PI / 2.0)).fract() == 0.0)
        .collect();
    // an axis-parallel line misses the ball iff its offset from 0.5 is ≥ eps
    let genuine = axis.iter().all(|w| {
        let c = if (w.angle / PI).fract() == 0.0 { w.pos.y } else { w.pos.x };
        (c - 0.5).abs() >= eps
    });
    check(&mut f, stat.caught_fraction < 1.0, format!("static ball catches {}", stat.caught_fraction));
    check(&mut f, !axis.is_empty() && genuine, "static-ball witnesses are not axis-parallel misses".into());

    let (code, json) = run_cli(&["tgcc", "--scene", "torus"], &tmp.join("a3"), None);
    let cli_ok = code == 0
        && json.as_ref().is_some_and(|j| {
            j["result"]["caught_fraction"] == 1.0 && j["result"]["t0_estimate"].is_f64() && j["config"]["eps"] == 0.2
        });
    check(&mut f, cli_ok, format!("geocatch tgcc exit {code}"));
    outcome(
        f,
        format!(
            "caught {} of {}, t0 {:.4e}; static ball caught {:.4} with {} axis-parallel witnesses",
            rep.first_hit_times.iter().filter(|t| t.is_some()).count(),
            rep.samples.len(),
            rep.t0_estimate.unwrap_or(f64::NAN),
            stat.caught_fraction,
            axis.len()
        ),
    )
}

fn a4(tmp: &Path) -> Outcome {
    let mut f = Vec::new();
    let s = Scene::default_obstacle();
    let (eps, v, horizon) = (0.05, 0.01, 200.0);
    let mut worst_margin = f64::INFINITY;
    let mut worst_dev: f64 = 0.0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let path = random_path(&mut rng, &s, eps, v, horizon, 0.8).unwrap();
        let cert = match evade(&path, horizon, &s) {
            Ok(c) => c,
            Err(e) => {
                f.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        check(&mut f, cert.min_distance >= eps, format!("seed {seed}: certified {}", cert.min_distance));
        let g = &cert.geodesic;
        let raw = sampled_gap(&s, |t| g.position_at(t).unwrap(), &path, horizon, 7e-4);
        check(&mut f, raw >= eps, format!("seed {seed}: sampled distance {raw}"));
        worst_margin = worst_margin.min(raw - eps);
        check(
            &mut f,
            cert.realized_switches.len() == cert.schedule.times.len(),
            format!("seed {seed}: switch count"),
        );
        for (t, r) in cert.schedule.times.iter().zip(&cert.realized_switches) {
            worst_dev = worst_dev.max((r - t).abs());
        }
        let n = cert.itinerary.len().min(g.obstacle_bounces().count());
        check(
            &mut f,
            itinerary_of(g, n).ok().as_ref().map(|w| w.symbols()) == Some(&cert.itinerary.symbols()[..n]),
            format!("seed {seed}: traced itinerary differs"),
        );
        if seed < 10 {
            let rep = check_tgcc_seeded(&s, &path, horizon, 6, 8, std::slice::from_ref(g)).unwrap();
            let listed = rep.witnesses.iter().any(|w| w.seeded && w.pos == cert.start);
            check(&mut f, listed, format!("seed {seed}: evader start not among witnesses"));
        }
        let out = tmp.join(format!("a4-{seed}"));
        let seed_s = seed.to_string();
        let args = ["tgcc", "--scene", "obstacle", "--evader", "--seed", &seed_s, "--grid-pos", "6", "--grid-ang", "8"];
        let (code, json) = run_cli(&args, &out, None);
        let ev = json.as_ref().map(|j| j["result"]["evader"].clone());
        let cli_ok = code == 3
            && ev.as_ref().is_some_and(|e| {
                e["among_witnesses"] == true
                    && e["start"]["x"].as_f64() == Some(cert.start.x)
                    && e["start"]["y"].as_f64() == Some(cert.start.y)
            });
        check(&mut f, cli_ok, format!("seed {seed}: geocatch tgcc exit {code}"));
    }
    check(&mut f, worst_dev <= 3.0, format!("switch deviation {worst_dev}"));
    outcome(
        f,
        format!("50 paths evaded, worst sampled margin {worst_margin:.4}, worst switch deviation {worst_dev:.3}"),
    )
}

fn star(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - x).max(x - i as f64 / n);
    }
    d
}

fn chord_distance(a: f64, b: f64) -> f64 {
    let p = Point2::new(a.cos(), a.sin());
    let q = Point2::new(b.cos(), b.sin());
    p.cross(q).abs() / p.distance(q)
}

fn a5() -> Outcome {
    let mut f = Vec::new();
    let slope = 2f64.sqrt() - 1.0;
    let dir = Direction::from_vector(Point2::new(1.0, slope)).unwrap();
    let tr = flow_torus(1.0, Point2::new(0.1, 0.2), dir, 1e4).unwrap();
    let c = Point2::new(0.5, 0.5);
    let frac = occupancy(&tr, c, 0.1, &[1e4]).unwrap().fractions[0];
    let target = PI / 100.0;
    check(&mut f, (frac - target).abs() <= 0.01, format!("occupancy {frac}"));
    // independent midpoint-rule estimate
    let n = 10_000_000;
    let step = 1e4 / n as f64;
    let inside = (0..n)
        .filter(|&k| {
            let t = (k as f64 + 0.5) * step;
            let p = Point2::new(0.1 + t * dir.vector().x, 0.2 + t * dir.vector().y);
            Scene::Torus { side: 1.0 }.distance(p, c) < 0.1
        })
        .count();
    let sampled = inside as f64 / n as f64;
    check(&mut f, (sampled - frac).abs() <= 1e-4, format!("sampled occupancy {sampled} vs {frac}"));

    let tri = disk_structure(PI / 3.0, 0.3, 30).unwrap();
    check(&mut f, tri.periodic && tri.period == Some(3), format!("π/3 period {:?}", tri.period));
    check(&mut f, (tri.inner_radius - 0.5).abs() <= 1e-12, format!("inner radius {}", tri.inner_radius));
    let traced = traced_disk_angles(PI / 3.0, 0.3, 30).unwrap();
    let closes = traced.windows(4).all(|w| {
        let d = (w[3] - w[0]).rem_euclid(TAU);
        d.min(TAU - d) <= 1e-12
    });
    let tri_chords = traced.windows(2).map(|w| (chord_distance(w[0], w[1]) - 0.5).abs()).fold(0.0, f64::max);
    check(&mut f, closes, "traced π/3 orbit does not close after 3 bounces".into());
    check(&mut f, tri_chords <= 1e-12, format!("traced π/3 chord error {tri_chords:e}"));

    let alpha = 1.0;
    let n = 100_000;
    let rep = disk_structure(alpha, 0.0, n).unwrap();
    check(&mut f, !rep.periodic, "α = 1 reported periodic".into());
    let chord_err = rep
        .angles
        .windows(2)
        .map(|w| (chord_distance(w[0], w[1]) - alpha.cos()).abs())
        .fold(0.0, f64::max);
    check(&mut f, chord_err <= 1e-12, format!("chord error {chord_err:e}"));
    let traced = traced_disk_angles(alpha, 0.0, 200).unwrap();
    let traced_err = traced
        .windows(2)
        .map(|w| (chord_distance(w[0], w[1]) - alpha.cos()).abs())
        .fold(0.0, f64::max);
    check(&mut f, traced_err <= 1e-12, format!("traced chord error {traced_err:e}"));
    let folded: Vec<f64> = rep.angles.iter().map(|t| t.rem_euclid(PI) / PI).collect();
    let ds: Vec<f64> = [10, 100, 1000, 10_000, 100_000].iter().map(|&m| star(&folded[..m])).collect();
    let decreasing = ds.windows(2).all(|w| w[1] < w[0]);
    let ds_text = ds.iter().map(|d| format!("{d:.1e}")).collect::<Vec<_>>().join(" > ");
    check(&mut f, decreasing, format!("discrepancy not decreasing: {ds_text}"));
    outcome(
        f,
        format!(
            "occupancy {frac:.5} vs π/100 {target:.5}; π/3 radius {:.12}; chord error {chord_err:.1e}; discrepancy {ds_text}",
            tri.inner_radius
        ),
    )
}

fn a6(tmp: &Path) -> Outcome {
    let mut f = Vec::new();
    let runs: &[&[&str]] = &[
        &["simulate", "--horizon", "100"],
        &["itinerary", "--word", "123123121323121232313123132312"],
        &["catch", "--T", "1e6"],
        &["evade", "--seed", "7"],
        &["tgcc", "--scene", "obstacle", "--evader", "--seed", "7", "--grid-pos", "8", "--grid-ang", "16"],
        &["tgcc", "--T", "1e8", "--grid-pos", "16", "--grid-ang", "64"],
        &["grc", "--horizon", "1000"],
        &["grc", "--scene", "disk", "--alpha", "1", "--n", "5000"],
    ];
    let mut files = 0;
    for (k, args) in runs.iter().enumerate() {
        let a = tmp.join(format!("a6-{k}-a"));
        let b = tmp.join(format!("a6-{k}-b"));
        let (ca, _) = run_cli(args, &a, None);
        let (cb, _) = run_cli(args, &b, Some("2"));
        check(&mut f, ca == cb, format!("{}: exit {ca} vs {cb}", args.join(" ")));
        let mut names: Vec<_> = std::fs::read_dir(&a)
            .map(|d| d.filter_map(|e| e.ok()).map(|e| e.file_name()).collect())
            .unwrap_or_default();
        names.sort();
        for name in names {
            let n = name.to_string_lossy();
            if !(n.ends_with(".json") || n.ends_with(".csv")) {
                continue;
            }
            files += 1;
            let same = std::fs::read(a.join(&name)).ok() == std::fs::read(b.join(&name)).ok();
            check(&mut f, same, format!("{}: {n} differs", args.join(" ")));
        }
    }
    check(&mut f, files >= 15, format!("only {files} outputs compared"));
    outcome(f, format!("{files} JSON/CSV outputs byte-identical across reruns"))
}

fn main() {
    let dir = std::env::temp_dir().join(format!("geocatch-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let criteria: [(&str, Duration, &dyn Fn() -> Outcome); 6] = [
        ("A1", Duration::from_secs(10), &a1),
        ("A2", Duration::from_secs(60), &a2),
        ("A3", Duration::from_secs(600), &|| a3(&dir)),
        ("A4", Duration::from_secs(600), &|| a4(&dir)),
        ("A5", Duration::from_secs(60), &a5),
        ("A6", Duration::from_secs(600), &|| a6(&dir)),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for (name, budget, run) in criteria {
        let t = Instant::now();
        let mut r = run();
        let el = t.elapsed();
        if el > budget {
            r.ok = false;
            r.detail = format!("{}; runtime {el:.1?} over {budget:?}", r.detail);
        }
        failed += usize::from(!r.ok);
        let verdict = if r.ok { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{name} {verdict} ({:.2}s) {}", el.as_secs_f64(), r.detail);
        let _ = out.flush();
    }
    let _ = std::fs::remove_dir_all(&dir);
    if failed > 0 {
        let _ = writeln!(out, "{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
