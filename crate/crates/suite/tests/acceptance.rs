//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Every criterion runs regardless.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lottery_ricker::basin::{self, BasinSettings, BasinSpec, CellClass};
use lottery_ricker::geometry::{self, HeteroclinicSettings};
use lottery_ricker::map::{self, invariant_region};
use lottery_ricker::orbits;
use lottery_ricker::sampling::{halton_in_region, Window};
use lottery_ricker::stability::{self, Certificate, ProbeKind, ProbeSettings};
use lottery_ricker::{MapFamily, Mat2, Params, State};
use lottery_ricker_cli::certify::random_interior_points;
use lottery_ricker_cli::sweep::{self, SweepParam, SweepSpec};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn lottery(r1: f64, r2: f64, a: f64) -> MapFamily {
    MapFamily::lottery(r1, r2, a).unwrap()
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lrl(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = lottery_ricker_cli::run(std::iter::once("lrl").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned())
}

fn parse_point(text: &str, tag: &str) -> Option<State> {
    let rest = &text[text.find(tag)? + tag.len()..];
    let (x, rest) = rest.split_once(", ")?;
    let y = &rest[..rest.find(')')?];
    Some(State::new(x.parse().ok()?, y.parse().ok()?))
}

fn orbit_reproduction() -> Check {
    let t = Instant::now();
    let (code, out) = lrl(&["orbit", "--r1", "2", "--r2", "2.2"]);
    let command_time = t.elapsed();
    let f = lottery(2.0, 2.2, 0.0);
    let t = Instant::now();
    let computed = orbits::interior_2cycle(&f).is_ok();
    let elapsed = t.elapsed();
    if code != 0 || !computed {
        return Err(format!("exit code {code}"));
    }
    let pts =
        [parse_point(&out, "p1=(").ok_or("unparsable output")?, parse_point(&out, "p2=(").ok_or("unparsable output")?];
    let matched = [(0.1536, 2.9629), (0.0986, 1.1849)]
        .iter()
        .all(|&(x, y)| pts.iter().any(|p| (p.x - x).abs() <= 5e-3 && (p.y - y).abs() <= 5e-3));
    ensure(
        matched && elapsed < Duration::from_millis(1),
        format!(
            "p1=({:.4}, {:.4}) p2=({:.4}, {:.4}) orbit time={elapsed:?} command time={command_time:?}",
            pts[0].x, pts[0].y, pts[1].x, pts[1].y
        ),
    )
}

fn real_parts_near(eigs: [f64; 2], want: [f64; 2], tol: f64) -> bool {
    let direct = (eigs[0] - want[0]).abs() <= tol && (eigs[1] - want[1]).abs() <= tol;
    let swapped = (eigs[0] - want[1]).abs() <= tol && (eigs[1] - want[0]).abs() <= tol;
    direct || swapped
}

fn second_iterate_fd(f: &MapFamily, s: State) -> Mat2 {
    let h2 = |p: State| map::step(f, map::step(f, p).unwrap()).unwrap();
    let hx = 1e-6 * s.x;
    let hy = 1e-6 * s.y;
    let px = h2(State::new(s.x + hx, s.y));
    let mx = h2(State::new(s.x - hx, s.y));
    let py = h2(State::new(s.x, s.y + hy));
    let my = h2(State::new(s.x, s.y - hy));
    Mat2::new(
        (px.x - mx.x) / (2.0 * hx),
        (py.x - my.x) / (2.0 * hy),
        (px.y - mx.y) / (2.0 * hx),
        (py.y - my.y) / (2.0 * hy),
    )
}

fn eigenvalue_reproduction() -> Check {
    let mut ok = true;
    let mut detail = Vec::new();
    for (r1, r2, a, want) in [(2.0, 2.2, 0.0, [0.91, 0.26]), (2.1, 2.5, 0.1, [0.11, -0.24])] {
        let f = lottery(r1, r2, a);
        let o = orbits::interior_2cycle(&f).map_err(|e| e.to_string())?;
        let s = stability::cycle_stability(&f, &o).map_err(|e| e.to_string())?;
        let eigs = [s.eigenvalues[0].re, s.eigenvalues[1].re];
        let real = s.eigenvalues.iter().all(|z| z.im == 0.0);
        let fd = second_iterate_fd(&f, o.p1);
        let fd_rel = fd.sub(&s.jac_product).max_abs() / s.jac_product.max_abs();
        let matched = real && real_parts_near(eigs, want, 0.01);
        ok &= matched && fd_rel <= 1e-5;
        detail.push(format!(
            "({r1}, {r2}, a={a}): eigenvalues {:.4}, {:.4} vs {want:?} {} fd_rel={fd_rel:.1e}",
            eigs[0],
            eigs[1],
            if matched { "match" } else { "mismatch" }
        ));
    }
    ensure(ok, detail.join("; "))
}

fn stability_boundary() -> Check {
    let t = Instant::now();
    let base = Params::lottery(2.0, 2.5).unwrap();
    let spec = SweepSpec::new(SweepParam::Delta, 0.5, 1.0, 51).map_err(|e| e.to_string())?;
    let rows = sweep::run_sweep(&base, &spec);
    let flips = sweep::jury_transitions(&rows);
    let elapsed = t.elapsed();
    let all_ok = rows.iter().all(|r| r.status == "ok");
    let single = flips.len() == 1 && !flips[0].2 && flips[0].0 >= 0.90 && flips[0].1 <= 1.00;
    ensure(all_ok && single && elapsed < Duration::from_secs(1), format!("transitions={flips:?} runtime={elapsed:?}"))
}

/// Least-squares slope of `log err` against `log delta`.
fn fitted_order(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(d, e)| (d.ln(), e.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn series_consistency() -> Check {
    let mut det_err = Vec::new();
    let mut trace_err = Vec::new();
    for d in [0.0025, 0.005, 0.01, 0.02] {
        let f = lottery(2.0, 2.0 + d, 0.0);
        let o = orbits::interior_2cycle(&f).map_err(|e| e.to_string())?;
        let s = stability::cycle_stability(&f, &o).map_err(|e| e.to_string())?;
        let (det_series, trace_series) = stability::delta_series_check(d);
        det_err.push((d, (s.det + 1.0 - det_series).abs()));
        trace_err.push((d, (s.trace.abs() - trace_series).abs()));
    }
    let (od, ot) = (fitted_order(&det_err), fitted_order(&trace_err));
    ensure(od >= 2.5 && ot >= 2.5, format!("order det={od:.3} trace={ot:.3}"))
}

fn growth_regimes() -> Check {
    let p = Params::lottery(3.0, 2.0).unwrap();
    let f = MapFamily::LotteryRicker(p);
    let target = State::new(3.0, 0.0);
    let pts = random_interior_points(1, 1000, 3.0, 4.0);
    let mut converged = 0;
    for &s in &pts {
        let end = map::iterate_final(&f, s, 10_000).map_err(|e| e.to_string())?;
        if end.dist_max(&target) <= 1e-6 {
            converged += 1;
        }
    }
    let ratio = stability::lyapunov_certificate(&p, Certificate::XWins, 10_000).map_err(|e| e.to_string())?;
    let ratio_ok = ratio <= (-1.0f64).exp() + 1e-12;

    let q = Params::lottery(1.2, 1.5).unwrap();
    let threshold = q.extinction_threshold();
    let g = MapFamily::LotteryRicker(q);
    let mut extinct = 0;
    for &s in &random_interior_points(2, 1000, 3.0, 4.0) {
        if map::iterate_final(&g, s, 10_000).map_err(|e| e.to_string())?.x < 1e-6 {
            extinct += 1;
        }
    }
    ensure(
        converged == pts.len() && ratio_ok && extinct == 1000 && q.r1 < threshold,
        format!(
            "(3, 2): {converged}/1000 reach (3, 0), max_ratio={ratio:.12} bound={:.12}; (1.2, 1.5) threshold={threshold:.4}: {extinct}/1000 with x < 1e-6",
            (-1.0f64).exp()
        ),
    )
}

fn invariance() -> Check {
    let p = Params::lottery(2.0, 2.2).unwrap();
    let f = MapFamily::LotteryRicker(p);
    let d = invariant_region(&p).map_err(|e| e.to_string())?;
    let inside = halton_in_region(&d, 10_000, 0);
    let mut stayed = 0;
    for &s in &inside {
        if d.contains(map::step(&f, s).map_err(|e| e.to_string())?) {
            stayed += 1;
        }
    }
    let outside: Vec<State> =
        random_interior_points(3, 20_000, 6.0, 6.0).into_iter().filter(|s| !d.contains(*s)).take(1000).collect();
    let saddle = State::new(p.r1, 0.0);
    let mut attracted = 0;
    for &s0 in &outside {
        let mut s = s0;
        for _ in 0..10_000 {
            s = map::step(&f, s).map_err(|e| e.to_string())?;
            if d.contains(s) || s.dist_max(&saddle) <= 1e-6 {
                attracted += 1;
                break;
            }
        }
    }
    ensure(
        stayed == inside.len() && outside.len() == 1000 && attracted == outside.len(),
        format!(
            "eps={:.4} upper={:.4}: {stayed}/{} stay, {attracted}/{} outside points attracted",
            d.eps,
            d.upper,
            inside.len(),
            outside.len()
        ),
    )
}

fn heteroclinic() -> Check {
    let settings = HeteroclinicSettings { offset: 1e-3, tol: 1e-2, max_iter: 500 };
    let mut ok = true;
    let mut detail = Vec::new();
    for (r1, r2, a) in [(2.0, 2.2, 0.0), (2.1, 2.5, 0.1)] {
        let r = geometry::trace_heteroclinic(&lottery(r1, r2, a), &settings).map_err(|e| e.to_string())?;
        ok &= r.found && r.min_dist_to_eta < 1e-2 && r.closest_step <= 500;
        detail.push(format!("({r1}, {r2}, a={a}): min_dist={:.2e} at step {}", r.min_dist_to_eta, r.closest_step));
    }
    ensure(ok, detail.join("; "))
}

fn basin_structure() -> Check {
    let t = Instant::now();
    let f = lottery(2.0, 2.2, 0.0);
    let o = orbits::interior_2cycle(&f).map_err(|e| e.to_string())?;
    let window = Window::new(0.0, 3.0, 0.0, 4.0);
    let spec = BasinSpec::new(f, Some(o), window, 200, 200, BasinSettings::default()).map_err(|e| e.to_string())?;
    let grid = basin::rasterize(&spec);
    let elapsed = t.elapsed();
    let (a, b) = (grid.count(CellClass::PhaseA), grid.count(CellClass::PhaseB));
    let phase_share = (a + b) as f64 / grid.cells.len() as f64;
    let (fa, fb) = (a as f64 / (a + b) as f64, b as f64 / (a + b) as f64);

    let settings = BasinSettings::default();
    let classify = |s: State| basin::classify_point(&f, Some(&o), s, &settings).unwrap();
    let mut coherent = 0;
    let samples = random_interior_points(4, 1000, 3.0, 4.0);
    for &s in &samples {
        let c = classify(s);
        let one = map::step(&f, s).map_err(|e| e.to_string())?;
        let two = map::step(&f, one).map_err(|e| e.to_string())?;
        if classify(one) == c.swapped() && classify(two) == c {
            coherent += 1;
        }
    }
    ensure(
        phase_share >= 0.99
            && fa >= 0.10
            && fb >= 0.10
            && coherent == samples.len()
            && elapsed < Duration::from_secs(60),
        format!(
            "phase share={phase_share:.4} A={fa:.3} B={fb:.3} coherent={coherent}/{} runtime={elapsed:?}",
            samples.len()
        ),
    )
}

fn preimage_correctness() -> Check {
    let f = lottery(2.0, 2.2, 0.0);
    let mut worst_image = 0.0f64;
    let mut worst_recovery = 0.0f64;
    let mut max_count = 0;
    let points = random_interior_points(5, 10_000, 3.0, 4.0);
    for &s in &points {
        let target = map::step(&f, s).map_err(|e| e.to_string())?;
        let roots = geometry::preimages_point(&f, target, 2).map_err(|e| e.to_string())?;
        max_count = max_count.max(roots.len());
        let scale = 1.0 + target.x.max(target.y);
        for r in &roots {
            let back = map::step(&f, *r).map_err(|e| e.to_string())?;
            worst_image = worst_image.max(back.dist_max(&target) / scale);
        }
        let recovery = roots.iter().map(|r| r.dist_max(&s)).fold(f64::INFINITY, f64::min) / (1.0 + s.x + s.y);
        worst_recovery = worst_recovery.max(recovery);
    }
    let o = orbits::interior_2cycle(&f).map_err(|e| e.to_string())?;
    let mutual = [(o.p1, o.p2), (o.p2, o.p1)].iter().all(|&(pre, img)| {
        geometry::preimages_point(&f, img, 2).is_ok_and(|rs| rs.iter().any(|r| r.dist_max(&pre) <= 1e-8))
    });
    ensure(
        worst_image <= 1e-8 && worst_recovery <= 1e-8 && max_count <= 2 && mutual,
        format!(
            "{} round trips: worst image residual={worst_image:.1e} worst recovery={worst_recovery:.1e} max count={max_count} cycle mutual={mutual}",
            points.len()
        ),
    )
}

fn relative_permanence() -> Check {
    let f = lottery(2.0, 2.2, 0.0);
    let settings = ProbeSettings { burn_in: 1000, horizon: 2000, exclusion_tol: 1e-8 };
    let points = random_interior_points(42, 1000, 3.0, 4.0);
    let est = stability::persistence_probe(&f, &points, &settings).map_err(|e| e.to_string())?;
    let floor = 0.01;
    let share = est.fraction_above(floor);
    let exceptional: Vec<State> = est
        .records
        .iter()
        .filter(|r| r.kind != ProbeKind::Boundary && !(r.liminf_min > floor))
        .map(|r| r.start)
        .collect();
    let mut far = 0;
    if !exceptional.is_empty() {
        let curve =
            geometry::heteroclinic_curve(&f, &HeteroclinicSettings::default(), 16).map_err(|e| e.to_string())?;
        let mut curves = geometry::preimages_curve(&f, &curve, 3, 2).map_err(|e| e.to_string())?;
        curves.push(curve);
        far = exceptional.iter().filter(|&&s| geometry::distance_to_curves(s, &curves) > 1e-2).count();
    }
    ensure(
        share >= 0.99 && far == 0,
        format!(
            "share above {floor}={share:.4} liminf_min={:.4} exceptional={} of which off-curve={far}",
            est.liminf_min,
            exceptional.len()
        ),
    )
}

fn reproducibility() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let commands: [&[&str]; 10] = [
        &["simulate", "--n", "100"],
        &["orbit"],
        &["stability", "--r1", "2.1", "--r2", "2.5", "--a", "0.1"],
        &["regime", "--r1", "3", "--r2", "2"],
        &["heteroclinic", "--dense", "16"],
        &["preimage", "--rank", "2"],
        &["basin", "--nx", "60", "--ny", "60", "--format", "ppm"],
        &["basin", "--nx", "40", "--ny", "40", "--format", "csv"],
        &["sweep", "--steps", "21"],
        &["certify", "--points", "200"],
    ];
    let mut checked = 0;
    for (k, cmd) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{k}-{run}.out"));
            let mut args = cmd.to_vec();
            let p = path.to_str().unwrap().to_string();
            args.extend(["--seed", "11", "--out", &p]);
            let (code, _) = lrl(&args);
            if code != 0 {
                return Err(format!("{} exited {code}", cmd[0]));
            }
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{} output differs between runs", cmd.join(" ")));
        }
        checked += 1;
    }
    ensure(true, format!("{checked} commands byte-identical across two runs"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("orbit reproduction", orbit_reproduction),
        ("eigenvalue reproduction", eigenvalue_reproduction),
        ("stability boundary", stability_boundary),
        ("series consistency", series_consistency),
        ("growth-rate regimes", growth_regimes),
        ("invariant region", invariance),
        ("heteroclinic connection", heteroclinic),
        ("basin structure", basin_structure),
        ("pre-image correctness", preimage_correctness),
        ("relative permanence", relative_permanence),
        ("reproducibility", reproducibility),
    ];
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate() {
        let (verdict, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed.push(n + 1);
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {name}: {verdict} ({detail})", n + 1);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed.len(), criteria.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
