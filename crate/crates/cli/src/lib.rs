//! Command-line front end for the `lottery-ricker` kernel: argument parsing,
//! config files, parallel drivers, and CSV/PGM/PPM output.
//!
//! Exit codes: 0 success, 1 I/O failure while writing output, 2 usage or
//! validation error (including inputs that violate a routine's
//! precondition), 3 numerical failure (no interior orbit, no convergence,
//! overflow).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod config;
pub mod error;
pub mod formats;
pub mod parallel;
pub mod sweep;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use lottery_ricker::basin::{BasinSettings, BasinSpec, CellClass};
use lottery_ricker::geometry::{self, HeteroclinicSettings};
use lottery_ricker::map;
use lottery_ricker::orbits::{self, Orbit2};
use lottery_ricker::sampling::Window;
use lottery_ricker::stability::{self, ProbeSettings};
use lottery_ricker::{MapFamily, Params, State};

use crate::error::{CliError, CliResult, EXIT_OK, EXIT_VALIDATION};
use crate::sweep::{SweepParam, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "lrl", version, about = "Lottery-Ricker competition map analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the map from one initial state
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Interior 2-cycle
    #[command(args_override_self = true)]
    Orbit(OrbitArgs),
    /// Jacobian product, eigenvalues and Jury test of the interior 2-cycle
    #[command(args_override_self = true)]
    Stability(OrbitArgs),
    /// Competition regime and the C1-C3 conditions
    #[command(args_override_self = true)]
    Regime(RegimeArgs),
    /// Trace the connection from (r1 - a, 0) to (0, r2)
    #[command(args_override_self = true)]
    Heteroclinic(HeteroclinicArgs),
    /// Pre-images of a point, or of the heteroclinic curve up to a rank
    #[command(args_override_self = true)]
    Preimage(PreimageArgs),
    /// Basin-of-attraction raster
    #[command(args_override_self = true)]
    Basin(BasinArgs),
    /// One-parameter sweep of the 2-cycle and its stability
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Regime, Lyapunov certificate and persistence report
    #[command(args_override_self = true)]
    Certify(CertifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Lottery,
    Stocking,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "lottery")]
    pub family: FamilyKind,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub r1: f64,
    #[arg(long, default_value_t = 2.2, allow_negative_numbers = true)]
    pub r2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Stocking rate of species x (stocking family)
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub s1: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub q1: f64,
    #[arg(long, default_value_t = 2.2, allow_negative_numbers = true)]
    pub q2: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub p1: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub p2: f64,
}

impl ModelArgs {
    pub fn family(&self) -> CliResult<MapFamily> {
        Ok(match self.family {
            FamilyKind::Lottery => MapFamily::lottery(self.r1, self.r2, self.a)?,
            FamilyKind::Stocking => MapFamily::stocking(self.s1, self.q1, self.q2, self.p1, self.p2)?,
        })
    }

    pub fn lottery(&self) -> CliResult<Params> {
        match self.family()? {
            MapFamily::LotteryRicker(p) => Ok(p),
            MapFamily::StockingRicker(_) => Err(CliError::validation("this command needs --family lottery")),
        }
    }

    pub fn describe(&self) -> String {
        match self.family {
            FamilyKind::Lottery => format!("family=lottery r1={} r2={} a={}", self.r1, self.r2, self.a),
            FamilyKind::Stocking => {
                format!("family=stocking s1={} q1={} q2={} p1={} p2={}", self.s1, self.q1, self.q2, self.p1, self.p2)
            }
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// Seed for every random choice
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output file; tables go to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file read before the other flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
    pub y0: f64,
    /// Number of steps
    #[arg(long, default_value_t = 200)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
    /// Start of the transient run that seeds Newton (instead of the closed form)
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    /// Steps iterated before Newton when seeding from a trajectory
    #[arg(long, default_value_t = 5000)]
    pub transient: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RegimeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    /// Distance of the seed from the saddle along the unstable direction
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub offset: f64,
    /// Distance to (0, r2) that counts as arrival
    #[arg(long, default_value_t = 1e-2, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
}

impl TraceArgs {
    fn settings(&self) -> CliResult<HeteroclinicSettings> {
        positive("offset", self.offset)?;
        positive("tol", self.tol)?;
        Ok(HeteroclinicSettings { offset: self.offset, tol: self.tol, max_iter: self.max_iter })
    }
}

#[derive(Debug, Clone, Args)]
pub struct HeteroclinicArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub trace: TraceArgs,
    /// Direct seed (both coordinates) instead of the eigenvector seed
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    /// Output a dense curve with this many samples per fundamental domain
    #[arg(long, default_value_t = 0)]
    pub dense: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PreimageArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub trace: TraceArgs,
    /// Target point (both coordinates); otherwise the heteroclinic curve
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<f64>,
    /// Highest rank for curve pre-images
    #[arg(long, default_value_t = 1)]
    pub rank: u32,
    /// Samples per target segment
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
    /// Samples per fundamental domain of the heteroclinic curve
    #[arg(long, default_value_t = 8)]
    pub per_domain: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RasterFormat {
    Csv,
    Pgm,
    Ppm,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub y_max: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BasinArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value_t = 200)]
    pub nx: usize,
    #[arg(long, default_value_t = 200)]
    pub ny: usize,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    pub axis_tol: f64,
    /// Output format; inferred from the --out extension, CSV otherwise
    #[arg(long, value_enum)]
    pub format: Option<RasterFormat>,
    /// Steps iterated before Newton when the 2-cycle comes from a trajectory
    #[arg(long, default_value_t = 5000)]
    pub transient: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
    /// delta (r1 = 2, r2 = 2 + delta), r1, r2 or a
    #[arg(long, default_value = "delta")]
    pub param: SweepParam,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub io: IoArgs,
    /// Quasi-random samples for the Lyapunov ratio
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Random starting points for the persistence probe
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 2000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 1e-8, allow_negative_numbers = true)]
    pub exclusion_tol: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub y_max: f64,
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::validation(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn pair(name_x: &str, x: Option<f64>, name_y: &str, y: Option<f64>) -> CliResult<Option<State>> {
    match (x, y) {
        (Some(x), Some(y)) => Ok(Some(State::new(x, y))),
        (None, None) => Ok(None),
        _ => Err(CliError::validation(format!("--{name_x} and --{name_y} must be given together"))),
    }
}

/// Where tables and reports go.
struct Sink<'a> {
    out: Option<&'a Path>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Sink<'_> {
    /// Writes the payload to `--out` or stdout.
    fn payload(&mut self, write: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
        match self.out {
            Some(path) => {
                let file = File::create(path).map_err(|e| CliError::io(path, e))?;
                let mut w = BufWriter::new(file);
                write(&mut w)?;
                w.flush().map_err(|e| CliError::io(path, e))
            }
            None => write(&mut *self.stdout),
        }
    }

    /// Summary line: stdout when the payload went to a file, stderr otherwise.
    fn summary(&mut self, line: &str) -> CliResult<()> {
        let w: &mut dyn Write = if self.out.is_some() { &mut *self.stdout } else { &mut *self.stderr };
        writeln!(w, "{line}").map_err(|e| CliError::io("<stdout>", e))
    }

    /// Report printed to stdout in every case and also saved to `--out`.
    fn report(&mut self, text: &str) -> CliResult<()> {
        write!(self.stdout, "{text}").map_err(|e| CliError::io("<stdout>", e))?;
        if let Some(path) = self.out {
            std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
        }
        Ok(())
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::io("<output>", e)
}

/// The interior 2-cycle used by `orbit`, `stability` and `basin`.
///
/// The lottery family uses the closed form unless a seed is given; the
/// stocking family has no closed form and is polished from a trajectory that
/// starts next to its `x`-axis fixed point.
pub fn resolve_orbit(f: &MapFamily, seed: Option<State>, transient: usize) -> CliResult<Orbit2> {
    let seed = match (f, seed) {
        (_, Some(s)) => Some(s),
        (MapFamily::LotteryRicker(_), None) => None,
        (MapFamily::StockingRicker(p), None) => {
            let xi = p
                .x_axis_equilibrium()
                .ok_or(CliError::validation("stocking family needs s1 < 1 or an explicit --x0/--y0 seed"))?;
            Some(State::new(xi.x, 1e-3))
        }
    };
    Ok(match seed {
        Some(s) => orbits::find_2cycle(f, s, transient)?,
        None => orbits::interior_2cycle(f)?,
    })
}

fn cmd_simulate(a: &SimulateArgs, sink: &mut Sink) -> CliResult<()> {
    let f = a.model.family()?;
    let traj = map::iterate(&f, State::new(a.x0, a.y0), a.n)?;
    sink.payload(|w| formats::write_trajectory(w, &traj.states))?;
    let last = traj.last();
    let mut line = format!("simulate: {} states, final ({}, {})", traj.states.len(), last.x, last.y);
    if let Some(e) = &traj.halted {
        line.push_str(&format!(", halted: {e}"));
    }
    sink.summary(&line)?;
    match traj.halted {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn orbit_line(o: &Orbit2) -> String {
    format!(
        "orbit: p1=({}, {}) p2=({}, {}) s1={} s2={} residual={:e}",
        o.p1.x, o.p1.y, o.p2.x, o.p2.y, o.s1, o.s2, o.residual
    )
}

fn cmd_orbit(a: &OrbitArgs, sink: &mut Sink) -> CliResult<()> {
    let f = a.model.family()?;
    let o = resolve_orbit(&f, pair("x0", a.x0, "y0", a.y0)?, a.transient)?;
    if sink.out.is_some() {
        sink.payload(|w| {
            let mut out = formats::csv_writer(w);
            out.write_record(["point", "x", "y", "sum"])?;
            for (name, p) in [("p1", o.p1), ("p2", o.p2)] {
                out.write_record([name.to_string(), formats::num(p.x), formats::num(p.y), formats::num(p.sum())])?;
            }
            out.flush().map_err(csv::Error::from)?;
            Ok(())
        })?;
    }
    writeln!(sink.stdout, "{}", orbit_line(&o)).map_err(io_err)
}

fn cmd_stability(a: &OrbitArgs, sink: &mut Sink) -> CliResult<()> {
    let f = a.model.family()?;
    let o = resolve_orbit(&f, pair("x0", a.x0, "y0", a.y0)?, a.transient)?;
    let r = stability::cycle_stability(&f, &o)?;
    let [l1, l2] = r.eigenvalues;
    let m = r.jac_product.m;
    let rows = [
        ("trace", r.trace),
        ("det", r.det),
        ("det_plus_1", r.det + 1.0),
        ("abs_trace", r.trace.abs()),
        ("eig1_re", l1.re),
        ("eig1_im", l1.im),
        ("eig2_re", l2.re),
        ("eig2_im", l2.im),
        ("spectral_radius", r.spectral_radius),
        ("j11", m[0][0]),
        ("j12", m[0][1]),
        ("j21", m[1][0]),
        ("j22", m[1][1]),
    ];
    if sink.out.is_some() {
        sink.payload(|w| {
            let mut out = formats::csv_writer(w);
            out.write_record(["quantity", "value"])?;
            for (k, v) in rows {
                out.write_record([k.to_string(), formats::num(v)])?;
            }
            out.write_record(["jury_pass".to_string(), r.jury_pass.to_string()])?;
            out.flush().map_err(csv::Error::from)?;
            Ok(())
        })?;
    }
    let eig = |re: f64, im: f64| {
        if im == 0.0 {
            format!("{re}")
        } else {
            format!("{re}{im:+}i")
        }
    };
    writeln!(sink.stdout, "{}", orbit_line(&o)).map_err(io_err)?;
    writeln!(
        sink.stdout,
        "stability: eigenvalues {} and {} trace={} det={} spectral_radius={} jury_pass={}",
        eig(l1.re, l1.im),
        eig(l2.re, l2.im),
        r.trace,
        r.det,
        r.spectral_radius,
        r.jury_pass
    )
    .map_err(io_err)
}

fn cmd_regime(a: &RegimeArgs, sink: &mut Sink) -> CliResult<()> {
    let p = a.model.lottery()?;
    let r = stability::classify_regime(&p);
    let text = format!(
        "regime: {}\nC1: {}\nC2: {}\nC3: {}\ntransverse_eigenvalue_xi: {}\ntransverse_eigenvalue_eta: {}\nextinction_threshold: {}\n",
        r.regime.name(),
        r.c1,
        r.c2,
        r.c3,
        r.transverse_xi,
        r.transverse_eta,
        r.extinction_threshold
    );
    sink.report(&text)
}

fn cmd_heteroclinic(a: &HeteroclinicArgs, sink: &mut Sink) -> CliResult<()> {
    let f = a.model.family()?;
    let settings = a.trace.settings()?;
    let h = match pair("x0", a.x0, "y0", a.y0)? {
        Some(seed) => geometry::trace_from_seed(&f, seed, settings.tol, settings.max_iter)?,
        None => geometry::trace_heteroclinic(&f, &settings)?,
    };
    let curve = if a.dense > 0 { geometry::heteroclinic_curve(&f, &settings, a.dense)? } else { h.orbit.clone() };
    sink.payload(|w| formats::write_curves(w, std::slice::from_ref(&curve)))?;
    sink.summary(&format!(
        "heteroclinic: found={} min_dist_to_eta={:e} closest_step={} exit={:?} points={}",
        h.found,
        h.min_dist_to_eta,
        h.closest_step,
        h.exit_reason,
        curve.len()
    ))
}

fn cmd_preimage(a: &PreimageArgs, sink: &mut Sink) -> CliResult<()> {
    let f = a.model.family()?;
    if let Some(target) = pair("x", a.x, "y", a.y)? {
        let roots = geometry::preimages_point(&f, target, 2)?;
        sink.payload(|w| {
            let mut out = formats::csv_writer(w);
            out.write_record(["index", "x", "y", "residual"])?;
            for (k, r) in roots.iter().enumerate() {
                let residual = map::step(&f, *r)?.dist_max(&target);
                out.write_record([k.to_string(), formats::num(r.x), formats::num(r.y), formats::num(residual)])?;
            }
            out.flush().map_err(csv::Error::from)?;
            Ok(())
        })?;
        return sink.summary(&format!("preimage: {} rank-1 pre-images of ({}, {})", roots.len(), target.x, target.y));
    }
    if a.rank == 0 {
        return Err(CliError::validation("--rank must be at least 1"));
    }
    let settings = a.trace.settings()?;
    let c = geometry::heteroclinic_curve(&f, &settings, a.per_domain)?;
    let pre = geometry::preimages_curve(&f, &c, a.rank, a.samples)?;
    let mut all = Vec::with_capacity(pre.len() + 1);
    all.push(c);
    all.extend(pre);
    sink.payload(|w| formats::write_curves(w, &all))?;
    let points: usize = all.iter().map(|c| c.len()).sum();
    sink.summary(&format!(
        "preimage: {} curves up to rank {} ({} points, chain jump factor {})",
        all.len(),
        a.rank,
        points,
        geometry::CHAIN_JUMP_FACTOR
    ))
}

fn raster_format(a: &BasinArgs) -> RasterFormat {
    if let Some(f) = a.format {
        return f;
    }
    let ext = a.io.out.as_deref().and_then(|p| p.extension()).and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("pgm") => RasterFormat::Pgm,
        Some("ppm") => RasterFormat::Ppm,
        _ => RasterFormat::Csv,
    }
}

fn cmd_basin(a: &BasinArgs, sink: &mut Sink) -> CliResult<()> {
    let f = a.model.family()?;
    let w = &a.window;
    let window = Window::new(w.x_min, w.x_max, w.y_min, w.y_max);
    let settings = BasinSettings { max_iter: a.max_iter, tol: a.tol, axis_tol: a.axis_tol };
    // Without an interior 2-cycle only the extinction classes can occur.
    let orbit = match resolve_orbit(&f, None, a.transient) {
        Ok(o) => Some(o),
        Err(CliError::Model(_)) => None,
        Err(e) => return Err(e),
    };
    let spec = BasinSpec::new(f, orbit, window, a.nx, a.ny, settings)?;
    let grid = parallel::par_rasterize(&spec)?;
    let params = format!(
        "lrl basin {} window=[{},{}]x[{},{}] nx={} ny={} max_iter={} tol={} axis_tol={}",
        a.model.describe(),
        w.x_min,
        w.x_max,
        w.y_min,
        w.y_max,
        a.nx,
        a.ny,
        a.max_iter,
        a.tol,
        a.axis_tol
    );
    match raster_format(a) {
        RasterFormat::Csv => sink.payload(|out| formats::write_basin_csv(out, &grid))?,
        RasterFormat::Pgm => sink.payload(|out| formats::write_pgm(out, &grid, &params).map_err(io_err))?,
        RasterFormat::Ppm => sink.payload(|out| formats::write_ppm(out, &grid, &params).map_err(io_err))?,
    }
    let parts: Vec<String> = CellClass::ALL.iter().map(|&c| format!("{}={}", c.name(), grid.count(c))).collect();
    sink.summary(&format!("basin: {}x{} cells {} iters_used={}", a.nx, a.ny, parts.join(" "), grid.iters_used))
}

fn cmd_sweep(a: &SweepArgs, sink: &mut Sink) -> CliResult<()> {
    let base = a.model.lottery()?;
    let spec = SweepSpec::new(a.param, a.start, a.stop, a.steps)?;
    let rows = sweep::run_sweep(&base, &spec);
    sink.payload(|w| sweep::write_sweep(w, &rows))?;
    let ok = rows.iter().filter(|r| r.status == "ok").count();
    let transitions: Vec<String> = sweep::jury_transitions(&rows)
        .iter()
        .map(|(lo, hi, pass)| format!("{}in[{lo},{hi}]", if *pass { "fail->pass " } else { "pass->fail " }))
        .collect();
    sink.summary(&format!(
        "sweep: {} rows over {} ({} computed), jury transitions: {}",
        rows.len(),
        spec.param.name(),
        ok,
        if transitions.is_empty() { "none".to_string() } else { transitions.join(", ") }
    ))
}

fn cmd_certify(a: &CertifyArgs, sink: &mut Sink) -> CliResult<()> {
    let p = a.model.lottery()?;
    positive("x-max", a.x_max)?;
    positive("y-max", a.y_max)?;
    if !(a.exclusion_tol >= 0.0) {
        return Err(CliError::validation("--exclusion-tol must be non-negative"));
    }
    if a.horizon <= a.burn_in {
        return Err(CliError::validation("--horizon must exceed --burn-in"));
    }
    let opts = certify::CertifyOptions {
        seed: a.io.seed,
        lyapunov_samples: a.samples,
        points: a.points,
        x_max: a.x_max,
        y_max: a.y_max,
        probe: ProbeSettings { burn_in: a.burn_in, horizon: a.horizon, exclusion_tol: a.exclusion_tol },
    };
    let report = certify::certify(&p, &opts)?;
    sink.report(&report.render())
}

fn io_of(cmd: &Command) -> &IoArgs {
    match cmd {
        Command::Simulate(a) => &a.io,
        Command::Orbit(a) | Command::Stability(a) => &a.io,
        Command::Regime(a) => &a.io,
        Command::Heteroclinic(a) => &a.io,
        Command::Preimage(a) => &a.io,
        Command::Basin(a) => &a.io,
        Command::Sweep(a) => &a.io,
        Command::Certify(a) => &a.io,
    }
}

/// Runs a parsed command.
pub fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let mut sink = Sink { out: io_of(&cli.command).out.as_deref(), stdout, stderr };
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, &mut sink),
        Command::Orbit(a) => cmd_orbit(a, &mut sink),
        Command::Stability(a) => cmd_stability(a, &mut sink),
        Command::Regime(a) => cmd_regime(a, &mut sink),
        Command::Heteroclinic(a) => cmd_heteroclinic(a, &mut sink),
        Command::Preimage(a) => cmd_preimage(a, &mut sink),
        Command::Basin(a) => cmd_basin(a, &mut sink),
        Command::Sweep(a) => cmd_sweep(a, &mut sink),
        Command::Certify(a) => cmd_certify(a, &mut sink),
    }
}

/// Parses `args` (program name first), expands `--config`, runs the command
/// and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let program = if args.is_empty() { OsString::from("lrl") } else { args.remove(0) };
    let expanded = match config::expand_args(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(std::iter::once(program).chain(expanded)) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_VALIDATION
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
