//! Heteroclinic connection from `ξ*` on the `x`-axis to `η*` on the `y`-axis,
//! and finite-rank pre-images of points and curves.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::{self, MapFamily, Params, State};
use crate::orbits;
use crate::roots::{bisect, newton_polish};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSource {
    Heteroclinic,
    Preimage { rank: u32 },
}

impl CurveSource {
    pub fn rank(&self) -> u32 {
        match self {
            CurveSource::Heteroclinic => 0,
            CurveSource::Preimage { rank } => *rank,
        }
    }
}

/// Open polyline in the closed quadrant.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub points: Vec<State>,
    pub closed: bool,
    pub source: CurveSource,
    /// Jump threshold used when chaining pre-image samples, as a multiple of the
    /// target sample spacing. Zero for traced curves.
    pub chain_jump_factor: f64,
}

impl Curve {
    pub fn new(points: Vec<State>, source: CurveSource) -> Self {
        let mut c = Curve { points: Vec::with_capacity(points.len()), closed: false, source, chain_jump_factor: 0.0 };
        for p in points {
            c.push(p);
        }
        c
    }

    fn push(&mut self, p: State) {
        if self.points.last() != Some(&p) {
            self.points.push(p);
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (State, State)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    /// Euclidean distance from `p` to the polyline.
    pub fn distance_to(&self, p: State) -> f64 {
        match self.points.as_slice() {
            [] => f64::INFINITY,
            [only] => only.dist(&p),
            _ => self.segments().map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min),
        }
    }
}

fn segment_distance(p: State, a: State, b: State) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) };
    p.dist(&State::new(a.x + t * dx, a.y + t * dy))
}

/// Distance from `p` to the nearest of `curves`.
pub fn distance_to_curves(p: State, curves: &[Curve]) -> f64 {
    curves.iter().map(|c| c.distance_to(p)).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitReason {
    Converged,
    MaxIter,
    LeftRegion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeteroclinicResult {
    pub found: bool,
    /// `ξ*`, the traced orbit up to its closest approach to `η*`, then `η*`
    /// itself when the connection was found.
    pub orbit: Curve,
    pub min_dist_to_eta: f64,
    pub exit_reason: ExitReason,
    /// Iteration index of the closest approach.
    pub closest_step: usize,
    pub seed: State,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroclinicSettings {
    pub offset: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for HeteroclinicSettings {
    fn default() -> Self {
        HeteroclinicSettings { offset: 1e-3, tol: 1e-2, max_iter: 500 }
    }
}

/// The saddle on the `x`-axis and the target equilibrium on the `y`-axis.
pub fn boundary_saddles(f: &MapFamily) -> Result<(State, State)> {
    match f {
        MapFamily::LotteryRicker(p) => {
            if p.r1 <= p.a {
                return Err(Error::Precondition("no equilibrium on the x-axis besides the origin"));
            }
            Ok(orbits::boundary_equilibria(p))
        }
        MapFamily::StockingRicker(p) => {
            let xi = p.x_axis_equilibrium().ok_or(Error::Precondition("x-axis equilibrium requires s1 < 1"))?;
            Ok((xi, p.y_axis_equilibrium()))
        }
    }
}

/// Transverse eigenvalue at `ξ*` and its eigenvector, oriented into `y > 0`.
pub fn unstable_direction(f: &MapFamily) -> Result<(State, [f64; 2], f64)> {
    let (xi, _) = boundary_saddles(f)?;
    let jac = map::jacobian(f, xi)?;
    // The y-row vanishes off the diagonal on the x-axis, so the transverse
    // eigenvalue is the (1, 1) entry.
    let lambda = jac.m[1][1];
    if !(lambda > 1.0) {
        return Err(Error::Precondition("boundary equilibrium on the x-axis is transversally stable"));
    }
    let mut v = jac.eigenvector(lambda);
    if v[1] < 0.0 {
        v = [-v[0], -v[1]];
    }
    Ok((xi, v, lambda))
}

/// Seeds on the local unstable manifold of `ξ*` and iterates toward `η*`.
pub fn trace_heteroclinic(f: &MapFamily, settings: &HeteroclinicSettings) -> Result<HeteroclinicResult> {
    if !(settings.offset > 0.0 && settings.tol > 0.0) {
        return Err(Error::Precondition("offset and tol must be positive"));
    }
    let (xi, v, _) = unstable_direction(f)?;
    let seed = State::new(xi.x + settings.offset * v[0], xi.y + settings.offset * v[1]);
    trace_from_seed(f, seed, settings.tol, settings.max_iter)
}

/// Iterates a given seed (e.g. `(2, 0.001)`) and records its approach to `η*`.
///
/// The orbit is cut at the first local minimum of the distance to `η*` that is
/// within `tol`.
pub fn trace_from_seed(f: &MapFamily, seed: State, tol: f64, max_iter: usize) -> Result<HeteroclinicResult> {
    let (xi, eta) = boundary_saddles(f)?;
    f.check_state(seed)?;
    let escape = 100.0 * (1.0 + xi.x + eta.y);
    let mut states = Vec::with_capacity(max_iter + 1);
    states.push(seed);
    let mut exit_reason = ExitReason::MaxIter;
    let mut s = seed;
    for _ in 0..max_iter {
        match map::step(f, s) {
            Ok(next) if next.sum() <= escape => {
                s = next;
                states.push(s);
            }
            _ => {
                exit_reason = ExitReason::LeftRegion;
                break;
            }
        }
    }
    let dists: Vec<f64> = states.iter().map(|p| p.dist(&eta)).collect();
    let hit = dists.iter().position(|&d| d <= tol).map(|mut k| {
        while k + 1 < dists.len() && dists[k + 1] < dists[k] {
            k += 1;
        }
        k
    });
    let (found, closest_step, min_dist) = match hit {
        Some(k) => (true, k, dists[k]),
        None => {
            let (k, d) =
                dists
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, f64::INFINITY), |best, (i, d)| if d < best.1 { (i, d) } else { best });
            (false, k, d)
        }
    };
    let mut points = Vec::with_capacity(closest_step + 3);
    points.push(xi);
    points.extend_from_slice(&states[..=closest_step]);
    if found {
        points.push(eta);
        exit_reason = ExitReason::Converged;
    }
    Ok(HeteroclinicResult {
        found,
        orbit: Curve::new(points, CurveSource::Heteroclinic),
        min_dist_to_eta: min_dist,
        exit_reason,
        closest_step,
        seed,
    })
}

/// Dense polyline approximation of the connecting curve `C`.
///
/// A fundamental domain of the linearized unstable manifold,
/// `ξ* + offset λ^t v` for `t ∈ [0, 1)`, is sampled at `per_domain` points and
/// every sample is iterated as far as the traced orbit's closest approach.
/// Ordering the images by `(iteration, t)` traces the curve from `ξ*` to `η*`.
pub fn heteroclinic_curve(f: &MapFamily, settings: &HeteroclinicSettings, per_domain: usize) -> Result<Curve> {
    let trace = trace_heteroclinic(f, settings)?;
    if !trace.found {
        return Err(Error::NotConverged("heteroclinic connection"));
    }
    let (xi, v, lambda) = unstable_direction(f)?;
    let (_, eta) = boundary_saddles(f)?;
    let per_domain = per_domain.max(1);
    let mut seeds: Vec<State> = (0..per_domain)
        .map(|k| {
            let scale = settings.offset * libm::pow(lambda, k as f64 / per_domain as f64);
            State::new(xi.x + scale * v[0], xi.y + scale * v[1])
        })
        .collect();
    let mut points = Vec::with_capacity((trace.closest_step + 1) * per_domain + 2);
    points.push(xi);
    for _ in 0..=trace.closest_step {
        points.extend_from_slice(&seeds);
        for s in seeds.iter_mut() {
            *s = map::step(f, *s)?;
        }
    }
    points.push(eta);
    Ok(Curve::new(points, CurveSource::Heteroclinic))
}

fn preimage_params(f: &MapFamily) -> Result<&Params> {
    match f {
        MapFamily::LotteryRicker(p) if p.is_lottery() => Ok(p),
        _ => Err(Error::Unsupported("pre-images are computed for the a = 0 lottery map")),
    }
}

/// Upper cap on the total population `u` searched for pre-images.
pub const PREIMAGE_U_MAX: f64 = 50.0;

/// Rank-1 pre-images of an interior `target`, at most two, ordered by
/// increasing total population.
///
/// With `u = x + y` the map gives `x' = r1 x / u` and
/// `y' = u (1 - x'/r1) e^{r2 - u}`, so `u` solves `u e^{r2 - u} = c` with
/// `c = y' / (1 - x'/r1)`. The left side peaks at `u = 1`, giving one root on
/// each side of the peak.
pub fn preimages_point(f: &MapFamily, target: State, max_roots: usize) -> Result<Vec<State>> {
    let p = preimage_params(f)?;
    if !target.x.is_finite() || !target.y.is_finite() {
        return Err(Error::NonFinite);
    }
    if !(target.x > 0.0 && target.y > 0.0) {
        return Err(Error::Precondition("pre-images of axis points are not isolated"));
    }
    let mut roots = Vec::new();
    if target.x >= p.r1 {
        return Ok(roots);
    }
    let share = 1.0 - target.x / p.r1;
    let log_c = libm::log(target.y) - libm::log(share);
    // ln(u e^{r2-u}) - ln c, increasing on (0, 1], decreasing on [1, ∞)
    let phi = |u: f64| libm::log(u) + p.r2 - u - log_c;
    let dphi = |u: f64| 1.0 / u - 1.0;
    let peak = phi(1.0);
    if peak < 0.0 {
        return Ok(roots);
    }
    let mut us: Vec<f64> = Vec::with_capacity(2);
    if peak == 0.0 {
        us.push(1.0);
    } else {
        if let Some(u) = bisect(phi, f64::MIN_POSITIVE, 1.0, 1e-15) {
            us.push(newton_polish(phi, dphi, u, f64::MIN_POSITIVE, 1.0, 4));
        }
        if let Some(u) = bisect(phi, 1.0, PREIMAGE_U_MAX, 1e-13) {
            us.push(newton_polish(phi, dphi, u, 1.0, PREIMAGE_U_MAX, 4));
        }
    }
    for u in us.into_iter().take(max_roots) {
        roots.push(State::new(target.x * u / p.r1, share * u));
    }
    Ok(roots)
}

/// Factor applied to the target sample spacing to decide whether two
/// consecutive pre-image samples belong to the same polyline.
pub const CHAIN_JUMP_FACTOR: f64 = 10.0;
const MAX_REFINE_DEPTH: u32 = 12;

/// Pre-images of rank `1..=rank` of curve `c`, each rank computed from the
/// previous rank's curves.
///
/// Each target segment is sampled at `samples_per_segment` points; the lower
/// (`u < 1`) and upper (`u > 1`) roots form two branches which are chained
/// into polylines. A gap wider than [`CHAIN_JUMP_FACTOR`] × the segment's
/// sample spacing is refined by bisecting the target segment; if it persists,
/// or a sample has no pre-image on a branch, the polyline is split there.
/// Samples on an axis are skipped.
pub fn preimages_curve(f: &MapFamily, c: &Curve, rank: u32, samples_per_segment: usize) -> Result<Vec<Curve>> {
    preimage_params(f)?;
    if rank == 0 {
        return Err(Error::Precondition("rank must be at least 1"));
    }
    let samples_per_segment = samples_per_segment.max(1);
    let mut out = Vec::new();
    let mut current: Vec<Curve> = alloc::vec![c.clone()];
    for r in 1..=rank {
        let mut next = Vec::new();
        for curve in &current {
            next.extend(preimage_branches(f, curve, r, samples_per_segment)?);
        }
        out.extend(next.iter().cloned());
        current = next;
    }
    Ok(out)
}

/// `[lower, upper]` root for a target, `None` where the branch is absent.
fn branch_roots(f: &MapFamily, target: State) -> [Option<State>; 2] {
    if !(target.x > 0.0 && target.y > 0.0) {
        return [None, None];
    }
    match preimages_point(f, target, 2) {
        Ok(roots) => match roots.as_slice() {
            [lo, hi] => [Some(*lo), Some(*hi)],
            [one] if one.sum() < 1.0 => [Some(*one), None],
            [one] => [None, Some(*one)],
            _ => [None, None],
        },
        Err(_) => [None, None],
    }
}

fn preimage_branches(f: &MapFamily, c: &Curve, rank: u32, samples_per_segment: usize) -> Result<Vec<Curve>> {
    let source = CurveSource::Preimage { rank };
    let mut finished: Vec<Curve> = Vec::new();
    let mut open: [Vec<State>; 2] = [Vec::new(), Vec::new()];
    let close = |branch: &mut Vec<State>, finished: &mut Vec<Curve>| {
        if branch.len() >= 2 {
            let mut curve = Curve::new(core::mem::take(branch), source);
            curve.chain_jump_factor = CHAIN_JUMP_FACTOR;
            if curve.len() >= 2 {
                finished.push(curve);
            }
        }
        branch.clear();
    };
    let mut prev_target: Option<State> = None;
    let mut prev_roots: [Option<State>; 2] = [None, None];
    let n = c.points.len();
    for (i, &a) in c.points.iter().enumerate() {
        let b = if i + 1 < n { c.points[i + 1] } else { a };
        let steps = if i + 1 < n { samples_per_segment } else { 1 };
        for k in 0..steps {
            let t = k as f64 / samples_per_segment as f64;
            let target = State::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
            let roots = branch_roots(f, target);
            for branch in 0..2 {
                match (prev_target, prev_roots[branch], roots[branch]) {
                    (Some(pt), Some(pr), Some(r)) => {
                        let spacing = pt.dist(&target).max(1e-12);
                        let limit = CHAIN_JUMP_FACTOR * spacing;
                        if pr.dist(&r) > limit {
                            let mut fill = Vec::new();
                            if refine_gap(f, branch, pt, target, pr, r, limit, MAX_REFINE_DEPTH, &mut fill) {
                                open[branch].extend(fill);
                            } else {
                                close(&mut open[branch], &mut finished);
                            }
                        }
                        open[branch].push(r);
                    }
                    (_, _, Some(r)) => {
                        close(&mut open[branch], &mut finished);
                        open[branch].push(r);
                    }
                    (_, _, None) => close(&mut open[branch], &mut finished),
                }
            }
            prev_target = Some(target);
            prev_roots = roots;
        }
    }
    for branch in open.iter_mut() {
        close(branch, &mut finished);
    }
    Ok(finished)
}

/// Fills the gap between the pre-images `ra` (of `ta`) and `rb` (of `tb`) on
/// one branch by bisecting the target segment. Returns `false` if the branch
/// is discontinuous there.
#[allow(clippy::too_many_arguments)]
fn refine_gap(
    f: &MapFamily,
    branch: usize,
    ta: State,
    tb: State,
    ra: State,
    rb: State,
    limit: f64,
    depth: u32,
    fill: &mut Vec<State>,
) -> bool {
    if ra.dist(&rb) <= limit {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let mid = State::new(0.5 * (ta.x + tb.x), 0.5 * (ta.y + tb.y));
    let Some(rm) = branch_roots(f, mid)[branch] else {
        return false;
    };
    if !refine_gap(f, branch, ta, mid, ra, rm, limit, depth - 1, fill) {
        return false;
    }
    fill.push(rm);
    refine_gap(f, branch, mid, tb, rm, rb, limit, depth - 1, fill)
}
