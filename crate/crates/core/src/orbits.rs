//! Fixed points and period-2 orbits.
//!
//! The interior 2-cycle of the lottery-Ricker map has closed-form sums
//! `s = r2 ∓ sqrt((r2 + a)^2 - r1^2)`; each point of the cycle follows from its
//! own sum and its partner's. The closed form is then polished by Newton's
//! method on `H²(p) - p`.
//!
//! Labeling: [`Orbit2::p1`] is always the point with the smaller sum.

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::map::{self, MapFamily, Params, State};
use crate::roots::{bisect, newton_polish};

/// Residual required from every orbit this module returns.
pub const ORBIT_RESIDUAL_TOL: f64 = 1e-10;
const MAX_NEWTON_STEPS: usize = 20;

/// Ricker 2-cycle `{y1, y2}` on the `y`-axis, `0 < y1 < r2 < y2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCycle {
    pub y1: f64,
    pub y2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit2 {
    pub p1: State,
    pub p2: State,
    /// `p1.x + p1.y`
    pub s1: f64,
    /// `p2.x + p2.y`
    pub s2: f64,
    /// Max-norm of `H²(p) - p` over both points.
    pub residual: f64,
    /// How far Newton moved the seed point.
    pub polish_shift: f64,
    /// Set when the printed closed-form formula for this family names the
    /// larger-sum point as its first point (the `a > 0` formulas do).
    pub printed_labeling_swapped: bool,
}

impl Orbit2 {
    pub fn points(&self) -> [State; 2] {
        [self.p1, self.p2]
    }
}

/// Results of the four sufficient conditions for the interior 2-cycle, `a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExistenceReport {
    /// `s1 e^{r2 - s1} > s2`
    pub cond1: bool,
    /// `r2 - sqrt(r2² - r1²) > y1` with `y1` from the Ricker 2-cycle.
    pub cond2: bool,
    /// `2 <= r1 < r2 < 2.5` and `r1 > r2 - ((r2 - 2)/0.26)² / (2 r2)`
    pub cond3: bool,
    /// `2.085 <= r1 <= r2 <= 2.5`
    pub cond4: bool,
    /// `cond4 ⇒ cond3 ⇒ cond2 ⇒ cond1`
    pub implication_chain_ok: bool,
}

/// `ξ* = (r1 - a, 0)` and `η* = (0, r2)`.
///
/// For `a = 0` this is `((r1, 0), (0, r2))`. When `r1 <= a` the only
/// equilibrium on the `x`-axis is the origin.
pub fn boundary_equilibria(p: &Params) -> (State, State) {
    (State::new((p.r1 - p.a).max(0.0), 0.0), State::new(0.0, p.r2))
}

/// The 2-cycle of `y ↦ y e^{r2 - y}`.
///
/// Writing `y1 = r2 - d`, `y2 = r2 + d`, the cycle condition becomes
/// `(r2 - d) expm1(d) - 2d = 0`. Dividing by `d` removes the trivial root at
/// the fixed point, so bisection on `(0, r2]` is safe right down to the
/// period-doubling at `r2 = 2`.
pub fn ricker_2cycle(r2: f64) -> Result<BoundaryCycle> {
    if !r2.is_finite() || r2 <= 2.0 {
        return Err(Error::NoBoundaryCycle { r2 });
    }
    let reduced = |d: f64| (r2 - d) * (libm::expm1(d) / d) - 2.0;
    let d = bisect(reduced, f64::MIN_POSITIVE, r2, 1e-12).ok_or(Error::NotConverged("Ricker 2-cycle bracket"))?;
    let k = |d: f64| (r2 - d) * libm::expm1(d) - 2.0 * d;
    let dk = |d: f64| (r2 - d) * libm::exp(d) - libm::expm1(d) - 2.0;
    let d = newton_polish(k, dk, d, 0.0, r2, 5);
    Ok(BoundaryCycle { y1: r2 - d, y2: r2 + d })
}

/// Cycle point whose total population is `own` and whose image has total `other`.
fn point_from_sums(p: &Params, own: f64, other: f64) -> State {
    let shifted = p.a + own;
    let e = libm::exp(p.r2 - own);
    let den = p.r1 - shifted * e;
    State::new(shifted * (other - own * e) / den, (p.r1 * own - other * shifted) / den)
}

fn strictly_interior(s: &State) -> bool {
    s.x.is_finite() && s.y.is_finite() && s.x > 0.0 && s.y > 0.0
}

/// Closed-form interior 2-cycle of the lottery-Ricker map, Newton-polished.
pub fn interior_2cycle(f: &MapFamily) -> Result<Orbit2> {
    let p = f
        .lottery_params()
        .ok_or(Error::Unsupported("closed-form interior 2-cycle exists for the lottery-Ricker family only"))?;
    let disc = (p.r2 + p.a) * (p.r2 + p.a) - p.r1 * p.r1;
    if p.is_lottery() {
        if p.r2 <= p.r1 {
            return Err(Error::NoInteriorOrbit("r2 must exceed r1"));
        }
    } else {
        if disc <= 0.0 {
            return Err(Error::Precondition("(r2 + a)^2 must exceed r1^2"));
        }
        if p.r1 * p.r1 <= 2.0 * p.a * p.r2 {
            return Err(Error::Precondition("r1^2 must exceed 2 a r2"));
        }
    }
    let root = libm::sqrt(disc);
    let (s_low, s_high) = (p.r2 - root, p.r2 + root);
    let p1 = point_from_sums(p, s_low, s_high);
    let p2 = point_from_sums(p, s_high, s_low);
    if !(s_low > 0.0 && strictly_interior(&p1) && strictly_interior(&p2)) {
        return Err(Error::NoInteriorOrbit("closed form leaves the open quadrant"));
    }
    let mut orbit = polish_2cycle(f, p1)?;
    orbit.printed_labeling_swapped = !p.is_lottery();
    Ok(orbit)
}

/// Derivative of `H²` at `s`, chain rule `DH(H(s)) · DH(s)`.
pub fn second_iterate_jacobian(f: &MapFamily, s: State) -> Result<Mat2> {
    let next = map::step(f, s)?;
    Ok(map::jacobian(f, next)? * map::jacobian(f, s)?)
}

fn h2_residual(f: &MapFamily, s: State) -> Result<f64> {
    let back = map::step(f, map::step(f, s)?)?;
    Ok(back.dist_max(&s))
}

/// Newton's method on `H²(p) - p` from `seed`, for any family.
///
/// Fails with [`Error::NotConverged`] unless the polished residual is at most
/// [`ORBIT_RESIDUAL_TOL`].
pub fn polish_2cycle(f: &MapFamily, seed: State) -> Result<Orbit2> {
    let mut s = seed;
    let mut res = h2_residual(f, s)?;
    for _ in 0..MAX_NEWTON_STEPS {
        if res == 0.0 {
            break;
        }
        let image = map::step(f, map::step(f, s)?)?;
        let jac = second_iterate_jacobian(f, s)?.sub(&Mat2::IDENTITY);
        let Some(delta) = jac.solve([image.x - s.x, image.y - s.y]) else {
            break;
        };
        let cand = State::new(s.x - delta[0], s.y - delta[1]);
        if cand.x < 0.0 || cand.y < 0.0 {
            break;
        }
        let cand_res = match h2_residual(f, cand) {
            Ok(r) => r,
            Err(_) => break,
        };
        if !(cand_res < res) {
            break;
        }
        s = cand;
        res = cand_res;
    }
    let other = map::step(f, s)?;
    let residual = res.max(h2_residual(f, other)?);
    if !(residual <= ORBIT_RESIDUAL_TOL) {
        return Err(Error::NotConverged("2-cycle Newton polish"));
    }
    let shift = s.dist_max(&seed);
    let (p1, p2) = if s.sum() <= other.sum() { (s, other) } else { (other, s) };
    Ok(Orbit2 { p1, p2, s1: p1.sum(), s2: p2.sum(), residual, polish_shift: shift, printed_labeling_swapped: false })
}

/// Runs `transient` steps from `s0` and polishes the end point as a 2-cycle.
/// Used for families without a closed form.
pub fn find_2cycle(f: &MapFamily, s0: State, transient: usize) -> Result<Orbit2> {
    let s = map::iterate_final(f, s0, transient)?;
    polish_2cycle(f, s)
}

/// Evaluates the four existence conditions literally (`a` is ignored; they are
/// stated for the `a = 0` model).
pub fn existence_conditions(p: &Params) -> ExistenceReport {
    let (r1, r2) = (p.r1, p.r2);
    let disc = r2 * r2 - r1 * r1;
    let sums = (disc >= 0.0).then(|| {
        let root = libm::sqrt(disc);
        (r2 - root, r2 + root)
    });
    let cond1 = sums.is_some_and(|(s1, s2)| s1 * libm::exp(r2 - s1) > s2);
    let cond2 = match (sums, ricker_2cycle(r2)) {
        (Some((s1, _)), Ok(cycle)) => s1 > cycle.y1,
        _ => false,
    };
    let bound = (r2 - 2.0) / 0.26;
    let cond3 = 2.0 <= r1 && r1 < r2 && r2 < 2.5 && r1 > r2 - bound * bound / (2.0 * r2);
    let cond4 = 2.085 <= r1 && r1 <= r2 && r2 <= 2.5;
    let implication_chain_ok = (!cond4 || cond3) && (!cond3 || cond2) && (!cond2 || cond1);
    ExistenceReport { cond1, cond2, cond3, cond4, implication_chain_ok }
}
