//! The two map families, one step of the dynamics, Jacobians, and the
//! compact absorbing region `D_eps`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat2;

/// Coordinates below this are flushed to exactly zero after every step.
pub const UNDERFLOW_FLUSH: f64 = 1e-308;
/// [`iterate`] stops once a coordinate grows past this.
pub const OVERFLOW_GUARD: f64 = 1e300;

/// Lottery-Ricker parameters. `a = 0` is the pure lottery model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub r1: f64,
    pub r2: f64,
    pub a: f64,
}

impl Params {
    pub fn new(r1: f64, r2: f64, a: f64) -> Result<Self> {
        check_param("r1", r1, |v| v > 0.0)?;
        check_param("r2", r2, |v| v > 0.0)?;
        check_param("a", a, |v| v >= 0.0)?;
        Ok(Params { r1, r2, a })
    }

    /// Shorthand for the `a = 0` lottery model.
    pub fn lottery(r1: f64, r2: f64) -> Result<Self> {
        Params::new(r1, r2, 0.0)
    }

    pub fn is_lottery(&self) -> bool {
        self.a == 0.0
    }

    /// `e^{2 r2 - 1 - e^{r2 - 1}}`, the value of `u e^{r2 - u}` at the upper
    /// edge `u = e^{r2 - 1}` of `D_eps`. Species `x` dies out when `r1` is below it.
    pub fn extinction_threshold(&self) -> f64 {
        libm::exp(2.0 * self.r2 - 1.0 - libm::exp(self.r2 - 1.0))
    }
}

/// Ricker competition with constant per-capita stocking `s1` of species `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StockingParams {
    pub s1: f64,
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl StockingParams {
    pub fn new(s1: f64, q1: f64, q2: f64, p1: f64, p2: f64) -> Result<Self> {
        check_param("s1", s1, |v| v >= 0.0)?;
        check_param("q1", q1, |v| v > 0.0)?;
        check_param("q2", q2, |v| v > 0.0)?;
        check_param("p1", p1, |v| v > 0.0)?;
        check_param("p2", p2, |v| v > 0.0)?;
        Ok(StockingParams { s1, q1, q2, p1, p2 })
    }

    /// Nonzero fixed point on the `x`-axis, `s1 + e^{q1 - p1 x} = 1`.
    /// Exists only for `s1 < 1` (otherwise `x` grows without bound).
    pub fn x_axis_equilibrium(&self) -> Option<State> {
        if self.s1 >= 1.0 {
            return None;
        }
        let x = (self.q1 - libm::log(1.0 - self.s1)) / self.p1;
        Some(State::new(x, 0.0))
    }

    pub fn y_axis_equilibrium(&self) -> State {
        State::new(0.0, self.q2 / self.p2)
    }
}

fn check_param(name: &'static str, value: f64, ok: impl Fn(f64) -> bool) -> Result<()> {
    if value.is_finite() && ok(value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapFamily {
    LotteryRicker(Params),
    StockingRicker(StockingParams),
}

impl MapFamily {
    pub fn lottery(r1: f64, r2: f64, a: f64) -> Result<Self> {
        Params::new(r1, r2, a).map(MapFamily::LotteryRicker)
    }

    pub fn stocking(s1: f64, q1: f64, q2: f64, p1: f64, p2: f64) -> Result<Self> {
        StockingParams::new(s1, q1, q2, p1, p2).map(MapFamily::StockingRicker)
    }

    pub fn lottery_params(&self) -> Option<&Params> {
        match self {
            MapFamily::LotteryRicker(p) => Some(p),
            MapFamily::StockingRicker(_) => None,
        }
    }

    /// Whether the origin is outside the family's domain.
    pub fn singular_at_origin(&self) -> bool {
        matches!(self, MapFamily::LotteryRicker(p) if p.a == 0.0)
    }

    /// Checks `s` against the family's state space.
    pub fn check_state(&self, s: State) -> Result<()> {
        if !s.x.is_finite() || !s.y.is_finite() {
            return Err(Error::NonFinite);
        }
        if s.x < 0.0 || s.y < 0.0 {
            return Err(Error::InvalidState { x: s.x, y: s.y });
        }
        if self.singular_at_origin() && s.x + s.y == 0.0 {
            return Err(Error::Singular);
        }
        Ok(())
    }
}

/// A point of the closed positive quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        State { x, y }
    }

    pub fn sum(&self) -> f64 {
        self.x + self.y
    }

    /// Max-norm distance.
    pub fn dist_max(&self, other: &State) -> f64 {
        libm::fmax(libm::fabs(self.x - other.x), libm::fabs(self.y - other.y))
    }

    pub fn dist(&self, other: &State) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn is_interior(&self) -> bool {
        self.x > 0.0 && self.y > 0.0
    }

    fn flushed(self) -> State {
        State {
            x: if self.x < UNDERFLOW_FLUSH { 0.0 } else { self.x },
            y: if self.y < UNDERFLOW_FLUSH { 0.0 } else { self.y },
        }
    }
}

/// One application of the map.
///
/// The axes are invariant: a zero coordinate stays exactly zero, and
/// coordinates that fall below [`UNDERFLOW_FLUSH`] are set to zero.
pub fn step(f: &MapFamily, s: State) -> Result<State> {
    f.check_state(s)?;
    let u = s.x + s.y;
    let next = match f {
        MapFamily::LotteryRicker(p) => {
            let denom = p.a + u;
            let x = if s.x == 0.0 {
                0.0
            } else if s.y == 0.0 && p.a == 0.0 {
                p.r1
            } else {
                p.r1 * s.x / denom
            };
            let y = if s.y == 0.0 { 0.0 } else { s.y * libm::exp(p.r2 - u) };
            State { x, y }
        }
        MapFamily::StockingRicker(p) => {
            let x = if s.x == 0.0 { 0.0 } else { s.x * (p.s1 + libm::exp(p.q1 - p.p1 * u)) };
            let y = if s.y == 0.0 { 0.0 } else { s.y * libm::exp(p.q2 - p.p2 * u) };
            State { x, y }
        }
    };
    if !next.x.is_finite() || !next.y.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(next.flushed())
}

/// Analytic derivative of [`step`] at `s`.
pub fn jacobian(f: &MapFamily, s: State) -> Result<Mat2> {
    f.check_state(s)?;
    let (x, y) = (s.x, s.y);
    let u = x + y;
    let m = match f {
        MapFamily::LotteryRicker(p) => {
            let d = p.a + u;
            let d2 = d * d;
            let e = libm::exp(p.r2 - u);
            Mat2::new(p.r1 * (p.a + y) / d2, -p.r1 * x / d2, -y * e, (1.0 - y) * e)
        }
        MapFamily::StockingRicker(p) => {
            let e1 = libm::exp(p.q1 - p.p1 * u);
            let e2 = libm::exp(p.q2 - p.p2 * u);
            Mat2::new(p.s1 + e1 - p.p1 * x * e1, -p.p1 * x * e1, -p.p2 * y * e2, e2 - p.p2 * y * e2)
        }
    };
    if m.m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

/// A finite orbit segment. `halted` is set when iteration stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub halted: Option<Error>,
}

impl Trajectory {
    pub fn last(&self) -> State {
        *self.states.last().expect("trajectory always holds its initial state")
    }
}

/// `s0, H(s0), ..., H^n(s0)`.
pub fn iterate(f: &MapFamily, s0: State, n: usize) -> Result<Trajectory> {
    f.check_state(s0)?;
    let mut states = Vec::with_capacity(n.saturating_add(1).min(1 << 24));
    states.push(s0);
    let mut s = s0;
    for k in 0..n {
        match step(f, s) {
            Ok(next) if next.x > OVERFLOW_GUARD || next.y > OVERFLOW_GUARD => {
                return Ok(Trajectory { states, halted: Some(Error::Overflow { step: k + 1 }) });
            }
            Ok(next) => {
                states.push(next);
                s = next;
            }
            Err(e) => return Ok(Trajectory { states, halted: Some(e) }),
        }
    }
    Ok(Trajectory { states, halted: None })
}

/// `H^n(s0)` without storing the trajectory.
pub fn iterate_final(f: &MapFamily, s0: State, n: usize) -> Result<State> {
    let mut s = s0;
    for k in 0..n {
        s = step(f, s)?;
        if s.x > OVERFLOW_GUARD || s.y > OVERFLOW_GUARD {
            return Err(Error::Overflow { step: k + 1 });
        }
    }
    Ok(s)
}

/// The compact positively invariant region `eps <= x + y <= upper` of the
/// `a = 0` lottery map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantRegion {
    pub eps: f64,
    pub upper: f64,
    /// Largest admissible `eps`.
    pub r_m: f64,
}

impl InvariantRegion {
    /// Same region with a smaller lower bound.
    pub fn with_eps(self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= self.r_m) {
            return Err(Error::InvalidParameter { name: "eps", value: eps });
        }
        Ok(InvariantRegion { eps, ..self })
    }

    /// Membership with a relative slack `rel` on both bounds.
    pub fn contains_within(&self, s: State, rel: f64) -> bool {
        let u = s.sum();
        s.x >= 0.0 && s.y >= 0.0 && u >= self.eps * (1.0 - rel) && u <= self.upper * (1.0 + rel)
    }

    pub fn contains(&self, s: State) -> bool {
        self.contains_within(s, 0.0)
    }
}

/// `D_eps` with `r_m = min{r1, r2, e^{2r2-1-e^{r2-1}}, r1 e^{r2-r1}}` and
/// `upper = max{r1, e^{r2-1}}`; `eps` defaults to `r_m`.
pub fn invariant_region(p: &Params) -> Result<InvariantRegion> {
    if !p.is_lottery() {
        return Err(Error::Unsupported("invariant region is derived for a = 0"));
    }
    if p.r1 == p.r2 {
        return Err(Error::EqualGrowthRates);
    }
    let r_m = p.r1.min(p.r2).min(p.extinction_threshold()).min(p.r1 * libm::exp(p.r2 - p.r1));
    let upper = p.r1.max(libm::exp(p.r2 - 1.0));
    Ok(InvariantRegion { eps: r_m, upper, r_m })
}
