//! Local stability of 2-cycles, the competition regimes, and numerical
//! persistence diagnostics.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{self, HeteroclinicSettings};
use crate::linalg::Mat2;
use crate::map::{self, MapFamily, Params, State};
use crate::orbits::{self, Orbit2};
use crate::sampling::halton_in_region;

/// Largest orbit residual [`cycle_stability`] accepts.
pub const STALE_ORBIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `DH(p2) · DH(p1)`, the derivative of `H²` at `p1`.
    pub jac_product: Mat2,
    pub trace: f64,
    pub det: f64,
    pub eigenvalues: [Complex64; 2],
    /// `2 > 1 + det > |trace|`
    pub jury_pass: bool,
    pub spectral_radius: f64,
}

/// Jury conditions for a real 2×2 matrix.
pub fn jury_test(trace: f64, det: f64) -> bool {
    2.0 > 1.0 + det && 1.0 + det > libm::fabs(trace)
}

pub fn cycle_stability(f: &MapFamily, o: &Orbit2) -> Result<StabilityReport> {
    let image = map::step(f, o.p1)?;
    let back = map::step(f, image)?;
    let residual = image.dist_max(&o.p2).max(back.dist_max(&o.p1));
    if !(residual <= STALE_ORBIT_TOL) {
        return Err(Error::StaleOrbit { residual });
    }
    let jac_product = map::jacobian(f, o.p2)? * map::jacobian(f, o.p1)?;
    Ok(matrix_stability(jac_product))
}

pub fn matrix_stability(jac_product: Mat2) -> StabilityReport {
    let trace = jac_product.trace();
    let det = jac_product.det();
    let eigenvalues = jac_product.eigenvalues();
    let spectral_radius = eigenvalues[0].norm().max(eigenvalues[1].norm());
    StabilityReport { jac_product, trace, det, eigenvalues, jury_pass: jury_test(trace, det), spectral_radius }
}

/// Second-order expansions of `det(J) + 1` and `trace(J)` for `r1 = 2`,
/// `r2 = 2 + delta`.
pub fn delta_series_check(delta: f64) -> (f64, f64) {
    let base = 2.0 - 8.0 * delta / 3.0;
    (base + 49.0 * delta * delta / 30.0, base + 3.0 * delta * delta / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `r1 > r2`: every orbit with `x0 > 0` tends to `(r1, 0)`.
    XWinsGlobally,
    /// `r1 < r2` and `r1 < e^{2r2-1-e^{r2-1}}`: `y` persists, `x` dies out.
    YPersistsXExtinct,
    /// `r1 < r2` but the extinction test is inconclusive.
    YPersistsXUnresolved,
    /// `r1 = r2`, or a shifted model (`a > 0`) where the results above do not apply.
    Undetermined,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::XWinsGlobally => "X_WINS_GLOBALLY",
            Regime::YPersistsXExtinct => "Y_PERSISTS_X_EXTINCT",
            Regime::YPersistsXUnresolved => "Y_PERSISTS_X_UNRESOLVED",
            Regime::Undetermined => "UNDETERMINED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `2 < r2 < 2.52`, `r2 > r1 > 1` and `e^{2r2-1-e^{r2-1}} > 1`
    pub c1: bool,
    /// The Ricker 2-cycle exists and `r1² / (y1 y2) > 1`.
    pub c2: bool,
    /// A heteroclinic orbit from `(r1, 0)` to `(0, r2)` was traced.
    pub c3: bool,
    /// Transverse eigenvalue at `(r1, 0)`, `e^{r2 - r1}`.
    pub transverse_xi: f64,
    /// Transverse eigenvalue at `(0, r2)`, `r1 / r2`.
    pub transverse_eta: f64,
    pub extinction_threshold: f64,
}

impl RegimeReport {
    pub fn c1_to_c3(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }
}

pub fn classify_regime(p: &Params) -> RegimeReport {
    let (r1, r2) = (p.r1, p.r2);
    let extinction_threshold = p.extinction_threshold();
    let c1 = 2.0 < r2 && r2 < 2.52 && r2 > r1 && r1 > 1.0 && extinction_threshold > 1.0;
    let c2 = orbits::ricker_2cycle(r2).is_ok_and(|c| r1 * r1 / (c.y1 * c.y2) > 1.0);
    let c3 = geometry::trace_heteroclinic(&MapFamily::LotteryRicker(*p), &HeteroclinicSettings::default())
        .is_ok_and(|h| h.found);
    let regime = if !p.is_lottery() || r1 == r2 {
        Regime::Undetermined
    } else if r1 > r2 {
        Regime::XWinsGlobally
    } else if r1 < extinction_threshold {
        Regime::YPersistsXExtinct
    } else {
        Regime::YPersistsXUnresolved
    };
    RegimeReport {
        regime,
        c1,
        c2,
        c3,
        transverse_xi: libm::exp(r2 - r1),
        transverse_eta: r1 / r2,
        extinction_threshold,
    }
}

/// Which Lyapunov function to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// `V = x^{-r1} y` on `D_{r_m}`, for `r1 > r2`.
    XWins,
    /// `V = x / y` on `D_{r1}`, for `r1 < r2` and `r1 < e^{2r2-1-e^{r2-1}}`.
    XExtinct,
}

/// Supremum of `V(H(ξ)) / V(ξ)` over the sampling region.
///
/// For `X_EXTINCT` the ratio is `r1 e^{u - r2} / u` with `u = x + y`, which
/// is maximal at one of the two ends of `[r1, e^{r2-1}]`. The upper end gives
/// `r1 / e^{2r2-1-e^{r2-1}}`; the lower end gives `e^{r1 - r2}`, which is the
/// larger of the two when both rates are small (e.g. `r1 = 0.8, r2 = 1.2`).
pub fn lyapunov_bound(p: &Params, which: Certificate) -> f64 {
    match which {
        Certificate::XWins => libm::exp(p.r2 - p.r1),
        Certificate::XExtinct => (p.r1 / p.extinction_threshold()).max(libm::exp(p.r1 - p.r2)),
    }
}

/// Maximum of `V(H(ξ)) / V(ξ)` over `samples` Halton points of the region.
///
/// The ratio is evaluated from actual map steps, not from its simplified
/// closed form, so it doubles as a check of the bound.
pub fn lyapunov_certificate(p: &Params, which: Certificate, samples: usize) -> Result<f64> {
    if !p.is_lottery() {
        return Err(Error::Precondition("Lyapunov certificates are derived for a = 0"));
    }
    let region = map::invariant_region(p)?;
    let region = match which {
        Certificate::XWins => {
            if !(p.r1 > p.r2) {
                return Err(Error::Precondition("X_WINS requires r1 > r2"));
            }
            region
        }
        Certificate::XExtinct => {
            if !(p.r2 > p.r1 && p.r1 < p.extinction_threshold()) {
                return Err(Error::Precondition("X_EXTINCT requires r2 > r1 and r1 < e^(2 r2 - 1 - e^(r2 - 1))"));
            }
            region.with_eps(p.r1)?
        }
    };
    let f = MapFamily::LotteryRicker(*p);
    let mut max_ratio = f64::NEG_INFINITY;
    for s in halton_in_region(&region, samples, 0) {
        let n = map::step(&f, s)?;
        let log_x = libm::log(n.x) - libm::log(s.x);
        let log_y = libm::log(n.y) - libm::log(s.y);
        let log_ratio = match which {
            Certificate::XWins => -p.r1 * log_x + log_y,
            Certificate::XExtinct => log_x - log_y,
        };
        max_ratio = max_ratio.max(libm::exp(log_ratio));
    }
    Ok(max_ratio)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSettings {
    pub burn_in: usize,
    pub horizon: usize,
    /// A trajectory coming this close to an axis after burn-in is flagged as
    /// a suspected pre-image of the boundary dynamics.
    pub exclusion_tol: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings { burn_in: 1000, horizon: 2000, exclusion_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Interior,
    /// Starts on an axis.
    Boundary,
    /// Came within `exclusion_tol` of an axis after burn-in.
    SuspectedPreimage,
    /// The trajectory left the domain or overflowed.
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRecord {
    pub start: State,
    /// Minimum of `min(x_n, y_n)` over the window after burn-in.
    pub liminf_min: f64,
    /// Maximum of `x_n` over the same window.
    pub limsup_x: f64,
    pub final_state: State,
    pub kind: ProbeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceEstimate {
    /// Smallest `liminf_min` over interior records (0 when there are none).
    pub liminf_min: f64,
    /// Smallest `limsup_x` over interior records (0 when there are none).
    pub limsup_x: f64,
    pub horizon: usize,
    pub burn_in: usize,
    pub sample_points: usize,
    pub interior_count: usize,
    pub boundary_count: usize,
    pub suspected_count: usize,
    pub failed_count: usize,
    pub records: Vec<PointRecord>,
}

impl PersistenceEstimate {
    /// Share of off-axis starting points whose `liminf_min` exceeds `floor`.
    pub fn fraction_above(&self, floor: f64) -> f64 {
        let off_axis = self.records.iter().filter(|r| r.kind != ProbeKind::Boundary);
        let (mut total, mut above) = (0usize, 0usize);
        for r in off_axis {
            total += 1;
            if r.liminf_min > floor {
                above += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            above as f64 / total as f64
        }
    }
}

pub fn probe_point(f: &MapFamily, s0: State, settings: &ProbeSettings) -> PointRecord {
    let mut record =
        PointRecord { start: s0, liminf_min: f64::INFINITY, limsup_x: 0.0, final_state: s0, kind: ProbeKind::Interior };
    if f.check_state(s0).is_err() {
        record.kind = ProbeKind::Failed;
        record.liminf_min = 0.0;
        return record;
    }
    if !s0.is_interior() {
        record.kind = ProbeKind::Boundary;
    }
    let mut s = s0;
    for n in 0..settings.horizon {
        s = match map::step(f, s) {
            Ok(next) if next.x <= map::OVERFLOW_GUARD && next.y <= map::OVERFLOW_GUARD => next,
            _ => {
                record.kind = ProbeKind::Failed;
                break;
            }
        };
        if n + 1 > settings.burn_in {
            let low = s.x.min(s.y);
            record.liminf_min = record.liminf_min.min(low);
            record.limsup_x = record.limsup_x.max(s.x);
            if low < settings.exclusion_tol && record.kind == ProbeKind::Interior {
                record.kind = ProbeKind::SuspectedPreimage;
            }
        }
    }
    if !record.liminf_min.is_finite() {
        record.liminf_min = s.x.min(s.y);
    }
    record.final_state = s;
    record
}

/// Aggregates per-point records (in the given order).
pub fn summarize(records: Vec<PointRecord>, settings: &ProbeSettings) -> PersistenceEstimate {
    let interior = || records.iter().filter(|r| r.kind == ProbeKind::Interior);
    let count = |k: ProbeKind| records.iter().filter(|r| r.kind == k).count();
    let interior_count = interior().count();
    let (liminf_min, limsup_x) = if interior_count == 0 {
        (0.0, 0.0)
    } else {
        (
            interior().map(|r| r.liminf_min).fold(f64::INFINITY, f64::min),
            interior().map(|r| r.limsup_x).fold(f64::INFINITY, f64::min),
        )
    };
    PersistenceEstimate {
        liminf_min,
        limsup_x,
        horizon: settings.horizon,
        burn_in: settings.burn_in,
        sample_points: records.len(),
        interior_count,
        boundary_count: count(ProbeKind::Boundary),
        suspected_count: count(ProbeKind::SuspectedPreimage),
        failed_count: count(ProbeKind::Failed),
        records,
    }
}

/// Runs [`probe_point`] for every starting point, sequentially.
pub fn persistence_probe(f: &MapFamily, points: &[State], settings: &ProbeSettings) -> Result<PersistenceEstimate> {
    if settings.horizon <= settings.burn_in {
        return Err(Error::Precondition("horizon must exceed burn_in"));
    }
    let records = points.iter().map(|&s| probe_point(f, s, settings)).collect();
    Ok(summarize(records, settings))
}
