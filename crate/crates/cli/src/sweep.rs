//! One-parameter sweeps of the interior 2-cycle and its stability.

use std::io::Write;
use std::str::FromStr;

use lottery_ricker::orbits::{self, ExistenceReport, Orbit2};
use lottery_ricker::stability::{self, StabilityReport};
use lottery_ricker::{Error, MapFamily, Params};

use crate::error::{CliError, CliResult};
use crate::formats::{csv_writer, num};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// `r1 = 2`, `r2 = 2 + delta`
    Delta,
    R1,
    R2,
    A,
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(SweepParam::Delta),
            "r1" => Ok(SweepParam::R1),
            "r2" => Ok(SweepParam::R2),
            "a" => Ok(SweepParam::A),
            other => Err(format!("unknown sweep parameter {other:?} (expected delta, r1, r2 or a)")),
        }
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::R1 => "r1",
            SweepParam::R2 => "r2",
            SweepParam::A => "a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(param: SweepParam, start: f64, stop: f64, steps: usize) -> CliResult<Self> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(CliError::validation(format!("sweep needs finite start < stop, got {start} and {stop}")));
        }
        if steps < 2 {
            return Err(CliError::validation(format!("sweep needs at least 2 steps, got {steps}")));
        }
        Ok(SweepSpec { param, start, stop, steps })
    }

    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            return self.stop;
        }
        self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64
    }
}

pub const COLUMNS: [&str; 15] = [
    "param",
    "status",
    "x1",
    "y1",
    "x2",
    "y2",
    "s1",
    "s2",
    "det_plus_1",
    "abs_trace",
    "jury_pass",
    "cond1",
    "cond2",
    "cond3",
    "cond4",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub status: &'static str,
    pub orbit: Option<Orbit2>,
    pub stability: Option<StabilityReport>,
    pub conditions: Option<ExistenceReport>,
}

/// Short machine-readable tag for a row that could not be computed.
pub fn status_code(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter { .. } => "invalid_parameter",
        Error::InvalidState { .. } => "invalid_state",
        Error::Singular => "singular",
        Error::NonFinite => "non_finite",
        Error::Overflow { .. } => "overflow",
        Error::EqualGrowthRates => "equal_growth_rates",
        Error::NoBoundaryCycle { .. } => "no_boundary_cycle",
        Error::NoInteriorOrbit(_) => "no_interior_orbit",
        Error::Precondition(_) => "precondition",
        Error::Unsupported(_) => "unsupported",
        Error::StaleOrbit { .. } => "stale_orbit",
        Error::NotConverged(_) => "not_converged",
    }
}

pub fn row_params(base: &Params, param: SweepParam, v: f64) -> Result<Params, Error> {
    match param {
        SweepParam::Delta => Params::new(2.0, 2.0 + v, base.a),
        SweepParam::R1 => Params::new(v, base.r2, base.a),
        SweepParam::R2 => Params::new(base.r1, v, base.a),
        SweepParam::A => Params::new(base.r1, base.r2, v),
    }
}

pub fn sweep_row(base: &Params, param: SweepParam, v: f64) -> SweepRow {
    let mut row = SweepRow { value: v, status: "ok", orbit: None, stability: None, conditions: None };
    let p = match row_params(base, param, v) {
        Ok(p) => p,
        Err(e) => {
            row.status = status_code(&e);
            return row;
        }
    };
    row.conditions = Some(orbits::existence_conditions(&p));
    let f = MapFamily::LotteryRicker(p);
    match orbits::interior_2cycle(&f).and_then(|o| stability::cycle_stability(&f, &o).map(|s| (o, s))) {
        Ok((o, s)) => {
            row.orbit = Some(o);
            row.stability = Some(s);
        }
        Err(e) => row.status = status_code(&e),
    }
    row
}

pub fn run_sweep(base: &Params, spec: &SweepSpec) -> Vec<SweepRow> {
    (0..spec.steps).map(|k| sweep_row(base, spec.param, spec.value(k))).collect()
}

pub fn write_sweep<W: Write>(w: W, rows: &[SweepRow]) -> CliResult<()> {
    let mut out = csv_writer(w);
    out.write_record(COLUMNS)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let flag = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
    for r in rows {
        let o = r.orbit.as_ref();
        let s = r.stability.as_ref();
        let c = r.conditions.as_ref();
        out.write_record([
            num(r.value),
            r.status.to_string(),
            opt(o.map(|o| o.p1.x)),
            opt(o.map(|o| o.p1.y)),
            opt(o.map(|o| o.p2.x)),
            opt(o.map(|o| o.p2.y)),
            opt(o.map(|o| o.s1)),
            opt(o.map(|o| o.s2)),
            opt(s.map(|s| s.det + 1.0)),
            opt(s.map(|s| s.trace.abs())),
            flag(s.map(|s| s.jury_pass)),
            flag(c.map(|c| c.cond1)),
            flag(c.map(|c| c.cond2)),
            flag(c.map(|c| c.cond3)),
            flag(c.map(|c| c.cond4)),
        ])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Consecutive computed rows where `jury_pass` flips, as `(before, after)`
/// parameter values.
pub fn jury_transitions(rows: &[SweepRow]) -> Vec<(f64, f64, bool)> {
    let decided: Vec<(f64, bool)> = rows.iter().filter_map(|r| r.stability.map(|s| (r.value, s.jury_pass))).collect();
    decided.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| (w[0].0, w[1].0, w[1].1)).collect()
}
