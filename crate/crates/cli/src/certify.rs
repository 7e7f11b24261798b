//! Text report combining the regime tests, the Lyapunov-ratio certificate and
//! the persistence probe.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lottery_ricker::geometry::{self, HeteroclinicResult, HeteroclinicSettings};
use lottery_ricker::stability::{self, Certificate, PersistenceEstimate, ProbeSettings, Regime, RegimeReport};
use lottery_ricker::{MapFamily, Params, State};

use crate::error::CliResult;
use crate::parallel;

/// `n` points drawn uniformly from `(0, x_max] × (0, y_max]`.
pub fn random_interior_points(seed: u64, n: usize, x_max: f64, y_max: f64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // gen() lies in [0, 1); flip it so the axes are excluded
            let u: f64 = 1.0 - rng.gen::<f64>();
            let v: f64 = 1.0 - rng.gen::<f64>();
            State::new(u * x_max, v * y_max)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub seed: u64,
    pub lyapunov_samples: usize,
    pub points: usize,
    pub x_max: f64,
    pub y_max: f64,
    pub probe: ProbeSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovOutcome {
    pub which: Certificate,
    pub max_ratio: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub params: Params,
    pub options: CertifyOptions,
    pub regime: RegimeReport,
    pub heteroclinic: Option<HeteroclinicResult>,
    pub lyapunov: Option<LyapunovOutcome>,
    pub probe: PersistenceEstimate,
}

pub const LIMINF_FLOOR: f64 = 0.01;

pub fn certify(p: &Params, opts: &CertifyOptions) -> CliResult<CertifyReport> {
    let f = MapFamily::LotteryRicker(*p);
    let regime = stability::classify_regime(p);
    let heteroclinic = geometry::trace_heteroclinic(&f, &HeteroclinicSettings::default()).ok();
    let which = match regime.regime {
        Regime::XWinsGlobally => Some(Certificate::XWins),
        Regime::YPersistsXExtinct => Some(Certificate::XExtinct),
        _ => None,
    };
    let lyapunov = match which {
        Some(which) => Some(LyapunovOutcome {
            which,
            max_ratio: stability::lyapunov_certificate(p, which, opts.lyapunov_samples)?,
            bound: stability::lyapunov_bound(p, which),
        }),
        None => None,
    };
    let points = random_interior_points(opts.seed, opts.points, opts.x_max, opts.y_max);
    let probe = parallel::par_probe(&f, &points, &opts.probe)?;
    Ok(CertifyReport { params: *p, options: *opts, regime, heteroclinic, lyapunov, probe })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl CertifyReport {
    pub fn render(&self) -> String {
        let p = &self.params;
        let r = &self.regime;
        let o = &self.options;
        let mut s = String::new();
        let _ = writeln!(s, "certify r1={} r2={} a={} seed={}", p.r1, p.r2, p.a, o.seed);
        let _ = writeln!(s, "regime: {}", r.regime.name());
        let _ = writeln!(s, "extinction_threshold: {}", r.extinction_threshold);
        let _ = writeln!(s, "transverse_eigenvalue_xi: {}", r.transverse_xi);
        let _ = writeln!(s, "transverse_eigenvalue_eta: {}", r.transverse_eta);
        let _ = writeln!(s, "C1 (2 < r2 < 2.52, r2 > r1 > 1, threshold > 1): {}", verdict(r.c1));
        let _ = writeln!(s, "C2 (Ricker 2-cycle with r1^2 / (y1 y2) > 1): {}", verdict(r.c2));
        let _ = writeln!(s, "C3 (orbit from (r1, 0) reaches (0, r2)): {}", verdict(r.c3));
        match &self.heteroclinic {
            Some(h) => {
                let _ = writeln!(
                    s,
                    "heteroclinic: min_dist_to_eta={} closest_step={} exit={:?}",
                    h.min_dist_to_eta, h.closest_step, h.exit_reason
                );
            }
            None => {
                let _ = writeln!(s, "heteroclinic: not traced ((r1, 0) is not transversally unstable)");
            }
        }
        match &self.lyapunov {
            Some(l) => {
                let name = match l.which {
                    Certificate::XWins => "X_WINS",
                    Certificate::XExtinct => "X_EXTINCT",
                };
                let _ = writeln!(
                    s,
                    "lyapunov {name}: max_ratio={} bound={} samples={}: {}",
                    l.max_ratio,
                    l.bound,
                    o.lyapunov_samples,
                    verdict(l.max_ratio <= l.bound + 1e-12 && l.max_ratio < 1.0)
                );
            }
            None => {
                let _ = writeln!(s, "lyapunov: not applicable in this regime");
            }
        }
        let e = &self.probe;
        let _ = writeln!(
            s,
            "persistence: points={} window=(0,{}]x(0,{}] burn_in={} horizon={} exclusion_tol={}",
            e.sample_points, o.x_max, o.y_max, e.burn_in, e.horizon, o.probe.exclusion_tol
        );
        let _ = writeln!(
            s,
            "persistence: liminf_min={} limsup_x={} interior={} suspected={} boundary={} failed={}",
            e.liminf_min, e.limsup_x, e.interior_count, e.suspected_count, e.boundary_count, e.failed_count
        );
        let frac = e.fraction_above(LIMINF_FLOOR);
        let _ =
            writeln!(s, "persistence: fraction_liminf_above_{LIMINF_FLOOR}={frac}: {}", verdict(e.liminf_min > 0.0));
        s
    }
}
