//! The analysis pipeline and its JSON report.
//!
//! Stages run in order: bound, closing, solve (with admissibility filter),
//! verify, and optionally the return-map oracle. Any failure is tagged with
//! the stage that produced it.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use log::{debug, info};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use cycles_core::closing::{bound_report, ClosingPair};
use cycles_core::fields::CenterKind;
use cycles_core::orbits::{oracle_scan, verify_cycle, Direction, OracleFixedPoint, VerifiedCycle};
use cycles_core::polycore::BivariatePoly;
use cycles_core::solver::{classify_candidates, CycleCandidate, Verification};

use crate::config::SystemConfig;

/// Absolute tolerance on crossing coordinates for regression and oracle
/// matching.
pub const MATCH_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Bound,
    Closing,
    Solve,
    Verify,
    Oracle,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Bound => "bound",
            Stage::Closing => "closing",
            Stage::Solve => "solve",
            Stage::Verify => "verify",
            Stage::Oracle => "oracle",
            Stage::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("[{stage}] {message}")]
pub struct StageError {
    pub stage: Stage,
    pub message: String,
}

impl StageError {
    pub fn new(stage: Stage, e: impl fmt::Display) -> Self {
        Self {
            stage,
            message: e.to_string(),
        }
    }
}

/// Per-cycle arc data attached by the `verify` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleDetail {
    pub x: f64,
    pub y: f64,
    pub direction: Direction,
    pub period_estimate: f64,
    pub saddle_arc_time: f64,
    pub center_arc_time: f64,
    pub max_integral_drift: f64,
}

impl From<&VerifiedCycle> for CycleDetail {
    fn from(v: &VerifiedCycle) -> Self {
        Self {
            x: v.candidate.x,
            y: v.candidate.y,
            direction: v.direction,
            period_estimate: v.period_estimate,
            saddle_arc_time: v.plus_arc.time,
            center_arc_time: v.minus_arc.time,
            max_integral_drift: v.plus_arc.integral_drift.max(v.minus_arc.integral_drift),
        }
    }
}

/// Fixed points of the composed half maps, compared with the verified
/// cycles and the admissible solutions inside the scanned range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub x_range: (f64, f64),
    pub samples: usize,
    pub fixed_points: Vec<OracleFixedPoint>,
    /// Fixed points and verified cycles pair up one-to-one within
    /// [`MATCH_TOL`].
    pub matches_cycles: bool,
    /// Admissible solutions in range that were rejected by verification and
    /// have no fixed point nearby.
    pub unmatched_admissible: Vec<(f64, f64)>,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub tolerance: f64,
    pub expected: usize,
    pub found: usize,
    pub max_abs_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: CenterKind,
    pub d_i: u32,
    pub bezout: u32,
    pub max_admissible: u32,
    pub solutions: Vec<CycleCandidate>,
    pub cycle_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<CycleDetail>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regression: Option<Regression>,
    /// Wall-clock milliseconds per stage; present only on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub oracle: bool,
    pub details: bool,
    pub timings: bool,
}

/// A finished run: the report plus the verified cycles behind it.
pub struct Analysis {
    pub report: CycleReport,
    pub cycles: Vec<VerifiedCycle>,
}

struct Clock {
    enabled: bool,
    marks: BTreeMap<String, f64>,
    last: Instant,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Self {
            enabled,
            marks: BTreeMap::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, stage: Stage) {
        let now = Instant::now();
        self.marks
            .insert(stage.to_string(), (now - self.last).as_secs_f64() * 1e3);
        self.last = now;
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.marks)
    }
}

/// Pairs sorted lists `a` and `b` one-to-one; returns the largest
/// coordinate deviation when lengths agree.
fn pair_up(a: &[(f64, f64)], b: &[(f64, f64)]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let sort = |v: &[(f64, f64)]| {
        let mut v = v.to_vec();
        v.sort_by(|p, q| p.0.total_cmp(&q.0));
        v
    };
    let (a, b) = (sort(a), sort(b));
    Some(
        a.iter()
            .zip(&b)
            .map(|(p, q)| (p.0 - q.0).abs().max((p.1 - q.1).abs()))
            .fold(0.0, f64::max),
    )
}

pub fn run(cfg: &SystemConfig, opts: RunOptions) -> Result<Analysis, StageError> {
    let mut clock = Clock::new(opts.timings);
    let sp = cfg.saddle;
    let cs = cfg.center_system();

    let bound = bound_report(cs.kind);
    clock.lap(Stage::Bound);

    let pair = ClosingPair::new(&sp, &cs).map_err(|e| StageError::new(Stage::Closing, e))?;
    info!(
        "{}: P_i of degree {}, at most {} admissible",
        cfg.label(),
        pair.d_i,
        pair.max_admissible
    );
    clock.lap(Stage::Closing);

    let mut solutions = classify_candidates(&sp, &cs, &pair, &cfg.solver)
        .map_err(|e| StageError::new(Stage::Solve, e))?;
    info!(
        "{}: {} real solutions, {} admissible",
        cfg.label(),
        solutions.len(),
        solutions.iter().filter(|c| c.admissible).count()
    );
    clock.lap(Stage::Solve);

    let mut cycles = Vec::new();
    for cand in solutions.iter_mut().filter(|c| c.admissible) {
        match verify_cycle(&sp, &cs, cand, &cfg.integrator) {
            Ok(v) => {
                cand.verified = true;
                cand.verification = Verification::Verified;
                cycles.push(v);
            }
            Err(r) => {
                debug!("{}: {r}", cfg.label());
                cand.verification = Verification::Rejected(r.reason);
                cand.notes.push(r.detail);
            }
        }
    }
    for v in &mut cycles {
        v.candidate.verified = true;
        v.candidate.verification = Verification::Verified;
    }
    let cycle_count = cycles.len();
    assert!(
        cycle_count <= pair.max_admissible as usize,
        "{cycle_count} verified cycles exceed the bound {}",
        pair.max_admissible
    );
    clock.lap(Stage::Verify);

    let found: Vec<(f64, f64)> = cycles
        .iter()
        .map(|v| (v.candidate.x, v.candidate.y))
        .collect();
    let oracle = if opts.oracle {
        let o = &cfg.oracle;
        let fixed = oracle_scan(&sp, &cs, o.x_range, o.samples, &o.integrator)
            .map_err(|e| StageError::new(Stage::Oracle, e))?;
        let pts: Vec<(f64, f64)> = fixed.iter().map(|p| (p.x, p.y)).collect();
        let in_range = |x: f64| x >= o.x_range.0 && x <= o.x_range.1;
        let inside: Vec<(f64, f64)> = found.iter().copied().filter(|p| in_range(p.0)).collect();
        let dev = pair_up(&pts, &inside);
        let unmatched_admissible = solutions
            .iter()
            .filter(|c| c.admissible && !c.verified && in_range(c.x))
            .filter(|c| !pts.iter().any(|p| (p.0 - c.x).abs() <= MATCH_TOL))
            .map(|c| (c.x, c.y))
            .collect();
        clock.lap(Stage::Oracle);
        Some(OracleCheck {
            x_range: o.x_range,
            samples: o.samples,
            fixed_points: fixed,
            matches_cycles: dev.is_some_and(|d| d <= MATCH_TOL),
            unmatched_admissible,
            max_deviation: dev.unwrap_or(f64::MAX),
        })
    } else {
        None
    };

    let regression = (!cfg.expected.is_empty()).then(|| {
        let dev = pair_up(&found, &cfg.expected);
        Regression {
            tolerance: MATCH_TOL,
            expected: cfg.expected.len(),
            found: found.len(),
            max_abs_error: dev.unwrap_or(f64::MAX),
            passed: dev.is_some_and(|d| d <= MATCH_TOL),
        }
    });

    let report = CycleReport {
        name: cfg.name.clone(),
        kind: cs.kind,
        d_i: pair.d_i,
        bezout: bound.bezout,
        max_admissible: bound.max_admissible,
        solutions,
        cycle_count,
        cycles: if opts.details {
            cycles.iter().map(CycleDetail::from).collect()
        } else {
            Vec::new()
        },
        oracle,
        regression,
        timings: clock.finish(),
    };
    Ok(Analysis { report, cycles })
}

/// Term list of a polynomial, `[i, j, c]` for `c x^i y^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub degree: u32,
    pub terms: Vec<(u32, u32, f64)>,
    pub text: String,
}

impl From<&BivariatePoly> for PolyJson {
    fn from(p: &BivariatePoly) -> Self {
        Self {
            degree: p.deg_total(),
            terms: p.terms().collect(),
            text: p.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosingReport {
    pub kind: CenterKind,
    pub d_i: u32,
    pub bezout: u32,
    pub max_admissible: u32,
    pub ps: PolyJson,
    pub pi: PolyJson,
}

pub fn closing_report(cfg: &SystemConfig) -> Result<ClosingReport, StageError> {
    let pair = ClosingPair::new(&cfg.saddle, &cfg.center_system())
        .map_err(|e| StageError::new(Stage::Closing, e))?;
    Ok(ClosingReport {
        kind: cfg.center.kind,
        d_i: pair.d_i,
        bezout: pair.bezout,
        max_admissible: pair.max_admissible,
        ps: PolyJson::from(&pair.ps),
        pi: PolyJson::from(&pair.pi),
    })
}
