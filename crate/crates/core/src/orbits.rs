//! Orbit integration, cycle verification and the half-map oracle.
//!
//! Arcs are integrated with the Dormand–Prince 5(4) pair. Events are sign
//! changes of scalar functions along the trajectory, located by bisection on
//! the continuous extension of each accepted step.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{CenterSystem, Flow, Point, SaddleParams};
use crate::solver::{CycleCandidate, RejectReason};

/// Accepted arcs may drift at most this much in their first integral.
pub const MAX_DRIFT: f64 = 1e-6;
/// Relative closing tolerance for arc endpoints.
pub const MATCH_RTOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_arc_time: f64,
    pub event_tol: f64,
    /// Arcs farther than this from the origin are abandoned.
    pub max_radius: f64,
    /// First-integral denominators below this end the arc.
    pub singular_tol: f64,
}

impl Default for IntegratorOpts {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_arc_time: 1e3,
            event_tol: 1e-10,
            max_radius: 1e6,
            singular_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("integrator option {0} must be finite and positive")]
    InvalidOption(&'static str),
    #[error("start point {0} is an equilibrium")]
    Equilibrium(Point),
    #[error("no connection: arc ended with {0:?}")]
    NoConnection(ArcStatus),
    #[error("oracle scan needs at least two samples on a nonempty range")]
    InvalidScan,
}

impl IntegratorOpts {
    pub fn validate(&self) -> Result<(), OrbitError> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_arc_time", self.max_arc_time),
            ("event_tol", self.event_tol),
            ("max_radius", self.max_radius),
            ("singular_tol", self.singular_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(OrbitError::InvalidOption(name));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArcStatus {
    Closed,
    LeftRegion,
    Timeout,
    SingularityHit,
    Escaped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcResult {
    pub endpoint: Point,
    pub status: ArcStatus,
    /// Elapsed time, always nonnegative.
    pub time: f64,
    pub integral_drift: f64,
    pub samples: Vec<Point>,
}

/// A sign change of `g` that ends the arc with `outcome` when `accept`
/// holds at the located point; rejected crossings are passed through.
pub struct Event<'a> {
    pub g: Box<dyn Fn(Point) -> f64 + 'a>,
    pub accept: Box<dyn Fn(Point) -> bool + 'a>,
    pub outcome: ArcStatus,
}

impl<'a> Event<'a> {
    pub fn new(
        g: impl Fn(Point) -> f64 + 'a,
        accept: impl Fn(Point) -> bool + 'a,
        outcome: ArcStatus,
    ) -> Self {
        Self {
            g: Box::new(g),
            accept: Box::new(accept),
            outcome,
        }
    }

    /// Crossing of `x = 0` at `y > 0`.
    pub fn positive_y_axis(outcome: ArcStatus) -> Self {
        Self::new(|p| p.x, |p| p.y > 0.0, outcome)
    }

    /// Crossing of `y = 0` at `x > 0`.
    pub fn positive_x_axis(outcome: ArcStatus) -> Self {
        Self::new(|p| p.y, |p| p.x > 0.0, outcome)
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 2_000_000;
const BISECTION_ITERS: usize = 80;

/// Continuous extension of one accepted step.
struct Dense {
    r: [Point; 5],
}

impl Dense {
    fn at(&self, theta: f64) -> Point {
        let [r1, r2, r3, r4, r5] = self.r;
        let s = 1.0 - theta;
        r1 + theta * (r2 + s * (r3 + theta * (r4 + s * r5)))
    }
}

struct Stepper<'f, F: Flow> {
    flow: &'f F,
    sign: f64,
}

impl<F: Flow> Stepper<'_, F> {
    fn f(&self, p: Point) -> Point {
        self.sign * self.flow.velocity(p)
    }

    /// One trial step; returns the new point, its derivative, the error
    /// estimate and the dense-output coefficients.
    fn step(&self, y0: Point, k1: Point, h: f64) -> (Point, Point, Point, Dense) {
        let k2 = self.f(y0 + h * (A21 * k1));
        let k3 = self.f(y0 + h * (A31 * k1 + A32 * k2));
        let k4 = self.f(y0 + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = self.f(y0 + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = self.f(y0 + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y1 = y0 + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
        let k7 = self.f(y1);
        let err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let ydiff = y1 - y0;
        let bspl = h * k1 - ydiff;
        let dense = Dense {
            r: [
                y0,
                ydiff,
                bspl,
                ydiff - h * k7 - bspl,
                h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
            ],
        };
        (y1, k7, err, dense)
    }
}

fn err_norm(err: Point, y0: Point, y1: Point, opts: &IntegratorOpts) -> f64 {
    let sx = opts.abs_tol + opts.rel_tol * y0.x.abs().max(y1.x.abs());
    let sy = opts.abs_tol + opts.rel_tol * y0.y.abs().max(y1.y.abs());
    (0.5 * ((err.x / sx).powi(2) + (err.y / sy).powi(2))).sqrt()
}

/// Locates a sign change of `g` on `[0, 1]` of a dense step to full
/// precision in the step fraction.
fn bisect(dense: &Dense, g: &dyn Fn(Point) -> f64, g0: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_ITERS {
        if hi - lo <= 2.0 * f64::EPSILON {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let gm = g(dense.at(mid));
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == g0.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Integrates `flow` from `start` until an accepted event, a first-integral
/// singularity, escape beyond `max_radius`, or `max_arc_time`.
pub fn integrate_until_event<F: Flow>(
    flow: &F,
    start: Point,
    direction: Direction,
    events: &[Event<'_>],
    opts: &IntegratorOpts,
) -> Result<ArcResult, OrbitError> {
    opts.validate()?;
    let stepper = Stepper {
        flow,
        sign: direction.sign(),
    };
    let mut k1 = stepper.f(start);
    if !(k1.norm() > 1e-12) {
        return Err(OrbitError::Equilibrium(start));
    }
    let h0 = flow.first_integral(start);
    let drift_of = |p: Point| match (h0, flow.first_integral(p)) {
        (Some(a), Some(b)) => (b - a).abs() / (1.0 + a.abs()),
        _ => 0.0,
    };
    let margin_sign = flow.singular_margin(start).map(f64::signum);

    let mut y = start;
    let mut t = 0.0;
    let mut h = (1e-2 * (1.0 + start.norm()) / k1.norm()).min(opts.max_arc_time);
    let mut gvals: Vec<f64> = events.iter().map(|e| (e.g)(start)).collect();
    let mut samples = vec![start];
    let mut drift = 0.0f64;

    let finish = |endpoint: Point, status, time, drift: f64, mut samples: Vec<Point>| {
        if samples.last() != Some(&endpoint) {
            samples.push(endpoint);
        }
        let drift = drift.max(drift_of(endpoint));
        Ok(ArcResult {
            endpoint,
            status,
            time,
            integral_drift: drift,
            samples,
        })
    };

    for _ in 0..MAX_STEPS {
        if t >= opts.max_arc_time {
            return finish(y, ArcStatus::Timeout, t, drift, samples);
        }
        h = h.min(opts.max_arc_time - t);
        let (y1, k7, err, dense) = stepper.step(y, k1, h);
        let en = err_norm(err, y, y1, opts);
        if !en.is_finite() || !y1.is_finite() {
            h *= 0.2;
            if h < 1e-14 * (1.0 + t) {
                return finish(y, ArcStatus::Escaped, t, drift, samples);
            }
            continue;
        }
        if en > 1.0 {
            h *= (0.9 * en.powf(-0.2)).max(0.2);
            continue;
        }

        // Earliest accepted event inside this step.
        let mut hit: Option<(f64, usize)> = None;
        let mut loose = false;
        for (i, ev) in events.iter().enumerate() {
            let (ga, gb) = (gvals[i], (ev.g)(y1));
            if ga == 0.0 || (gb != 0.0 && ga.signum() == gb.signum()) {
                continue;
            }
            let theta = if gb == 0.0 {
                1.0
            } else {
                bisect(&dense, &*ev.g, ga)
            };
            let p = dense.at(theta);
            if (ev.g)(p).abs() > opts.event_tol {
                loose = true;
            } else if (ev.accept)(p) && hit.is_none_or(|(th, _)| theta < th) {
                hit = Some((theta, i));
            }
        }
        if loose && h > 1e-12 * (1.0 + t) {
            // dense output too coarse to place the event; retry shorter
            h *= 0.5;
            continue;
        }
        if let Some((theta, i)) = hit {
            let p = dense.at(theta);
            let te = t + theta * h;
            for s in 1..8 {
                let q = dense.at(theta * s as f64 / 8.0);
                drift = drift.max(drift_of(q));
            }
            return finish(p, events[i].outcome, te, drift, samples);
        }

        if let (Some(s0), Some(m)) = (margin_sign, flow.singular_margin(y1)) {
            if m.abs() < opts.singular_tol || m.signum() != s0 {
                return finish(y1, ArcStatus::SingularityHit, t + h, drift, samples);
            }
        }
        if y1.norm() > opts.max_radius {
            return finish(y1, ArcStatus::Escaped, t + h, drift, samples);
        }

        for (i, ev) in events.iter().enumerate() {
            gvals[i] = (ev.g)(y1);
        }
        t += h;
        y = y1;
        k1 = k7;
        drift = drift.max(drift_of(y));
        samples.push(y);
        h *= (0.9 * en.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
    }
    finish(y, ArcStatus::Timeout, t, drift, samples)
}

/// Time direction that moves the saddle from `(x, 0)` into the first
/// quadrant.
pub fn plus_direction(sp: &SaddleParams, x: f64) -> Direction {
    if sp.field(Point::new(x, 0.0)).y > 0.0 {
        Direction::Forward
    } else {
        Direction::Backward
    }
}

/// Time direction that moves the center from `(0, y)` into `x < 0`.
pub fn minus_direction(cs: &CenterSystem, y: f64) -> Direction {
    if cs.field(Point::new(0.0, y)).x < 0.0 {
        Direction::Forward
    } else {
        Direction::Backward
    }
}

/// Saddle arc from `(x, 0)` through the first quadrant.
pub fn plus_arc(
    sp: &SaddleParams,
    x: f64,
    opts: &IntegratorOpts,
) -> Result<(ArcResult, Direction), OrbitError> {
    let dir = plus_direction(sp, x);
    let events = [
        Event::positive_y_axis(ArcStatus::Closed),
        Event::positive_x_axis(ArcStatus::LeftRegion),
    ];
    let arc = integrate_until_event(sp, Point::new(x, 0.0), dir, &events, opts)?;
    Ok((arc, dir))
}

/// Center arc from `(0, y)` through the complement of the first quadrant.
pub fn minus_arc(
    cs: &CenterSystem,
    y: f64,
    opts: &IntegratorOpts,
) -> Result<(ArcResult, Direction), OrbitError> {
    let dir = minus_direction(cs, y);
    let events = [
        Event::positive_x_axis(ArcStatus::Closed),
        Event::positive_y_axis(ArcStatus::LeftRegion),
    ];
    let arc = integrate_until_event(cs, Point::new(0.0, y), dir, &events, opts)?;
    Ok((arc, dir))
}

/// Ordinate where the saddle arc from `(x, 0)` meets the positive y-axis.
pub fn half_map_plus(sp: &SaddleParams, x: f64, opts: &IntegratorOpts) -> Result<f64, OrbitError> {
    let (arc, _) = plus_arc(sp, x, opts)?;
    match arc.status {
        ArcStatus::Closed => Ok(arc.endpoint.y),
        other => Err(OrbitError::NoConnection(other)),
    }
}

/// Abscissa where the center arc from `(0, y)` returns to the positive
/// x-axis.
pub fn half_map_minus(cs: &CenterSystem, y: f64, opts: &IntegratorOpts) -> Result<f64, OrbitError> {
    let (arc, _) = minus_arc(cs, y, opts)?;
    match arc.status {
        ArcStatus::Closed => Ok(arc.endpoint.x),
        other => Err(OrbitError::NoConnection(other)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifiedCycle {
    pub candidate: CycleCandidate,
    pub plus_arc: ArcResult,
    pub minus_arc: ArcResult,
    pub direction: Direction,
    pub period_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("candidate ({x}, {y}) rejected: {reason:?} ({detail})")]
pub struct Rejection {
    pub x: f64,
    pub y: f64,
    pub reason: RejectReason,
    pub detail: String,
}

fn status_reason(s: ArcStatus) -> RejectReason {
    match s {
        ArcStatus::Closed => unreachable!("closed arcs are not rejections"),
        ArcStatus::LeftRegion => RejectReason::LeftRegion,
        ArcStatus::Timeout => RejectReason::Timeout,
        ArcStatus::SingularityHit => RejectReason::SingularityHit,
        ArcStatus::Escaped => RejectReason::Escaped,
    }
}

/// Confirms that the saddle arc from `(x, 0)` reaches `(0, y)` inside the
/// first quadrant and the center arc from `(0, y)` returns to `(x, 0)`
/// through its complement, with one coherent time orientation.
pub fn verify_cycle(
    sp: &SaddleParams,
    cs: &CenterSystem,
    candidate: &CycleCandidate,
    opts: &IntegratorOpts,
) -> Result<VerifiedCycle, Rejection> {
    let (x, y) = (candidate.x, candidate.y);
    let reject = |reason, detail: String| Rejection {
        x,
        y,
        reason,
        detail,
    };
    let stage = |r: Result<(ArcResult, Direction), OrbitError>, side: &str| {
        r.map_err(|e| reject(RejectReason::SingularityHit, format!("{side} arc: {e}")))
    };

    let (plus, dplus) = stage(plus_arc(sp, x, opts), "saddle")?;
    if plus.status != ArcStatus::Closed {
        return Err(reject(
            status_reason(plus.status),
            format!("saddle arc ended at {}", plus.endpoint),
        ));
    }
    if (plus.endpoint.y - y).abs() > MATCH_RTOL * (1.0 + y) {
        return Err(reject(
            RejectReason::ArcMismatch,
            format!(
                "saddle arc reaches y = {} instead of {}",
                plus.endpoint.y, y
            ),
        ));
    }
    let (minus, dminus) = stage(minus_arc(cs, y, opts), "center")?;
    if minus.status != ArcStatus::Closed {
        return Err(reject(
            status_reason(minus.status),
            format!("center arc ended at {}", minus.endpoint),
        ));
    }
    if (minus.endpoint.x - x).abs() > MATCH_RTOL * (1.0 + x) {
        return Err(reject(
            RejectReason::ArcMismatch,
            format!(
                "center arc returns to x = {} instead of {}",
                minus.endpoint.x, x
            ),
        ));
    }
    if dplus != dminus {
        return Err(reject(
            RejectReason::OrientationClash,
            format!("saddle arc runs {dplus:?}, center arc {dminus:?}"),
        ));
    }
    let drift = plus.integral_drift.max(minus.integral_drift);
    if drift > MAX_DRIFT {
        return Err(reject(
            RejectReason::ExcessDrift,
            format!("first-integral drift {drift:e}"),
        ));
    }
    let period_estimate = plus.time + minus.time;
    Ok(VerifiedCycle {
        candidate: candidate.clone(),
        plus_arc: plus,
        minus_arc: minus,
        direction: dplus,
        period_estimate,
    })
}

/// A fixed point of the composed half maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleFixedPoint {
    pub x: f64,
    pub y: f64,
}

/// Composed return map minus identity, defined only when both half maps
/// connect with the same time orientation.
fn return_defect(
    sp: &SaddleParams,
    cs: &CenterSystem,
    x: f64,
    opts: &IntegratorOpts,
) -> Option<(f64, f64)> {
    let (pa, dp) = plus_arc(sp, x, opts).ok()?;
    if pa.status != ArcStatus::Closed {
        return None;
    }
    let y = pa.endpoint.y;
    let (ma, dm) = minus_arc(cs, y, opts).ok()?;
    if ma.status != ArcStatus::Closed || dp != dm {
        return None;
    }
    Some((ma.endpoint.x - x, y))
}

/// Fixed points of `x ↦ half_map_minus(half_map_plus(x))` on `x_range`,
/// bracketed on `n_samples` equispaced points and bisected to `1e-8`.
pub fn oracle_scan(
    sp: &SaddleParams,
    cs: &CenterSystem,
    x_range: (f64, f64),
    n_samples: usize,
    opts: &IntegratorOpts,
) -> Result<Vec<OracleFixedPoint>, OrbitError> {
    opts.validate()?;
    let (lo, hi) = x_range;
    if n_samples < 2 || !(lo < hi) || !(lo > 0.0) {
        return Err(OrbitError::InvalidScan);
    }
    let xs: Vec<f64> = (0..n_samples)
        .map(|k| lo + (hi - lo) * k as f64 / (n_samples - 1) as f64)
        .collect();
    let g: Vec<Option<(f64, f64)>> = xs.iter().map(|&x| return_defect(sp, cs, x, opts)).collect();
    let mut out: Vec<OracleFixedPoint> = Vec::new();
    for k in 0..n_samples - 1 {
        let (Some((ga, _)), Some((gb, _))) = (g[k], g[k + 1]) else {
            continue;
        };
        let (mut a, mut b, mut fa) = (xs[k], xs[k + 1], ga);
        if ga == 0.0 {
            out.push(OracleFixedPoint {
                x: a,
                y: g[k].unwrap().1,
            });
            continue;
        }
        if gb == 0.0 || ga.signum() == gb.signum() {
            continue;
        }
        let mut ok = true;
        while b - a > 1e-8 {
            let m = 0.5 * (a + b);
            match return_defect(sp, cs, m, opts) {
                Some((0.0, _)) => {
                    a = m;
                    b = m;
                }
                Some((gm, _)) if gm.signum() == fa.signum() => {
                    a = m;
                    fa = gm;
                }
                Some(_) => b = m,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let xm = 0.5 * (a + b);
        // A sign change across a jump is not a fixed point.
        match return_defect(sp, cs, xm, opts) {
            Some((gm, y))
                if gm.abs() <= 1e-6 * (1.0 + xm)
                    && out.last().is_none_or(|p| (p.x - xm).abs() > 1e-7) =>
            {
                out.push(OracleFixedPoint { x: xm, y });
            }
            _ => {}
        }
    }
    Ok(out)
}
