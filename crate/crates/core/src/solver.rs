//! Real solutions of the closing system and their admissibility.
//!
//! `y` is eliminated by a resultant, real `x`-roots are isolated, each root is
//! lifted back through `P_S` (at most quadratic in `y`), matched against
//! `P_i`, and finally polished by a damped Newton iteration on the pair.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closing::ClosingPair;
use crate::fields::{CenterSystem, Flow, Point, SaddleParams, DENOMINATOR_MIN};
use crate::polycore::{real_roots, resultant_eliminate_y, BivariatePoly, PolyError, DEDUP_TOL};

/// Scaled residual accepted after polishing.
pub const POLISHED_RTOL: f64 = 1e-10;

const NEWTON_MAX_ITERS: usize = 60;
const NEWTON_SINGULAR_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("closing polynomials share a common component")]
    CommonComponent,
    #[error("polynomial stage failed: {0}")]
    Poly(PolyError),
    #[error("{count} admissible solutions exceed the bound {max}")]
    BoundViolation { count: usize, max: u32 },
    #[error("invalid solver options: {0}")]
    InvalidOptions(&'static str),
}

impl From<PolyError> for SolveError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::CommonComponent => SolveError::CommonComponent,
            other => SolveError::Poly(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOpts {
    /// Right end of the searched `x` range (also bounds `y` when `P_S` does
    /// not depend on `y`).
    pub x_max: f64,
    /// Step tolerance of the univariate root refinement.
    pub tol_root: f64,
    /// Scaled `P_i` residual below which a lifted pair is kept for polishing.
    pub tol_match: f64,
    /// Coordinates at or below this are treated as the origin solution.
    pub pos_tol: f64,
    /// Normal field components at or below this are tangencies.
    pub tol_tangent: f64,
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self {
            x_max: 1e3,
            tol_root: 1e-12,
            tol_match: 1e-4,
            pos_tol: 1e-8,
            tol_tangent: 1e-9,
        }
    }
}

impl SolverOpts {
    pub fn validate(&self) -> Result<(), SolveError> {
        let all = [
            self.x_max,
            self.tol_root,
            self.tol_match,
            self.pos_tol,
            self.tol_tangent,
        ];
        if !all.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(SolveError::InvalidOptions(
                "all solver options must be finite and positive",
            ));
        }
        Ok(())
    }
}

/// A real solution of `{P_S = 0, P_i = 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: f64,
    pub y: f64,
    /// `|P_S(x, y)|` divided by its scale at `(x, y)`.
    pub residual_ps: f64,
    /// `|P_i(x, y)|` divided by its scale at `(x, y)`.
    pub residual_pi: f64,
    /// Newton converged with a nonsingular Jacobian.
    pub simple: bool,
}

fn scaled_residual(p: &BivariatePoly, x: f64, y: f64) -> f64 {
    let s = p.scale_at(x, y);
    if s == 0.0 {
        0.0
    } else {
        p.eval(x, y).abs() / s
    }
}

enum Polish {
    Converged(f64, f64),
    Singular,
    Stalled,
}

/// Damped Newton on `(f, g)` from `(x, y)`.
fn polish(f: &BivariatePoly, g: &BivariatePoly, x0: f64, y0: f64) -> Polish {
    let (fx, fy, gx, gy) = (f.d_dx(), f.d_dy(), g.d_dx(), g.d_dy());
    let merit = |x: f64, y: f64| {
        let a = f.eval(x, y) / f.scale_at(x, y);
        let b = g.eval(x, y) / g.scale_at(x, y);
        a * a + b * b
    };
    let (mut x, mut y) = (x0, y0);
    let mut m = merit(x, y);
    for _ in 0..NEWTON_MAX_ITERS {
        let (fv, gv) = (f.eval(x, y), g.eval(x, y));
        let j = [fx.eval(x, y), fy.eval(x, y), gx.eval(x, y), gy.eval(x, y)];
        let det = j[0] * j[3] - j[1] * j[2];
        let norm = (j[0].abs() + j[1].abs()) * (j[2].abs() + j[3].abs());
        if !(det.abs() > NEWTON_SINGULAR_RTOL * norm) {
            return Polish::Singular;
        }
        let dx = (fv * j[3] - gv * j[1]) / det;
        let dy = (gv * j[0] - fv * j[2]) / det;
        let mut t = 1.0;
        let (mut nx, mut ny, mut nm);
        loop {
            nx = x - t * dx;
            ny = y - t * dy;
            nm = merit(nx, ny);
            if nm <= m || t < 1e-4 {
                break;
            }
            t *= 0.5;
        }
        let step = (nx - x).abs().max((ny - y).abs());
        x = nx;
        y = ny;
        m = nm;
        if step <= 4.0 * f64::EPSILON * x.abs().max(y.abs()).max(1.0) || m == 0.0 {
            break;
        }
    }
    if scaled_residual(f, x, y) <= POLISHED_RTOL && scaled_residual(g, x, y) <= POLISHED_RTOL {
        Polish::Converged(x, y)
    } else {
        Polish::Stalled
    }
}

/// Real roots `y` of `P_S(x, y)`, a polynomial of degree ≤ 2 in `y`.
fn lift_through_saddle(ps: &BivariatePoly, x: f64) -> Vec<f64> {
    let c = ps.coeffs_in_y_at(x);
    let get = |k: usize| c.get(k).copied().unwrap_or(0.0);
    let (c0, c1, c2) = (get(0), get(1), get(2));
    if c2 != 0.0 {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        let scale = (c1 * c1).max((4.0 * c2 * c0).abs()).max(f64::MIN_POSITIVE);
        if disc < -1e-10 * scale {
            return Vec::new();
        }
        let sq = disc.max(0.0).sqrt();
        // stable form avoiding cancellation
        let q = -0.5 * (c1 + if c1 >= 0.0 { sq } else { -sq });
        let mut out = Vec::with_capacity(2);
        if q != 0.0 {
            out.push(q / c2);
            out.push(c0 / q);
        } else {
            out.push(0.0);
        }
        out
    } else if c1 != 0.0 {
        vec![-c0 / c1]
    } else {
        Vec::new()
    }
}

/// All real solutions of the closing system with `x ∈ [0, x_max]`, sorted by
/// `x` then `y`; the origin is always present.
pub fn solve_closing(pair: &ClosingPair, opts: &SolverOpts) -> Result<Vec<Solution>, SolveError> {
    opts.validate()?;
    let (ps, pi) = (&pair.ps, &pair.pi);
    let lo = -opts.pos_tol;
    let mut raw: Vec<(f64, f64)> = Vec::new();
    if ps.is_zero() || pi.is_zero() {
        return Err(SolveError::CommonComponent);
    }

    if ps.deg_y() == 0 {
        // P_S depends on x only: its roots fix x, and P_i fixes y.
        let px = ps.restrict_y(0.0);
        for xr in real_roots(&px, (lo, opts.x_max), opts.tol_root)?.values() {
            let py = pi.restrict_x(xr);
            if py.is_zero() {
                return Err(SolveError::CommonComponent);
            }
            for yr in real_roots(&py, (-opts.x_max, opts.x_max), opts.tol_root)?.values() {
                raw.push((xr, yr));
            }
        }
    } else {
        let res = resultant_eliminate_y(ps, pi)?;
        for xr in real_roots(&res, (lo, opts.x_max), opts.tol_root)?.values() {
            for yr in lift_through_saddle(ps, xr) {
                if scaled_residual(pi, xr, yr) <= opts.tol_match {
                    raw.push((xr, yr));
                }
            }
        }
    }

    let mut out: Vec<Solution> = Vec::new();
    for (x0, y0) in raw {
        let (x, y, simple) = match polish(ps, pi, x0, y0) {
            Polish::Converged(x, y) => (x, y, true),
            Polish::Stalled => continue,
            Polish::Singular => (x0, y0, false),
        };
        if !(x >= lo && x <= opts.x_max) || !y.is_finite() {
            continue;
        }
        out.push(Solution {
            x,
            y,
            residual_ps: scaled_residual(ps, x, y),
            residual_pi: scaled_residual(pi, x, y),
            simple,
        });
    }
    if !out
        .iter()
        .any(|s| s.x.abs() <= opts.pos_tol && s.y.abs() <= opts.pos_tol)
    {
        out.push(Solution {
            x: 0.0,
            y: 0.0,
            residual_ps: 0.0,
            residual_pi: 0.0,
            simple: true,
        });
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut dedup: Vec<Solution> = Vec::with_capacity(out.len());
    for s in out {
        match dedup.last_mut() {
            Some(last)
                if (s.x - last.x).abs() <= DEDUP_TOL && (s.y - last.y).abs() <= DEDUP_TOL =>
            {
                if s.simple && !last.simple
                    || s.residual_ps + s.residual_pi < last.residual_ps + last.residual_pi
                {
                    *last = s;
                }
            }
            _ => dedup.push(s),
        }
    }
    Ok(dedup)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingFlags {
    pub x_axis: bool,
    pub y_axis: bool,
    /// A normal component vanished to within the tangency tolerance.
    pub tangency: bool,
}

/// Crossing test for arbitrary fields: at `(x, 0)` the `y`-components of
/// both fields must share a sign, at `(0, y)` the `x`-components.
pub fn crossing_flags<P: Flow, M: Flow>(
    plus: &P,
    minus: &M,
    x: f64,
    y: f64,
    tol_tangent: f64,
) -> CrossingFlags {
    let p = Point::new(x, 0.0);
    let q = Point::new(0.0, y);
    let (np, nm) = (plus.velocity(p).y, minus.velocity(p).y);
    let (qp, qm) = (plus.velocity(q).x, minus.velocity(q).x);
    let tangent = |a: f64, b: f64| a.abs() <= tol_tangent || b.abs() <= tol_tangent;
    let tx = tangent(np, nm);
    let ty = tangent(qp, qm);
    CrossingFlags {
        x_axis: !tx && np.signum() == nm.signum(),
        y_axis: !ty && qp.signum() == qm.signum(),
        tangency: tx || ty,
    }
}

pub fn crossing_test(
    sp: &SaddleParams,
    cs: &CenterSystem,
    candidate: (f64, f64),
    tol_tangent: f64,
) -> CrossingFlags {
    crossing_flags(sp, cs, candidate.0, candidate.1, tol_tangent)
}

/// Verification outcome attached to a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verification {
    NotAttempted,
    Verified,
    Rejected(RejectReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    ArcMismatch,
    LeftRegion,
    SingularityHit,
    OrientationClash,
    Timeout,
    Escaped,
    ExcessDrift,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleCandidate {
    pub x: f64,
    pub y: f64,
    pub residual_ps: f64,
    pub residual_pi: f64,
    pub crossing_x_axis: bool,
    pub crossing_y_axis: bool,
    pub admissible: bool,
    pub verified: bool,
    pub verification: Verification,
    pub notes: Vec<String>,
}

impl CycleCandidate {
    pub fn is_origin(&self, pos_tol: f64) -> bool {
        self.x.abs() <= pos_tol && self.y.abs() <= pos_tol
    }
}

/// Every solution of the closing system annotated with its admissibility.
pub fn classify_candidates(
    sp: &SaddleParams,
    cs: &CenterSystem,
    pair: &ClosingPair,
    opts: &SolverOpts,
) -> Result<Vec<CycleCandidate>, SolveError> {
    let sols = solve_closing(pair, opts)?;
    let mut out = Vec::with_capacity(sols.len());
    for s in sols {
        let mut notes = Vec::new();
        let positive = s.x > opts.pos_tol && s.y > opts.pos_tol;
        let mut flags = CrossingFlags {
            x_axis: false,
            y_axis: false,
            tangency: false,
        };
        if s.x.abs() <= opts.pos_tol && s.y.abs() <= opts.pos_tol {
            notes.push("origin solution".to_string());
        } else if !positive {
            notes.push("not in the open first quadrant".to_string());
        }
        if !s.simple {
            notes.push("NewtonSingular: non-simple intersection, left unpolished".to_string());
        }
        let residual_ok = s.residual_ps <= POLISHED_RTOL && s.residual_pi <= POLISHED_RTOL;
        let mut dens_ok = false;
        if positive {
            let dx = cs.denominator(Point::new(s.x, 0.0));
            let dy = cs.denominator(Point::new(0.0, s.y));
            dens_ok = dx.abs() > DENOMINATOR_MIN && dy.abs() > DENOMINATOR_MIN;
            if !dens_ok {
                notes.push("DenominatorSingular on an axis point".to_string());
            }
            flags = crossing_test(sp, cs, (s.x, s.y), opts.tol_tangent);
            if flags.tangency {
                notes.push("Tangency".to_string());
            } else if !(flags.x_axis && flags.y_axis) {
                notes.push("sliding: fields disagree across the switching curve".to_string());
            }
        }
        let admissible =
            positive && s.simple && residual_ok && dens_ok && flags.x_axis && flags.y_axis;
        out.push(CycleCandidate {
            x: s.x,
            y: s.y,
            residual_ps: s.residual_ps,
            residual_pi: s.residual_pi,
            crossing_x_axis: flags.x_axis,
            crossing_y_axis: flags.y_axis,
            admissible,
            verified: false,
            verification: Verification::NotAttempted,
            notes,
        });
    }
    let count = out.iter().filter(|c| c.admissible).count();
    if count > pair.max_admissible as usize {
        return Err(SolveError::BoundViolation {
            count,
            max: pair.max_admissible,
        });
    }
    Ok(out)
}

/// The admissible subset of [`classify_candidates`].
pub fn admissible_candidates(
    sp: &SaddleParams,
    cs: &CenterSystem,
    pair: &ClosingPair,
    opts: &SolverOpts,
) -> Result<Vec<CycleCandidate>, SolveError> {
    Ok(classify_candidates(sp, cs, pair, opts)?
        .into_iter()
        .filter(|c| c.admissible)
        .collect())
}
