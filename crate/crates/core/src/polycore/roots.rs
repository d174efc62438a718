//! Real-root isolation on an interval.
//!
//! Roots of the derivative split the interval into monotone pieces, found
//! recursively; each piece holds at most one root, which is bracketed and
//! refined by safeguarded Newton (bisection whenever Newton leaves the
//! bracket). Critical points where the polynomial vanishes to rounding level
//! are reported as roots of even multiplicity.

use serde::{Deserialize, Serialize};

use super::univariate::UnivariatePoly;
use super::PolyError;

/// Roots closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-8;

const MAX_ITERS: usize = 300;
const ZERO_RTOL: f64 = 64.0 * f64::EPSILON;
const MULTIPLICITY_RTOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    /// Number of leading derivatives that vanish at the root (advisory).
    pub multiplicity_hint: u32,
    pub residual: f64,
}

/// Real roots sorted ascending, pairwise separated by more than
/// [`DEDUP_TOL`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }
}

/// All real roots of `p` in `[lo, hi]`, refined to step tolerance `tol`
/// (relative to `max(1, |x|)`).
pub fn real_roots(
    p: &UnivariatePoly,
    interval: (f64, f64),
    tol: f64,
) -> Result<RootSet, PolyError> {
    let (lo, hi) = interval;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(PolyError::InvalidInput(
            "real_roots needs lo < hi and tol > 0",
        ));
    }
    if p.degree() == 0 {
        return Ok(RootSet::default());
    }
    let values = isolate(p, lo, hi, tol)?;
    let mut roots: Vec<Root> = Vec::with_capacity(values.len());
    for v in values {
        if let Some(last) = roots.last_mut() {
            if (v - last.value).abs() <= DEDUP_TOL {
                // keep the better-resolved representative
                let res = p.eval(v).abs();
                if res < last.residual {
                    last.value = v;
                    last.residual = res;
                }
                continue;
            }
        }
        roots.push(Root {
            value: v,
            multiplicity_hint: 1,
            residual: p.eval(v).abs(),
        });
    }
    for r in &mut roots {
        r.multiplicity_hint = multiplicity_hint(p, r.value);
    }
    Ok(RootSet { roots })
}

fn vanishes(p: &UnivariatePoly, t: f64) -> bool {
    let v = p.eval(t);
    v == 0.0 || v.abs() <= ZERO_RTOL * p.abs_eval(t)
}

fn isolate(p: &UnivariatePoly, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>, PolyError> {
    match p.degree() {
        0 => return Ok(Vec::new()),
        1 => {
            let c = p.coeffs();
            let r = -c[0] / c[1];
            return Ok(if (lo..=hi).contains(&r) {
                vec![r]
            } else {
                Vec::new()
            });
        }
        _ => {}
    }
    let critical = isolate(&p.derivative(), lo, hi, tol)?;
    let mut knots = Vec::with_capacity(critical.len() + 2);
    knots.push(lo);
    knots.extend(critical.iter().copied().filter(|&c| c > lo && c < hi));
    knots.push(hi);

    let mut out = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if vanishes(p, a) {
            out.push(a);
            continue;
        }
        let (fa, fb) = (p.eval(a), p.eval(b));
        if fa.signum() != fb.signum() && !vanishes(p, b) {
            out.push(refine(p, a, b, fa, tol)?);
        }
    }
    if vanishes(p, hi) {
        out.push(hi);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Safeguarded Newton on a bracket `[a, b]` with `p(a)` and `p(b)` of
/// opposite signs.
fn refine(p: &UnivariatePoly, mut a: f64, mut b: f64, fa: f64, tol: f64) -> Result<f64, PolyError> {
    let dp = p.derivative();
    let sa = fa.signum();
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_ITERS {
        let fx = p.eval(x);
        if fx == 0.0 || fx.abs() <= f64::EPSILON * p.abs_eval(x) {
            return Ok(x);
        }
        if fx.signum() == sa {
            a = x;
        } else {
            b = x;
        }
        let d = dp.eval(x);
        let newton = if d != 0.0 { x - fx / d } else { f64::NAN };
        let next = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        let step = (next - x).abs();
        x = next;
        if step <= tol * x.abs().max(1.0) || (b - a) <= tol * x.abs().max(1.0) {
            return Ok(x);
        }
    }
    Err(PolyError::ConvergenceFailure { lo: a, hi: b })
}

fn multiplicity_hint(p: &UnivariatePoly, t: f64) -> u32 {
    let mut k = 1;
    let mut d = p.derivative();
    while !d.is_zero() {
        let v = d.eval(t).abs();
        if v > MULTIPLICITY_RTOL * d.abs_eval(t).max(d.max_abs_coeff()) {
            break;
        }
        k += 1;
        d = d.derivative();
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_quadratic() {
        let p = UnivariatePoly::new(vec![-1.0, 0.0, 1.0]);
        let rs = real_roots(&p, (-2.0, 2.0), 1e-14).unwrap();
        let v = rs.values();
        assert_eq!(v.len(), 2);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        assert!(rs.roots.iter().all(|r| r.multiplicity_hint == 1));
    }

    #[test]
    fn triple_root_at_origin() {
        let p = UnivariatePoly::new(vec![0.0, 0.0, 0.0, 1.0]);
        let rs = real_roots(&p, (-1.0, 1.0), 1e-12).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs.roots[0].value, 0.0);
        assert!(rs.roots[0].multiplicity_hint >= 2);
    }

    #[test]
    fn double_root_without_sign_change() {
        // (x − 0.5)² (x + 0.25)
        let p = UnivariatePoly::from_roots(&[0.5, 0.5, -0.25]);
        let rs = real_roots(&p, (-1.0, 1.0), 1e-13).unwrap();
        let v = rs.values();
        assert_eq!(v.len(), 2, "{rs:?}");
        assert!((v[0] + 0.25).abs() < 1e-12);
        assert!((v[1] - 0.5).abs() < 1e-7);
        assert!(rs.roots[1].multiplicity_hint >= 2);
    }

    #[test]
    fn constant_has_no_roots() {
        let rs = real_roots(&UnivariatePoly::constant(3.0), (0.0, 1.0), 1e-12).unwrap();
        assert!(rs.is_empty());
        let rs = real_roots(&UnivariatePoly::zero(), (0.0, 1.0), 1e-12).unwrap();
        assert!(rs.is_empty());
    }

    #[test]
    fn roots_outside_interval_are_ignored() {
        let p = UnivariatePoly::from_roots(&[-3.0, 0.2, 5.0]);
        let rs = real_roots(&p, (0.0, 1.0), 1e-14).unwrap();
        assert_eq!(rs.len(), 1);
        assert!((rs.roots[0].value - 0.2).abs() < 1e-13);
    }

    #[test]
    fn root_on_endpoint() {
        let p = UnivariatePoly::from_roots(&[0.0, 2.0]);
        let rs = real_roots(&p, (0.0, 2.0), 1e-14).unwrap();
        assert_eq!(rs.values(), vec![0.0, 2.0]);
    }

    #[test]
    fn rejects_bad_interval() {
        let p = UnivariatePoly::linear(0.0, 1.0);
        assert!(real_roots(&p, (1.0, 0.0), 1e-12).is_err());
        assert!(real_roots(&p, (0.0, 1.0), 0.0).is_err());
    }
}
