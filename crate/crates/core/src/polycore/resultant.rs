//! Elimination of `y` from a pair of bivariate polynomials.
//!
//! The resultant is sampled at Chebyshev nodes on `[-1, 1]`, each sample being
//! the determinant of the numeric Sylvester matrix, and the samples are
//! interpolated back into monomial form.

use std::f64::consts::PI;

use super::bivariate::BivariatePoly;
use super::univariate::UnivariatePoly;
use super::PolyError;

/// Samples whose magnitude stays below this fraction of the Hadamard bound at
/// every node are treated as an identically vanishing resultant.
const COMMON_COMPONENT_RTOL: f64 = 1e-12;

/// Interpolated coefficients below this fraction of the largest one are
/// dropped from the leading end.
const COEFF_TRIM_RTOL: f64 = 1e-13;

/// Sylvester matrix of two univariate polynomials given lowest degree first,
/// at their formal degrees `m = f.len() - 1` and `n = g.len() - 1`.
pub fn sylvester_matrix(f: &[f64], g: &[f64]) -> Vec<Vec<f64>> {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for r in 0..n {
        let mut row = vec![0.0; size];
        for (k, &c) in f.iter().rev().enumerate() {
            row[r + k] = c;
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![0.0; size];
        for (k, &c) in g.iter().rev().enumerate() {
            row[r + k] = c;
        }
        rows.push(row);
    }
    rows
}

/// Determinant by Gaussian elimination with row pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row][col] / p;
            if factor != 0.0 {
                let (top, rest) = a.split_at_mut(row);
                for (t, s) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                    *t -= factor * s;
                }
            }
        }
    }
    det
}

fn hadamard_bound(a: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|v| v * v).sum::<f64>().sqrt())
        .product()
}

/// Resultant of `f` and `g` with respect to `y` evaluated at `x`, using the
/// formal `y`-degrees of the two polynomials.
pub fn resultant_at(f: &BivariatePoly, g: &BivariatePoly, x: f64) -> f64 {
    determinant(sylvester_matrix(&f.coeffs_in_y_at(x), &g.coeffs_in_y_at(x)))
}

/// Eliminates `y` from `f = g = 0`, returning the resultant as a polynomial
/// in `x`.
///
/// The interpolation uses `deg_x(f) deg_y(g) + deg_x(g) deg_y(f) + 1`
/// Chebyshev nodes; coefficients above the Bézout degree
/// `deg(f) deg(g)` are discarded since they vanish identically.
pub fn resultant_eliminate_y(
    f: &BivariatePoly,
    g: &BivariatePoly,
) -> Result<UnivariatePoly, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::InvalidInput("resultant of a zero polynomial"));
    }
    let (m, n) = (f.deg_y(), g.deg_y());
    if m + n == 0 {
        return Err(PolyError::InvalidInput(
            "resultant needs at least one operand depending on y",
        ));
    }
    let deg_bound = (f.deg_x() * n + g.deg_x() * m) as usize;
    let bezout = (f.deg_total() * g.deg_total()) as usize;
    let nodes = deg_bound + 1;

    let mut values = Vec::with_capacity(nodes);
    let mut any_significant = false;
    for k in 0..nodes {
        let theta = PI * (k as f64 + 0.5) / nodes as f64;
        let t = theta.cos();
        let syl = sylvester_matrix(&f.coeffs_in_y_at(t), &g.coeffs_in_y_at(t));
        let bound = hadamard_bound(&syl);
        let value = determinant(syl);
        if !value.is_finite() {
            return Err(PolyError::NonFinite);
        }
        if value.abs() > COMMON_COMPONENT_RTOL * bound {
            any_significant = true;
        }
        values.push((theta, value));
    }
    if !any_significant {
        return Err(PolyError::CommonComponent);
    }

    // Discrete Chebyshev transform.
    let mut cheb = vec![0.0; nodes];
    for (j, c) in cheb.iter_mut().enumerate() {
        let s: f64 = values
            .iter()
            .map(|&(theta, v)| v * (j as f64 * theta).cos())
            .sum();
        *c = 2.0 * s / nodes as f64;
    }
    cheb[0] *= 0.5;

    let mut mono = chebyshev_to_monomial(&cheb);
    mono.truncate(bezout.min(deg_bound) + 1);
    Ok(UnivariatePoly::new(mono).trimmed(COEFF_TRIM_RTOL))
}

/// Converts Chebyshev-series coefficients to monomial coefficients.
fn chebyshev_to_monomial(cheb: &[f64]) -> Vec<f64> {
    let n = cheb.len();
    let mut out = vec![0.0; n];
    let mut t_prev = vec![0.0; n];
    let mut t_cur = vec![0.0; n];
    t_prev[0] = 1.0; // T0
    if n > 1 {
        t_cur[1] = 1.0; // T1
    }
    for (k, &c) in cheb.iter().enumerate() {
        let tk: &Vec<f64> = if k == 0 { &t_prev } else { &t_cur };
        for (o, v) in out.iter_mut().zip(tk) {
            *o += c * v;
        }
        if k >= 1 && k + 1 < n {
            // T_{k+1} = 2t T_k - T_{k-1}
            let mut next = vec![0.0; n];
            for i in 0..n - 1 {
                next[i + 1] += 2.0 * t_cur[i];
            }
            for (nx, p) in next.iter_mut().zip(&t_prev) {
                *nx -= p;
            }
            t_prev = std::mem::replace(&mut t_cur, next);
        }
    }
    out
}
