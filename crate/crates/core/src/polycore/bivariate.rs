use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::univariate::UnivariatePoly;

/// Dense-in-spirit bivariate polynomial over `f64`, stored sparsely as a map
/// from exponent pair `(i, j)` (for `x^i y^j`) to a nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BivariatePoly {
    coeffs: BTreeMap<(u32, u32), f64>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a polynomial from `(i, j, c)` triples; repeated monomials are
    /// summed and exact zeros dropped.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn monomial(i: u32, j: u32, c: f64) -> Self {
        Self::from_terms([(i, j, c)])
    }

    /// Polynomial in `x` only.
    pub fn from_x(p: &UnivariatePoly) -> Self {
        Self::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, &c)| (i as u32, 0, c)),
        )
    }

    /// Polynomial in `y` only.
    pub fn from_y(p: &UnivariatePoly) -> Self {
        Self::from_terms(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(j, &c)| (0, j as u32, c)),
        )
    }

    /// `px(x) * py(y)`.
    pub fn outer(px: &UnivariatePoly, py: &UnivariatePoly) -> Self {
        let mut p = Self::zero();
        for (i, &a) in px.coeffs().iter().enumerate() {
            for (j, &b) in py.coeffs().iter().enumerate() {
                p.add_term(i as u32, j as u32, a * b);
            }
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.coeffs.entry((i, j)).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Stored monomials in ascending `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.coeffs.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg_total(&self) -> u32 {
        self.coeffs.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn deg_x(&self) -> u32 {
        self.coeffs.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> u32 {
        self.coeffs.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Residual scale at `(x, y)`: max coefficient magnitude times
    /// `max(1, |x|, |y|)^deg_total`.
    pub fn scale_at(&self, x: f64, y: f64) -> f64 {
        let r = 1f64.max(x.abs()).max(y.abs());
        self.max_abs_coeff() * r.powi(self.deg_total() as i32)
    }

    pub fn all_finite(&self) -> bool {
        self.coeffs.values().all(|c| c.is_finite())
    }

    /// Evaluates by accumulating monomials with precomputed powers.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let xp = powers(x, self.deg_x());
        let yp = powers(y, self.deg_y());
        self.coeffs
            .iter()
            .map(|(&(i, j), &c)| c * xp[i as usize] * yp[j as usize])
            .sum()
    }

    /// Sum of `|c| |x|^i |y|^j`, the natural bound on rounding in `eval`.
    pub fn abs_eval(&self, x: f64, y: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), &c)| c.abs() * x.abs().powi(i as i32) * y.abs().powi(j as i32))
            .sum()
    }

    /// Drops coefficients with `|c| < rel_tol * max|c|`. A polynomial that
    /// trims away completely comes back as the zero polynomial.
    pub fn trim(&self, rel_tol: f64) -> Self {
        assert!(rel_tol >= 0.0, "trim tolerance must be nonnegative");
        let cutoff = rel_tol * self.max_abs_coeff();
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.abs() >= cutoff)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_terms(self.terms().map(|(i, j, c)| (i, j, c * s)))
    }

    pub fn d_dx(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(i, _, _)| i > 0)
                .map(|(i, j, c)| (i - 1, j, c * i as f64)),
        )
    }

    pub fn d_dy(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(_, j, _)| j > 0)
                .map(|(i, j, c)| (i, j - 1, c * j as f64)),
        )
    }

    /// Coefficients of `p(x0, y)` as a polynomial in `y`, padded to the formal
    /// degree `deg_y` (lowest degree first).
    pub fn coeffs_in_y_at(&self, x0: f64) -> Vec<f64> {
        let xp = powers(x0, self.deg_x());
        let mut out = vec![0.0; self.deg_y() as usize + 1];
        for (&(i, j), &c) in &self.coeffs {
            out[j as usize] += c * xp[i as usize];
        }
        out
    }

    /// Coefficients of `p(x, y0)` as a polynomial in `x`, padded to `deg_x`.
    pub fn coeffs_in_x_at(&self, y0: f64) -> Vec<f64> {
        let yp = powers(y0, self.deg_y());
        let mut out = vec![0.0; self.deg_x() as usize + 1];
        for (&(i, j), &c) in &self.coeffs {
            out[i as usize] += c * yp[j as usize];
        }
        out
    }

    pub fn restrict_x(&self, x0: f64) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs_in_y_at(x0))
    }

    pub fn restrict_y(&self, y0: f64) -> UnivariatePoly {
        UnivariatePoly::new(self.coeffs_in_x_at(y0))
    }
}

fn powers(v: f64, n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 1.0;
    for _ in 0..=n {
        out.push(acc);
        acc *= v;
    }
    out
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, c);
        }
        out
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = self.clone();
        for (i, j, c) in rhs.terms() {
            out.add_term(i, j, -c);
        }
        out
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut out = BivariatePoly::zero();
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in rhs.terms() {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        self.scaled(-1.0)
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), &c) in self.coeffs.iter().rev() {
            if first {
                write!(f, "{c}")?;
            } else if c < 0.0 {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            first = false;
            match i {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "*y")?,
                _ => write!(f, "*y^{j}")?,
            }
        }
        Ok(())
    }
}
