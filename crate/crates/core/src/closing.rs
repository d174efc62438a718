//! Closing-condition polynomials.
//!
//! A crossing cycle through `(x, 0)` and `(0, y)` satisfies
//! `H_S(x,0) = H_S(0,y)` and `H_i(x,0) = H_i(0,y)`. The saddle condition is
//! the quadratic `P_S = 2 (H_S(x,0) − H_S(0,y))`; the center condition is the
//! numerator `P_i` of `H_i(x,0) − H_i(0,y)` once the two axis denominators are
//! multiplied out. `P_i` is built from closed-form coefficients in the affine
//! data ([`closing_poly_center`]) and, independently, by numeric clearing
//! ([`cleared_difference`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{CenterKind, CenterSystem, SaddleParams};
use crate::polycore::{BivariatePoly, UnivariatePoly, TRIM_RTOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosingError {
    #[error("{kind} closing polynomial has degree {found}, expected {expected}")]
    DegreeMismatch {
        kind: CenterKind,
        expected: u32,
        found: u32,
    },
}

/// Degree data for one center family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: CenterKind,
    pub d: u32,
    pub bezout: u32,
    pub max_admissible: u32,
}

/// `(d_i, 2 d_i, 2 d_i − 1)`: the total degree of `P_i`, the Bézout number of
/// `{P_S = 0, P_i = 0}`, and the resulting cap on crossing cycles once the
/// origin solution is discounted.
pub fn bound_report(kind: CenterKind) -> BoundReport {
    let d = kind.closing_degree();
    BoundReport {
        kind,
        d,
        bezout: 2 * d,
        max_admissible: 2 * d - 1,
    }
}

/// `P_S(x, y) = −2Cx − 2By + δy² − μx²`.
pub fn closing_poly_saddle(p: &SaddleParams) -> BivariatePoly {
    BivariatePoly::from_terms([
        (1, 0, -2.0 * p.c),
        (0, 1, -2.0 * p.b),
        (0, 2, p.delta),
        (2, 0, -p.mu),
    ])
}

/// The cleared center polynomial `P_i` from its closed-form coefficients,
/// trimmed at [`TRIM_RTOL`].
pub fn closing_poly_center(sys: &CenterSystem) -> Result<BivariatePoly, ClosingError> {
    let m = &sys.affine;
    let (a1, b1, c1, al, be, ga) = (m.a1, m.b1, m.c1, m.alpha1, m.beta1, m.gamma1);
    let w = b1 * al - a1 * be;
    let terms: Vec<(u32, u32, f64)> = match sys.kind {
        CenterKind::Q1 => {
            let (sa, sb) = (a1 * a1 + al * al, b1 * b1 + be * be);
            let e = 1.0 + 2.0 * ga;
            vec![
                (2, 1, 2.0 * sa * be),
                (1, 2, -2.0 * al * sb),
                (1, 1, -4.0 * c1 * w),
                (2, 0, sa * e),
                (0, 2, -sb * e),
                (
                    1,
                    0,
                    2.0 * (a1 * c1 - c1 * c1 * al + 2.0 * a1 * c1 * ga + al * ga + al * ga * ga),
                ),
                (
                    0,
                    1,
                    -2.0 * (b1 * c1 - c1 * c1 * be + 2.0 * b1 * c1 * ga + be * ga + be * ga * ga),
                ),
            ]
        }
        CenterKind::Q2 => {
            let e = 1.0 + ga;
            vec![
                (2, 2, a1 * a1 * be * be - b1 * b1 * al * al),
                (1, 1, -4.0 * c1 * e * w),
                (
                    2,
                    1,
                    -2.0 * (b1 * c1 * al * al - a1 * a1 * be - al * al * be - a1 * a1 * be * ga),
                ),
                (
                    1,
                    2,
                    -2.0 * (b1 * b1 * al - a1 * c1 * be * be + al * be * be + b1 * b1 * al * ga),
                ),
                (
                    2,
                    0,
                    a1 * a1 + al * al - c1 * c1 * al * al
                        + 2.0 * (a1 * a1 + al * al) * ga
                        + a1 * a1 * ga * ga,
                ),
                (
                    0,
                    2,
                    -b1 * b1 - be * be + c1 * c1 * be * be
                        - 2.0 * (b1 * b1 + be * be) * ga
                        - b1 * b1 * ga * ga,
                ),
                (
                    1,
                    0,
                    2.0 * e * (a1 * c1 - c1 * c1 * al + a1 * c1 * ga + al * ga),
                ),
                (
                    0,
                    1,
                    -2.0 * e * (b1 * c1 - c1 * c1 * be + b1 * c1 * ga + be * ga),
                ),
            ]
        }
        CenterKind::Q3 => {
            let s = -3.0 + 16.0 * ga;
            let k = 9.0 + 32.0 * c1 * c1 - 24.0 * ga;
            let (a2, b2) = (a1 * a1, b1 * b1);
            vec![
                (1, 4, -256.0 * b2 * b2 * al),
                (4, 1, 256.0 * a2 * a2 * be),
                (3, 1, 128.0 * (8.0 * a2 * a1 * c1 * be - 3.0 * a2 * al * be)),
                (
                    1,
                    3,
                    -128.0 * (8.0 * b2 * b1 * c1 * al - 3.0 * b2 * al * be),
                ),
                (1, 1, -32.0 * c1 * w * k),
                (3, 0, 8.0 * a2 * (8.0 * a1 * c1 - 3.0 * al) * s),
                (0, 3, -8.0 * b2 * (8.0 * b1 * c1 - 3.0 * be) * s),
                (
                    2,
                    0,
                    -3.0 * s
                        * (-3.0 * a2 - 32.0 * a2 * c1 * c1 + 16.0 * a1 * c1 * al - 3.0 * al * al
                            + 8.0 * a2 * ga),
                ),
                (4, 0, 16.0 * a2 * a2 * s),
                (
                    0,
                    2,
                    3.0 * s
                        * (-3.0 * b2 - 32.0 * b2 * c1 * c1 + 16.0 * b1 * c1 * be - 3.0 * be * be
                            + 8.0 * b2 * ga),
                ),
                (0, 4, -16.0 * b2 * b2 * s),
                (
                    1,
                    0,
                    -2.0 * k
                        * (3.0 * a1 * c1 + 4.0 * c1 * c1 * al - 16.0 * a1 * c1 * ga
                            + 3.0 * al * ga),
                ),
                (
                    1,
                    2,
                    -48.0
                        * (3.0 * b2 * al + 32.0 * b2 * c1 * c1 * al - 16.0 * b1 * c1 * al * be
                            + 3.0 * al * be * be
                            - 8.0 * b2 * al * ga),
                ),
                (
                    0,
                    1,
                    2.0 * k
                        * (3.0 * b1 * c1 + 4.0 * c1 * c1 * be - 16.0 * b1 * c1 * ga
                            + 3.0 * be * ga),
                ),
                (
                    2,
                    1,
                    48.0 * (3.0 * a2 * be + 32.0 * a2 * c1 * c1 * be - 16.0 * a1 * c1 * al * be
                        + 3.0 * al * al * be
                        - 8.0 * a2 * be * ga),
                ),
            ]
        }
        CenterKind::Q4 => {
            let g = 3.0 + 8.0 * ga;
            let (g2, g3) = (g * g, g * g * g);
            let (a2, b2, al2, be2) = (a1 * a1, b1 * b1, al * al, be * be);
            let (al3, be3, al4, be4) = (al2 * al, be2 * be, al2 * al2, be2 * be2);
            let r = -9.0 + 256.0 * c1 * c1 - 96.0 * ga - 128.0 * ga * ga;
            vec![
                (2, 4, 18432.0 * (2.0 * a2 - al2) * be4),
                (4, 2, -18432.0 * al4 * (2.0 * b2 - be2)),
                (2, 3, 9216.0 * (2.0 * a2 - al2) * be3 * g),
                (3, 2, -9216.0 * al3 * (2.0 * b2 - be2) * g),
                (2, 2, -3456.0 * w * (b1 * al + a1 * be) * g2),
                (1, 1, -576.0 * c1 * w * g3),
                (
                    1,
                    4,
                    4608.0 * be4 * (16.0 * a1 * c1 - 3.0 * al - 8.0 * al * ga),
                ),
                (
                    1,
                    3,
                    -2304.0 * be3 * g * (-16.0 * a1 * c1 + 3.0 * al + 8.0 * al * ga),
                ),
                (
                    4,
                    1,
                    -4608.0 * al4 * (16.0 * b1 * c1 - 3.0 * be - 8.0 * be * ga),
                ),
                (
                    3,
                    1,
                    2304.0 * al3 * g * (-16.0 * b1 * c1 + 3.0 * be + 8.0 * be * ga),
                ),
                (
                    2,
                    1,
                    288.0
                        * g2
                        * (-24.0 * b1 * c1 * al2
                            + 3.0 * a2 * be
                            + 3.0 * al2 * be
                            + 8.0 * a2 * be * ga
                            + 8.0 * al2 * be * ga),
                ),
                (
                    1,
                    2,
                    -288.0
                        * g2
                        * (3.0 * b2 * al - 24.0 * a1 * c1 * be2
                            + 3.0 * al * be2
                            + 8.0 * b2 * al * ga
                            + 8.0 * al * be2 * ga),
                ),
                (4, 0, -144.0 * al4 * r),
                (0, 4, 144.0 * be4 * r),
                (3, 0, -72.0 * al3 * g * r),
                (0, 3, 72.0 * be3 * g * r),
                (
                    1,
                    0,
                    18.0 * g3
                        * (3.0 * a1 * c1 - 16.0 * c1 * c1 * al
                            + 8.0 * a1 * c1 * ga
                            + 3.0 * al * ga
                            + 4.0 * al * ga * ga),
                ),
                (
                    2,
                    0,
                    9.0 * g2
                        * (9.0 * a2 + 9.0 * al2 - 384.0 * c1 * c1 * al2
                            + 48.0 * a2 * ga
                            + 120.0 * al2 * ga
                            + 64.0 * a2 * ga * ga
                            + 160.0 * al2 * ga * ga),
                ),
                (
                    0,
                    1,
                    -18.0
                        * g3
                        * (3.0 * b1 * c1 - 16.0 * c1 * c1 * be
                            + 8.0 * b1 * c1 * ga
                            + 3.0 * be * ga
                            + 4.0 * be * ga * ga),
                ),
                (
                    0,
                    2,
                    -9.0 * g2
                        * (9.0 * b2 + 9.0 * be2 - 384.0 * c1 * c1 * be2
                            + 48.0 * b2 * ga
                            + 120.0 * be2 * ga
                            + 64.0 * b2 * ga * ga
                            + 160.0 * be2 * ga * ga),
                ),
            ]
        }
    };
    let p = BivariatePoly::from_terms(terms).trim(TRIM_RTOL);
    let expected = sys.kind.closing_degree();
    if p.deg_total() != expected {
        return Err(ClosingError::DegreeMismatch {
            kind: sys.kind,
            expected,
            found: p.deg_total(),
        });
    }
    Ok(p)
}

/// Substitutes `(u, v) = (u(t), v(t))` into `p`.
fn restrict_along(p: &BivariatePoly, u: &UnivariatePoly, v: &UnivariatePoly) -> UnivariatePoly {
    p.terms().fold(UnivariatePoly::zero(), |acc, (i, j, c)| {
        &acc + &(&u.pow(i) * &v.pow(j)).scaled(c)
    })
}

/// Numerically cleared `H_i(x,0) − H_i(0,y)`:
/// `N_x(x) D_y(y) − N_y(y) D_x(x)`, where `N_x/D_x` is the composed integral
/// on the x-axis and `N_y/D_y` on the y-axis.
pub fn cleared_difference(sys: &CenterSystem) -> BivariatePoly {
    let m = &sys.affine;
    let (num, den) = sys.kind.integral_polys();
    let (ux, vx) = (
        UnivariatePoly::linear(m.c1, m.a1),
        UnivariatePoly::linear(m.gamma1, m.alpha1),
    );
    let (uy, vy) = (
        UnivariatePoly::linear(m.c1, m.b1),
        UnivariatePoly::linear(m.gamma1, m.beta1),
    );
    let (nx, dx) = (
        restrict_along(&num, &ux, &vx),
        restrict_along(&den, &ux, &vx),
    );
    let (ny, dy) = (
        restrict_along(&num, &uy, &vy),
        restrict_along(&den, &uy, &vy),
    );
    let diff = &BivariatePoly::outer(&nx, &dy) - &BivariatePoly::outer(&dx, &ny);
    diff.trim(TRIM_RTOL)
}

/// The polynomial system `{P_S = 0, P_i = 0}` with its degree data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosingPair {
    pub ps: BivariatePoly,
    pub pi: BivariatePoly,
    pub d_i: u32,
    pub bezout: u32,
    pub max_admissible: u32,
}

impl ClosingPair {
    pub fn new(saddle: &SaddleParams, center: &CenterSystem) -> Result<Self, ClosingError> {
        let ps = closing_poly_saddle(saddle);
        let pi = closing_poly_center(center)?;
        let b = bound_report(center.kind);
        Ok(Self {
            ps,
            pi,
            d_i: b.d,
            bezout: b.bezout,
            max_admissible: b.max_admissible,
        })
    }
}
