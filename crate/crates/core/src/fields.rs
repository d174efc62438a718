//! The two vector-field families and their first integrals.
//!
//! `Σ⁺` (closed first quadrant) carries a linear Hamiltonian saddle; `Σ⁻`
//! (the rest of the plane together with the fourth quadrant) carries one of
//! the four quadratic isochronous centers `Q1..Q4` after an affine change of
//! coordinates `T(x, y) = (a1 x + b1 y + c1, α1 x + β1 y + γ1)`.
//!
//! Transformed fields are produced by pulling the base field back through
//! `T`: `F(p) = DT⁻¹ · F̃(T(p))`, and transformed integrals by composition
//! `H(p) = H̃(T(p))`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polycore::BivariatePoly;

/// Smallest admissible `|b1 α1 − a1 β1|`.
pub const AFFINE_DET_MIN: f64 = 1e-12;
/// Smallest admissible `A² − δ μ`.
pub const SADDLE_DISC_MIN: f64 = 1e-14;
/// First-integral denominators at or below this magnitude are singular.
pub const DENOMINATOR_MIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("saddle: not a saddle (A² − δμ = {disc} must be positive)")]
    NotASaddle { disc: f64 },
    #[error("affine: degenerate (b1·α1 − a1·β1 = {det})")]
    DegenerateAffine { det: f64 },
    #[error("first-integral denominator {value:e} is singular")]
    DenominatorSingular { value: f64 },
    #[error("{field}: non-finite value")]
    NonFinite { field: &'static str },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A planar autonomous vector field, optionally carrying a first integral and
/// a measure of distance to the singular set of that integral.
pub trait Flow {
    fn velocity(&self, p: Point) -> Point;

    fn first_integral(&self, _p: Point) -> Option<f64> {
        None
    }

    /// Signed denominator of the first integral, when it has one.
    fn singular_margin(&self, _p: Point) -> Option<f64> {
        None
    }
}

/// Adapts a closure into a [`Flow`] without a first integral.
pub struct FnFlow<F>(pub F);

impl<F: Fn(Point) -> Point> Flow for FnFlow<F> {
    fn velocity(&self, p: Point) -> Point {
        (self.0)(p)
    }
}

impl<T: Flow + ?Sized> Flow for &T {
    fn velocity(&self, p: Point) -> Point {
        (**self).velocity(p)
    }
    fn first_integral(&self, p: Point) -> Option<f64> {
        (**self).first_integral(p)
    }
    fn singular_margin(&self, p: Point) -> Option<f64> {
        (**self).singular_margin(p)
    }
}

/// Linear Hamiltonian saddle
/// `ẋ = −A x − δ y + B`, `ẏ = μ x + A y + C` with `A² − δμ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaddleParams {
    pub mu: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub delta: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl SaddleParams {
    pub fn new(mu: f64, a: f64, delta: f64, b: f64, c: f64) -> Result<Self, FieldError> {
        let p = Self { mu, a, delta, b, c };
        p.validate()?;
        Ok(p)
    }

    pub fn discriminant(&self) -> f64 {
        self.a * self.a - self.delta * self.mu
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if ![self.mu, self.a, self.delta, self.b, self.c]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(FieldError::NonFinite { field: "saddle" });
        }
        let disc = self.discriminant();
        if disc <= SADDLE_DISC_MIN {
            return Err(FieldError::NotASaddle { disc });
        }
        Ok(())
    }

    pub fn field(&self, p: Point) -> Point {
        Point::new(
            -self.a * p.x - self.delta * p.y + self.b,
            self.mu * p.x + self.a * p.y + self.c,
        )
    }

    /// `H_S = −μ/2 x² − A x y − δ/2 y² − C x + B y`.
    pub fn integral(&self, p: Point) -> f64 {
        let (x, y) = (p.x, p.y);
        -0.5 * self.mu * x * x - self.a * x * y - 0.5 * self.delta * y * y - self.c * x + self.b * y
    }

    /// `H_S` as a polynomial.
    pub fn integral_poly(&self) -> BivariatePoly {
        BivariatePoly::from_terms([
            (2, 0, -0.5 * self.mu),
            (1, 1, -self.a),
            (0, 2, -0.5 * self.delta),
            (1, 0, -self.c),
            (0, 1, self.b),
        ])
    }
}

impl Flow for SaddleParams {
    fn velocity(&self, p: Point) -> Point {
        self.field(p)
    }
    fn first_integral(&self, p: Point) -> Option<f64> {
        Some(self.integral(p))
    }
}

/// Loud's quadratic isochronous centers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CenterKind {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl CenterKind {
    pub const ALL: [CenterKind; 4] = [
        CenterKind::Q1,
        CenterKind::Q2,
        CenterKind::Q3,
        CenterKind::Q4,
    ];

    /// Base field at `(u, v)`.
    pub fn base_field(self, u: f64, v: f64) -> (f64, f64) {
        match self {
            CenterKind::Q1 => (-v + u * u - v * v, u * (1.0 + 2.0 * v)),
            CenterKind::Q2 => (-v + u * u, u * (1.0 + v)),
            CenterKind::Q3 => (-v - 4.0 / 3.0 * u * u, u * (1.0 - 16.0 / 3.0 * v)),
            CenterKind::Q4 => (
                -v + 16.0 / 3.0 * u * u - 4.0 / 3.0 * v * v,
                u * (1.0 + 8.0 / 3.0 * v),
            ),
        }
    }

    /// Numerator and denominator of the base first integral at `(u, v)`.
    pub fn integral_parts(self, u: f64, v: f64) -> (f64, f64) {
        let r2 = u * u + v * v;
        match self {
            CenterKind::Q1 => (r2, 1.0 + 2.0 * v),
            CenterKind::Q2 => (r2, (1.0 + v).powi(2)),
            CenterKind::Q3 => (
                9.0 * r2 - 24.0 * u * u * v + 16.0 * u.powi(4),
                -3.0 + 16.0 * v,
            ),
            CenterKind::Q4 => (
                9.0 * r2 + 24.0 * v.powi(3) + 16.0 * v.powi(4),
                (3.0 + 8.0 * v).powi(4),
            ),
        }
    }

    /// Numerator and denominator of the base first integral as polynomials
    /// in `(u, v)`, stored with `u` in the `x` slot and `v` in the `y` slot.
    pub fn integral_polys(self) -> (BivariatePoly, BivariatePoly) {
        use crate::polycore::UnivariatePoly;
        let r2 = BivariatePoly::from_terms([(2, 0, 1.0), (0, 2, 1.0)]);
        match self {
            CenterKind::Q1 => (r2, BivariatePoly::from_terms([(0, 0, 1.0), (0, 1, 2.0)])),
            CenterKind::Q2 => (
                r2,
                BivariatePoly::from_y(&UnivariatePoly::linear(1.0, 1.0).pow(2)),
            ),
            CenterKind::Q3 => (
                BivariatePoly::from_terms([(2, 0, 9.0), (0, 2, 9.0), (2, 1, -24.0), (4, 0, 16.0)]),
                BivariatePoly::from_terms([(0, 0, -3.0), (0, 1, 16.0)]),
            ),
            CenterKind::Q4 => (
                BivariatePoly::from_terms([(2, 0, 9.0), (0, 2, 9.0), (0, 3, 24.0), (0, 4, 16.0)]),
                BivariatePoly::from_y(&UnivariatePoly::linear(3.0, 8.0).pow(4)),
            ),
        }
    }

    /// Total degree `d_i` of the cleared closing polynomial.
    pub fn closing_degree(self) -> u32 {
        match self {
            CenterKind::Q1 => 3,
            CenterKind::Q2 => 4,
            CenterKind::Q3 => 5,
            CenterKind::Q4 => 6,
        }
    }
}

impl fmt::Display for CenterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl std::str::FromStr for CenterKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "Q1" => Ok(CenterKind::Q1),
            "Q2" => Ok(CenterKind::Q2),
            "Q3" => Ok(CenterKind::Q3),
            "Q4" => Ok(CenterKind::Q4),
            other => Err(format!("unknown center kind {other:?} (expected Q1..Q4)")),
        }
    }
}

pub fn base_center_field(kind: CenterKind, p: Point) -> Point {
    let (du, dv) = kind.base_field(p.x, p.y);
    Point::new(du, dv)
}

pub fn base_center_integral(kind: CenterKind, p: Point) -> Result<f64, FieldError> {
    let (num, den) = kind.integral_parts(p.x, p.y);
    if !(den.abs() > DENOMINATOR_MIN) {
        return Err(FieldError::DenominatorSingular { value: den });
    }
    Ok(num / den)
}

/// `(x, y) ↦ (a1 x + b1 y + c1, α1 x + β1 y + γ1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMap {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub gamma1: f64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        a1: 1.0,
        b1: 0.0,
        c1: 0.0,
        alpha1: 0.0,
        beta1: 1.0,
        gamma1: 0.0,
    };

    pub fn new(
        a1: f64,
        b1: f64,
        c1: f64,
        alpha1: f64,
        beta1: f64,
        gamma1: f64,
    ) -> Result<Self, FieldError> {
        let m = Self {
            a1,
            b1,
            c1,
            alpha1,
            beta1,
            gamma1,
        };
        m.validate()?;
        Ok(m)
    }

    /// `b1 α1 − a1 β1`, the nondegeneracy quantity (minus the Jacobian
    /// determinant).
    pub fn nondegeneracy(&self) -> f64 {
        self.b1 * self.alpha1 - self.a1 * self.beta1
    }

    pub fn jacobian_det(&self) -> f64 {
        self.a1 * self.beta1 - self.b1 * self.alpha1
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let vals = [
            self.a1,
            self.b1,
            self.c1,
            self.alpha1,
            self.beta1,
            self.gamma1,
        ];
        if !vals.iter().all(|v| v.is_finite()) {
            return Err(FieldError::NonFinite { field: "affine" });
        }
        let det = self.nondegeneracy();
        if !(det.abs() > AFFINE_DET_MIN) {
            return Err(FieldError::DegenerateAffine { det });
        }
        Ok(())
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a1 * p.x + self.b1 * p.y + self.c1,
            self.alpha1 * p.x + self.beta1 * p.y + self.gamma1,
        )
    }

    /// `DT · w`.
    pub fn push_vector(&self, w: Point) -> Point {
        Point::new(
            self.a1 * w.x + self.b1 * w.y,
            self.alpha1 * w.x + self.beta1 * w.y,
        )
    }

    /// `DT⁻¹ · w`.
    pub fn pull_vector(&self, w: Point) -> Point {
        let det = self.jacobian_det();
        Point::new(
            (self.beta1 * w.x - self.b1 * w.y) / det,
            (-self.alpha1 * w.x + self.a1 * w.y) / det,
        )
    }

    /// `T⁻¹(q)`.
    pub fn invert(&self, q: Point) -> Point {
        self.pull_vector(Point::new(q.x - self.c1, q.y - self.gamma1))
    }
}

/// A quadratic isochronous center moved by an affine map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterSystem {
    pub kind: CenterKind,
    pub affine: AffineMap,
}

impl CenterSystem {
    pub fn new(kind: CenterKind, affine: AffineMap) -> Result<Self, FieldError> {
        affine.validate()?;
        Ok(Self { kind, affine })
    }

    pub fn field(&self, p: Point) -> Point {
        let w = base_center_field(self.kind, self.affine.apply(p));
        self.affine.pull_vector(w)
    }

    pub fn integral(&self, p: Point) -> Result<f64, FieldError> {
        base_center_integral(self.kind, self.affine.apply(p))
    }

    /// Denominator of the composed first integral at `p`.
    pub fn denominator(&self, p: Point) -> f64 {
        let q = self.affine.apply(p);
        self.kind.integral_parts(q.x, q.y).1
    }

    /// The equilibrium `T⁻¹(0, 0)`.
    pub fn equilibrium(&self) -> Point {
        self.affine.invert(Point::ORIGIN)
    }
}

impl Flow for CenterSystem {
    fn velocity(&self, p: Point) -> Point {
        self.field(p)
    }
    fn first_integral(&self, p: Point) -> Option<f64> {
        self.integral(p).ok()
    }
    fn singular_margin(&self, p: Point) -> Option<f64> {
        Some(self.denominator(p))
    }
}

/// Position relative to the switching curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    SigmaPlus,
    SigmaMinus,
    SwitchXAxis,
    SwitchYAxis,
    Origin,
}

/// Exact-sign classification of a point.
pub fn classify(p: Point) -> Region {
    match (p.x, p.y) {
        (x, y) if x == 0.0 && y == 0.0 => Region::Origin,
        (x, y) if y == 0.0 && x > 0.0 => Region::SwitchXAxis,
        (x, y) if x == 0.0 && y > 0.0 => Region::SwitchYAxis,
        (x, y) if x > 0.0 && y > 0.0 => Region::SigmaPlus,
        _ => Region::SigmaMinus,
    }
}
