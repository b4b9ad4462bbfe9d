//! The three map families: a one-dimensional nonhyperbolic expansion
//! `x + x^(2n+1) + X(x)`, the planar saddle
//! `(x - x^(2n+1) + X(x,y), y + y^(2m+1) + Y(x,y))` and the skew map
//! `(x/2, y(1+x²))` whose `y`-axis consists of fixed points.
//!
//! Distances in the plane are measured in the max-norm everywhere in this
//! crate.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

/// Tolerance used for Newton inversion when callers have no better choice.
pub const INVERSE_TOL: f64 = 1e-12;
/// Newton iteration cap.
pub const NEWTON_MAX_ITER: usize = 64;
/// Smallest Jacobian determinant accepted along a Newton path.
pub const MIN_JACOBIAN_DET: f64 = 0.5;

/// `x^k` by repeated squaring (`core` has no `powi`).
#[inline]
pub fn ipow(mut x: f64, mut k: u32) -> f64 {
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= x;
        }
        x *= x;
        k >>= 1;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Max-norm distance.
    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

/// A phase point of either dimension. Serialized as a plain array `[x]` or `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub enum Point {
    One(f64),
    Two(Point2),
}

impl Point {
    pub fn dim(&self) -> usize {
        match self {
            Point::One(_) => 1,
            Point::Two(_) => 2,
        }
    }

    pub fn is_finite(&self) -> bool {
        match *self {
            Point::One(x) => x.is_finite(),
            Point::Two(p) => p.is_finite(),
        }
    }

    pub fn x(&self) -> f64 {
        match *self {
            Point::One(x) => x,
            Point::Two(p) => p.x,
        }
    }

    /// Max-norm distance; panics on mixed dimensions.
    pub fn dist(&self, other: &Point) -> f64 {
        match (*self, *other) {
            (Point::One(a), Point::One(b)) => (a - b).abs(),
            (Point::Two(a), Point::Two(b)) => a.dist(b),
            _ => panic!("distance between points of different dimension"),
        }
    }

    pub fn as_slice_vec(&self) -> Vec<f64> {
        (*self).into()
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        match p {
            Point::One(x) => alloc::vec![x],
            Point::Two(p) => alloc::vec![p.x, p.y],
        }
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        match v.as_slice() {
            [x] => Ok(Point::One(*x)),
            [x, y] => Ok(Point::Two(Point2::new(*x, *y))),
            _ => Err(usage(format!("point must have 1 or 2 coordinates, got {}", v.len()))),
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::One(x)
    }
}

impl From<Point2> for Point {
    fn from(p: Point2) -> Self {
        Point::Two(p)
    }
}

/// A perturbation term `a·x^k·y^l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub a: f64,
    pub k: u32,
    #[serde(default)]
    pub l: u32,
}

impl Monomial {
    pub const fn new(a: f64, k: u32, l: u32) -> Self {
        Self { a, k, l }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * ipow(x, self.k) * ipow(y, self.l)
    }

    #[inline]
    pub fn dx(&self, x: f64, y: f64) -> f64 {
        if self.k == 0 {
            0.0
        } else {
            self.a * self.k as f64 * ipow(x, self.k - 1) * ipow(y, self.l)
        }
    }

    #[inline]
    pub fn dy(&self, x: f64, y: f64) -> f64 {
        if self.l == 0 {
            0.0
        } else {
            self.a * self.l as f64 * ipow(x, self.k) * ipow(y, self.l - 1)
        }
    }

    /// The term and its Jacobian vanish at the origin.
    pub fn is_higher_order(&self) -> bool {
        self.k + self.l >= 2
    }
}

fn sum_terms(terms: &[Monomial], x: f64, y: f64) -> f64 {
    terms.iter().map(|t| t.eval(x, y)).sum()
}

fn sum_dx(terms: &[Monomial], x: f64, y: f64) -> f64 {
    terms.iter().map(|t| t.dx(x, y)).sum()
}

fn sum_dy(terms: &[Monomial], x: f64, y: f64) -> f64 {
    terms.iter().map(|t| t.dy(x, y)).sum()
}

/// Parametric description of one of the map families.
///
/// JSON form: `{"variant": "expanding1d"|"planar_saddle"|"nonisolated_skew",
/// "n": int, "m": int, "X": [{"a": f, "k": i, "l": i}], "Y": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum MapSpec {
    #[serde(rename = "expanding1d")]
    Expanding1D {
        n: u32,
        #[serde(rename = "X", default)]
        x_terms: Vec<Monomial>,
    },
    #[serde(rename = "planar_saddle")]
    PlanarSaddle {
        n: u32,
        m: u32,
        #[serde(rename = "X", default)]
        x_terms: Vec<Monomial>,
        #[serde(rename = "Y", default)]
        y_terms: Vec<Monomial>,
    },
    #[serde(rename = "nonisolated_skew")]
    NonisolatedSkew,
}

/// A 1×1 or 2×2 Jacobian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Jacobian {
    One(f64),
    Two([[f64; 2]; 2]),
}

impl Jacobian {
    pub fn det(&self) -> f64 {
        match *self {
            Jacobian::One(a) => a,
            Jacobian::Two([[a, b], [c, d]]) => a * d - b * c,
        }
    }

    /// Operator norm induced by the max-norm (largest absolute row sum).
    pub fn max_norm(&self) -> f64 {
        match *self {
            Jacobian::One(a) => a.abs(),
            Jacobian::Two([[a, b], [c, d]]) => (a.abs() + b.abs()).max(c.abs() + d.abs()),
        }
    }

    pub fn inverse(&self) -> Option<Jacobian> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(match *self {
            Jacobian::One(a) => Jacobian::One(1.0 / a),
            Jacobian::Two([[a, b], [c, d]]) => Jacobian::Two([[d / det, -b / det], [-c / det, a / det]]),
        })
    }
}

/// Scalar map `x + sign·x^power + Σ a·x^k`, the building block of the
/// one-dimensional family and of the coordinates of a decoupled saddle.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    pub sign: f64,
    pub power: u32,
    /// `(a, k)` pairs.
    pub terms: Vec<(f64, u32)>,
}

impl ScalarMap {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        let extra: f64 = self.terms.iter().map(|&(a, k)| a * ipow(x, k)).sum();
        x + self.sign * ipow(x, self.power) + extra
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        let extra: f64 = self.terms.iter().filter(|&&(_, k)| k > 0).map(|&(a, k)| a * k as f64 * ipow(x, k - 1)).sum();
        1.0 + self.sign * self.power as f64 * ipow(x, self.power - 1) + extra
    }

    /// Newton inversion seeded at `q`.
    pub fn inverse(&self, q: f64, tol: f64) -> Result<f64> {
        newton_1d(|x| self.apply(x), |x| self.derivative(x), q, tol)
    }
}

fn newton_1d(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, q: f64, tol: f64) -> Result<f64> {
    let mut x = q;
    let mut residual = f64::INFINITY;
    for it in 0..NEWTON_MAX_ITER {
        residual = f(x) - q;
        if residual.abs() <= tol {
            return Ok(x);
        }
        let slope = df(x);
        if !(slope >= MIN_JACOBIAN_DET) {
            return Err(Error::Convergence { iterations: it, residual: residual.abs() });
        }
        x -= residual / slope;
    }
    Err(Error::Convergence { iterations: NEWTON_MAX_ITER, residual: residual.abs() })
}

impl MapSpec {
    /// `f(x) = x + x³`.
    pub fn cubic() -> Self {
        MapSpec::Expanding1D { n: 1, x_terms: Vec::new() }
    }

    /// Unperturbed planar saddle with the given exponents.
    pub fn saddle(n: u32, m: u32) -> Self {
        MapSpec::PlanarSaddle { n, m, x_terms: Vec::new(), y_terms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        let check_terms = |terms: &[Monomial]| -> Result<()> {
            if terms.iter().any(|t| !t.a.is_finite()) {
                return Err(usage("monomial coefficient must be finite"));
            }
            Ok(())
        };
        match self {
            MapSpec::Expanding1D { n, x_terms } => {
                if *n == 0 {
                    return Err(usage("n must be at least 1"));
                }
                check_terms(x_terms)?;
                if x_terms.iter().any(|t| t.l != 0) {
                    return Err(usage("one-dimensional monomials must have ydeg l = 0"));
                }
            }
            MapSpec::PlanarSaddle { n, m, x_terms, y_terms } => {
                if *n == 0 || *m == 0 {
                    return Err(usage("n and m must be at least 1"));
                }
                check_terms(x_terms)?;
                check_terms(y_terms)?;
            }
            MapSpec::NonisolatedSkew => {}
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            MapSpec::Expanding1D { .. } => 1,
            _ => 2,
        }
    }

    fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(usage(format!("point of dimension {} given to a {}-dimensional map", p.dim(), self.dim())));
        }
        if !p.is_finite() {
            return Err(usage("point must be finite"));
        }
        Ok(())
    }

    /// Scalar form of the one-dimensional family.
    pub fn scalar(&self) -> Option<ScalarMap> {
        match self {
            MapSpec::Expanding1D { n, x_terms } => {
                Some(ScalarMap { sign: 1.0, power: 2 * n + 1, terms: x_terms.iter().map(|t| (t.a, t.k)).collect() })
            }
            _ => None,
        }
    }

    /// For a saddle whose `X` depends on `x` only and `Y` on `y` only, the two
    /// coordinate maps. `None` for coupled saddles and other families.
    pub fn decoupled_components(&self) -> Option<(ScalarMap, ScalarMap)> {
        match self {
            MapSpec::PlanarSaddle { n, m, x_terms, y_terms }
                if x_terms.iter().all(|t| t.l == 0) && y_terms.iter().all(|t| t.k == 0) =>
            {
                Some((
                    ScalarMap { sign: -1.0, power: 2 * n + 1, terms: x_terms.iter().map(|t| (t.a, t.k)).collect() },
                    ScalarMap { sign: 1.0, power: 2 * m + 1, terms: y_terms.iter().map(|t| (t.a, t.l)).collect() },
                ))
            }
            _ => None,
        }
    }

    /// `f(x)` for the one-dimensional family.
    #[inline]
    pub fn apply1(&self, x: f64) -> f64 {
        match self {
            MapSpec::Expanding1D { n, x_terms } => x + ipow(x, 2 * n + 1) + sum_terms(x_terms, x, 0.0),
            _ => panic!("apply1 on a planar map"),
        }
    }

    #[inline]
    pub fn derivative1(&self, x: f64) -> f64 {
        match self {
            MapSpec::Expanding1D { n, x_terms } => 1.0 + (2 * n + 1) as f64 * ipow(x, 2 * n) + sum_dx(x_terms, x, 0.0),
            _ => panic!("derivative1 on a planar map"),
        }
    }

    /// `f(p)` for the planar families.
    #[inline]
    pub fn apply2(&self, p: Point2) -> Point2 {
        let Point2 { x, y } = p;
        match self {
            MapSpec::PlanarSaddle { n, m, x_terms, y_terms } => Point2::new(
                x - ipow(x, 2 * n + 1) + sum_terms(x_terms, x, y),
                y + ipow(y, 2 * m + 1) + sum_terms(y_terms, x, y),
            ),
            MapSpec::NonisolatedSkew => Point2::new(x / 2.0, y * (1.0 + x * x)),
            MapSpec::Expanding1D { .. } => panic!("apply2 on a one-dimensional map"),
        }
    }

    pub fn jacobian2(&self, p: Point2) -> [[f64; 2]; 2] {
        let Point2 { x, y } = p;
        match self {
            MapSpec::PlanarSaddle { n, m, x_terms, y_terms } => [
                [1.0 - (2 * n + 1) as f64 * ipow(x, 2 * n) + sum_dx(x_terms, x, y), sum_dy(x_terms, x, y)],
                [sum_dx(y_terms, x, y), 1.0 + (2 * m + 1) as f64 * ipow(y, 2 * m) + sum_dy(y_terms, x, y)],
            ],
            MapSpec::NonisolatedSkew => [[0.5, 0.0], [2.0 * x * y, 1.0 + x * x]],
            MapSpec::Expanding1D { .. } => panic!("jacobian2 on a one-dimensional map"),
        }
    }

    pub fn inverse1(&self, q: f64, tol: f64) -> Result<f64> {
        newton_1d(|x| self.apply1(x), |x| self.derivative1(x), q, tol)
    }

    pub fn inverse2(&self, q: Point2, tol: f64) -> Result<Point2> {
        if let MapSpec::NonisolatedSkew = self {
            return Ok(Point2::new(2.0 * q.x, q.y / (1.0 + 4.0 * q.x * q.x)));
        }
        let mut z = q;
        let mut residual = f64::INFINITY;
        for it in 0..NEWTON_MAX_ITER {
            let fz = self.apply2(z);
            let (rx, ry) = (fz.x - q.x, fz.y - q.y);
            residual = rx.abs().max(ry.abs());
            if residual <= tol {
                return Ok(z);
            }
            let [[a, b], [c, d]] = self.jacobian2(z);
            let det = a * d - b * c;
            if !(det >= MIN_JACOBIAN_DET) {
                return Err(Error::Convergence { iterations: it, residual });
            }
            z.x -= (d * rx - b * ry) / det;
            z.y -= (a * ry - c * rx) / det;
        }
        Err(Error::Convergence { iterations: NEWTON_MAX_ITER, residual })
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        self.check_dim(p)?;
        Ok(match *p {
            Point::One(x) => Point::One(self.apply1(x)),
            Point::Two(p) => Point::Two(self.apply2(p)),
        })
    }

    pub fn apply_inverse(&self, q: &Point, tol: f64) -> Result<Point> {
        self.check_dim(q)?;
        Ok(match *q {
            Point::One(x) => Point::One(self.inverse1(x, tol)?),
            Point::Two(p) => Point::Two(self.inverse2(p, tol)?),
        })
    }

    pub fn jacobian(&self, p: &Point) -> Result<Jacobian> {
        self.check_dim(p)?;
        Ok(match *p {
            Point::One(x) => Jacobian::One(self.derivative1(x)),
            Point::Two(p) => Jacobian::Two(self.jacobian2(p)),
        })
    }

    /// Finite and inside the region where the map is a diffeomorphism with
    /// Jacobian determinant at least [`MIN_JACOBIAN_DET`].
    pub fn is_regular(&self, p: &Point) -> bool {
        p.is_finite() && self.jacobian(p).map(|j| j.det() >= MIN_JACOBIAN_DET).unwrap_or(false)
    }

    /// View as a planar map; fails for the one-dimensional family.
    pub fn planar(&self) -> Result<Planar<'_>> {
        if self.dim() != 2 {
            return Err(usage("expected a planar map"));
        }
        Ok(Planar(self))
    }
}

/// A planar homeomorphism with a computable inverse.
pub trait PlanarMap {
    fn forward(&self, p: Point2) -> Point2;
    fn inverse(&self, q: Point2) -> Result<Point2>;
}

/// Borrowed planar view of a [`MapSpec`].
#[derive(Debug, Clone, Copy)]
pub struct Planar<'a>(pub &'a MapSpec);

impl PlanarMap for Planar<'_> {
    fn forward(&self, p: Point2) -> Point2 {
        self.0.apply2(p)
    }

    fn inverse(&self, q: Point2) -> Result<Point2> {
        self.0.inverse2(q, INVERSE_TOL)
    }
}

/// Closed max-norm box `B(A, 0)`, optionally with the line `x = 0` removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighborhood {
    pub half_width: f64,
    #[serde(default)]
    pub x_exclusion: bool,
}

impl Neighborhood {
    pub const fn new(half_width: f64) -> Self {
        Self { half_width, x_exclusion: false }
    }

    pub const fn excluding_axis(half_width: f64) -> Self {
        Self { half_width, x_exclusion: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(usage("neighborhood half-width must be positive"));
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point) -> bool {
        let a = self.half_width;
        match *p {
            Point::One(x) => x.abs() <= a && (!self.x_exclusion || x != 0.0),
            Point::Two(q) => q.x.abs() <= a && q.y.abs() <= a && (!self.x_exclusion || q.x != 0.0),
        }
    }
}
