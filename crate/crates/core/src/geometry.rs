//! Points in `R x C`, the Hopf map and spinor lifts.
//!
//! Coordinates are stored as `(t, u, v)`: `t` is the distinguished real axis
//! and `zeta = u + iv` is the complex factor. A spinor `(w1, w2)` maps to
//! `((|w1|^2 - |w2|^2) / 2, w1 * conj(w2))`, so a lift of a vector of length
//! `r` has `|w1|^2 + |w2|^2 = 2r`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { t: 0.0, u: 0.0, v: 0.0 };

    pub const fn new(t: f64, u: f64, v: f64) -> Self {
        Self { t, u, v }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.v.is_finite()
    }

    /// Projection onto the complex factor.
    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.t, self.u, self.v)
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        (*other - *self).norm()
    }
}

impl From<[f64; 3]> for Point3 {
    fn from([t, u, v]: [f64; 3]) -> Self {
        Self { t, u, v }
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.t, p.u, p.v]
    }
}

/// A displacement in `R x C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { t: 0.0, u: 0.0, v: 0.0 };

    pub const fn new(t: f64, u: f64, v: f64) -> Self {
        Self { t, u, v }
    }

    pub fn from_parts(t: f64, zeta: Complex64) -> Self {
        Self { t, u: zeta.re, v: zeta.im }
    }

    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.t * self.t + self.u * self.u + self.v * self.v
    }

    pub fn norm(&self) -> f64 {
        // hypot keeps tiny and huge vectors from under/overflowing
        self.t.hypot(self.u.hypot(self.v))
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.t * other.t + self.u * other.u + self.v * other.v
    }

    pub fn cross(&self, other: &Vec3) -> Vec3 {
        Vec3::new(
            self.u * other.v - self.v * other.u,
            self.v * other.t - self.t * other.v,
            self.t * other.u - self.u * other.t,
        )
    }

    pub fn scale(&self, k: f64) -> Vec3 {
        Vec3::new(self.t * k, self.u * k, self.v * k)
    }
}

impl Sub for Point3 {
    type Output = Vec3;

    fn sub(self, rhs: Point3) -> Vec3 {
        Vec3::new(self.t - rhs.t, self.u - rhs.u, self.v - rhs.v)
    }
}

impl Add<Vec3> for Point3 {
    type Output = Point3;

    fn add(self, rhs: Vec3) -> Point3 {
        Point3::new(self.t + rhs.t, self.u + rhs.u, self.v + rhs.v)
    }
}

impl Add for Vec3 {
    type Output = Vec3;

    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.t + rhs.t, self.u + rhs.u, self.v + rhs.v)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;

    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.t - rhs.t, self.u - rhs.u, self.v - rhs.v)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;

    fn neg(self) -> Vec3 {
        Vec3::new(-self.t, -self.u, -self.v)
    }
}

/// A point of `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub w1: Complex64,
    pub w2: Complex64,
}

impl Spinor {
    pub const fn new(w1: Complex64, w2: Complex64) -> Self {
        Self { w1, w2 }
    }

    pub fn from_real(w1: f64, w2: f64) -> Self {
        Self::new(Complex64::new(w1, 0.0), Complex64::new(w2, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w1.norm_sqr() + self.w2.norm_sqr()
    }

    pub fn hopf(&self) -> Vec3 {
        hopf(self)
    }

    pub fn antipode(&self) -> Spinor {
        antipode(self)
    }
}

impl Mul<Complex64> for Spinor {
    type Output = Spinor;

    fn mul(self, k: Complex64) -> Spinor {
        Spinor::new(self.w1 * k, self.w2 * k)
    }
}

impl Neg for Spinor {
    type Output = Spinor;

    fn neg(self) -> Spinor {
        Spinor::new(-self.w1, -self.w2)
    }
}

/// The Hopf map `C^2 -> R x C`.
pub fn hopf(w: &Spinor) -> Vec3 {
    let t = (w.w1.norm_sqr() - w.w2.norm_sqr()) / 2.0;
    Vec3::from_parts(t, w.w1 * w.w2.conj())
}

/// `(w1, w2) -> (-conj(w2), conj(w1))`. Negates the Hopf image, squares to
/// `-1` and conjugates phases.
pub fn antipode(w: &Spinor) -> Spinor {
    Spinor::new(-w.w2.conj(), w.w1.conj())
}

/// Deterministic lift of a nonzero vector through the Hopf map.
///
/// Two charts, switching at `t = 0`:
///
/// * `t >= 0`: `(r + t, conj(zeta)) / sqrt(r + t)`
/// * `t < 0`:  `(zeta, r - t) / sqrt(r - t)`
///
/// The chart denominators are at least `r`, so neither chart meets the
/// singularity of the other. Both give spinors of squared norm `2r`.
pub fn lift(v: &Vec3) -> Result<Spinor> {
    let r = v.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::ZeroVector);
    }
    let zeta = v.zeta();
    if v.t >= 0.0 {
        let s = (r + v.t).sqrt();
        Ok(Spinor::new(Complex64::new(s, 0.0), zeta.conj() / s))
    } else {
        let s = (r - v.t).sqrt();
        Ok(Spinor::new(zeta / s, Complex64::new(s, 0.0)))
    }
}

/// An ordered list of at least two distinct points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    points: Vec<Point3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Configuration {
    pub fn new(points: Vec<Point3>) -> Result<Self> {
        let cfg = Self { points, label: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Parse the `{"points": [[t, u, v], ...], "label": "..."}` format.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Configuration = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serialises")
    }

    fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 points, got {}",
                self.points.len()
            )));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
        }
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                if self.points[i] == self.points[j] {
                    return Err(Error::CoincidentPoints(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Point3 {
        self.points[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i].distance(&self.points[j])
    }

    /// Iterates `(i, j, r_ij)` over unordered pairs with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.distance(i, j))))
    }

    pub fn mean_edge(&self) -> f64 {
        let (sum, count) = self.pairs().fold((0.0, 0usize), |(s, c), (_, _, r)| (s + r, c + 1));
        sum / count as f64
    }

    pub fn min_edge(&self) -> f64 {
        self.pairs().map(|(_, _, r)| r).fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        self.pairs().map(|(_, _, r)| r).fold(0.0, f64::max)
    }

    /// Applies `f` to every point. The result is validated again.
    pub fn map_points(&self, f: impl Fn(Point3) -> Point3) -> Result<Self> {
        let mut cfg = Configuration::new(self.points.iter().copied().map(f).collect())?;
        cfg.label = self.label.clone();
        Ok(cfg)
    }

    /// Reorders points so that new point `k` is old point `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        let mut seen = vec![false; order.len()];
        for &k in order {
            if k >= order.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
        }
        Configuration::new(order.iter().map(|&k| self.points[k]).collect())
    }

    pub fn translated(&self, by: Vec3) -> Result<Self> {
        self.map_points(|p| p + by)
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        self.map_points(|p| Point3::new(p.t * k, p.u * k, p.v * k))
    }

    pub fn rotated(&self, rot: &Rotation) -> Result<Self> {
        self.map_points(|p| Point3::ORIGIN + rot.apply(&p.to_vec()))
    }

    /// Mirror image under `t -> -t`.
    pub fn reflected(&self) -> Result<Self> {
        self.map_points(|p| Point3::new(-p.t, p.u, p.v))
    }
}

/// View of point `j` from point `i` (`i < j`) and the reversed view.
///
/// The earlier point uses the lift `w` of `p_j - p_i`; the later point uses
/// `antipode(w)`. Phase and ordering ambiguities cancel in the determinant
/// under this pairing.
pub fn pair_spinors(cfg: &Configuration, i: usize, j: usize) -> Result<(Spinor, Spinor)> {
    if i >= j || j >= cfg.len() {
        return Err(Error::InvalidInput(format!("bad pair ({i}, {j})")));
    }
    let d = cfg.point(j) - cfg.point(i);
    let w = lift(&d).map_err(|_| Error::CoincidentPoints(i, j))?;
    Ok((w, antipode(&w)))
}

/// Symmetric matrix of pairwise distances.
pub fn distance_matrix(cfg: &Configuration) -> Vec<Vec<f64>> {
    let n = cfg.len();
    let mut m = vec![vec![0.0; n]; n];
    for (i, j, r) in cfg.pairs() {
        m[i][j] = r;
        m[j][i] = r;
    }
    m
}

/// A proper rotation of 3-space stored as an orthonormal matrix acting on
/// `(t, u, v)` columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };

    /// From a (not necessarily normalised) quaternion `a + bi + cj + dk`.
    pub fn from_quaternion(a: f64, b: f64, c: f64, d: f64) -> Self {
        let n = (a * a + b * b + c * c + d * d).sqrt();
        let (a, b, c, d) = (a / n, b / n, c / n, d / n);
        Rotation {
            m: [
                [a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
                [2.0 * (b * c + a * d), a * a - b * b + c * c - d * d, 2.0 * (c * d - a * b)],
                [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a - b * b - c * c + d * d],
            ],
        }
    }

    /// Rows are the images of the new axes; the frame must be orthonormal
    /// and right-handed.
    pub fn from_rows(rows: [Vec3; 3]) -> Self {
        Rotation { m: rows.map(|r| [r.t, r.u, r.v]) }
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        let row = |r: &[f64; 3]| r[0] * x.t + r[1] * x.u + r[2] * x.v;
        Vec3::new(row(&self.m[0]), row(&self.m[1]), row(&self.m[2]))
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

/// Rigid motion taking `p_0` to the origin, `p_1` onto the positive real
/// axis of the complex factor and `p_2` into the `t = 0` plane with
/// `Im(zeta) >= 0`. Any remaining points keep their relative geometry, so
/// for four points the last one sits at height `t = +-r` over the base.
pub fn base_frame(cfg: &Configuration) -> Result<Configuration> {
    if cfg.len() < 3 {
        return Err(Error::InvalidInput("base frame needs at least 3 points".into()));
    }
    let o = cfg.point(0);
    let e_u = cfg.point(1) - o;
    let e_u = e_u.scale(1.0 / e_u.norm());
    let w = cfg.point(2) - o;
    let in_plane = w - e_u.scale(w.dot(&e_u));
    let len = in_plane.norm();
    if len <= 1e-14 * w.norm() {
        return Err(Error::InvalidInput("first three points are collinear".into()));
    }
    let e_v = in_plane.scale(1.0 / len);
    // (t, u, v) right-handed: t = u x v
    let e_t = e_u.cross(&e_v);
    let rot = Rotation::from_rows([e_t, e_u, e_v]);
    cfg.map_points(|p| Point3::ORIGIN + rot.apply(&(p - o)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hopf_examples() {
        assert_eq!(hopf(&Spinor::from_real(1.0, 0.0)), Vec3::new(0.5, 0.0, 0.0));
        assert_eq!(hopf(&Spinor::from_real(2.0, 2.0)), Vec3::new(0.0, 4.0, 0.0));
    }

    #[test]
    fn antipode_examples() {
        assert_eq!(antipode(&Spinor::from_real(1.0, 0.0)), Spinor::from_real(0.0, 1.0));

        let w = Spinor::new(c(2.0, 0.0), c(0.0, 3.0));
        assert_eq!(antipode(&antipode(&w)), -w);

        let theta = PI / 3.0;
        let w = Spinor::from_real(1.0, 1.0);
        let phase = Complex64::from_polar(1.0, theta);
        let lhs = antipode(&(w * phase));
        let rhs = antipode(&w) * phase.conj();
        assert!((lhs.w1 - rhs.w1).norm() < 1e-15 && (lhs.w2 - rhs.w2).norm() < 1e-15);
    }

    #[test]
    fn antipode_negates_hopf() {
        let w = Spinor::new(c(0.3, -1.2), c(2.5, 0.7));
        let a = hopf(&w);
        let b = hopf(&antipode(&w));
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn lift_examples() {
        let a: f64 = 4.0;
        let w = lift(&Vec3::new(0.0, a, 0.0)).unwrap();
        assert!((w.w1 - c(a.sqrt(), 0.0)).norm() < 1e-15);
        assert!((w.w2 - c(a.sqrt(), 0.0)).norm() < 1e-15);

        let r: f64 = 3.0;
        assert_eq!(lift(&Vec3::new(r, 0.0, 0.0)).unwrap(), Spinor::from_real((2.0 * r).sqrt(), 0.0));
        assert_eq!(lift(&Vec3::new(-r, 0.0, 0.0)).unwrap(), Spinor::from_real(0.0, (2.0 * r).sqrt()));
        assert!((hopf(&lift(&Vec3::new(-r, 0.0, 0.0)).unwrap()) - Vec3::new(-r, 0.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn lift_of_zero_is_an_error() {
        assert!(matches!(lift(&Vec3::ZERO), Err(Error::ZeroVector)));
    }

    #[test]
    fn charts_agree_up_to_phase_near_the_switch() {
        let v_plus = Vec3::new(1e-17, 0.6, -0.8);
        let v_minus = Vec3::new(-1e-17, 0.6, -0.8);
        let a = lift(&v_plus).unwrap();
        let b = lift(&v_minus).unwrap();
        // a = b * e^{i phi}: the ratio is the same unimodular number in both slots
        let ph1 = a.w1 / b.w1;
        let ph2 = a.w2 / b.w2;
        assert!((ph1.norm() - 1.0).abs() < 1e-12);
        assert!((ph1 - ph2).norm() < 1e-12);
        assert!((hopf(&a) - hopf(&b)).norm() < 1e-12);
    }

    #[test]
    fn pair_spinors_unit_segment() {
        let cfg = Configuration::new(vec![Point3::ORIGIN, Point3::new(0.0, 1.0, 0.0)]).unwrap();
        let (first, second) = pair_spinors(&cfg, 0, 1).unwrap();
        assert_eq!(first, Spinor::from_real(1.0, 1.0));
        assert_eq!(second, Spinor::from_real(-1.0, 1.0));
        assert_eq!(hopf(&second), Vec3::new(0.0, -1.0, 0.0));
    }

    #[test]
    fn distance_matrix_examples() {
        let seg = Configuration::new(vec![Point3::ORIGIN, Point3::new(0.0, 1.0, 0.0)]).unwrap();
        assert_eq!(distance_matrix(&seg), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);

        let tri = Configuration::new(vec![Point3::ORIGIN, Point3::new(0.0, 3.0, 0.0), Point3::new(0.0, 0.0, 4.0)])
            .unwrap();
        let d = distance_matrix(&tri);
        assert_eq!((d[0][1], d[0][2], d[1][2]), (3.0, 4.0, 5.0));
    }

    #[test]
    fn configuration_rejects_bad_input() {
        assert!(matches!(
            Configuration::new(vec![Point3::ORIGIN, Point3::ORIGIN]),
            Err(Error::CoincidentPoints(0, 1))
        ));
        assert!(Configuration::new(vec![Point3::ORIGIN]).is_err());
        assert!(Configuration::new(vec![Point3::ORIGIN, Point3::new(f64::NAN, 0.0, 0.0)]).is_err());
        assert!(Configuration::from_json(r#"{"points": [[0,0,0],[1,0,0]], "label": "seg"}"#).is_ok());
        assert!(Configuration::from_json(r#"{"points": [[0,0,0],[1,0]]}"#).is_err());
    }

    #[test]
    fn json_shape() {
        let cfg = Configuration::new(vec![Point3::ORIGIN, Point3::new(1.0, 2.0, 3.0)]).unwrap().with_label("x");
        assert_eq!(cfg.to_json(), r#"{"points":[[0.0,0.0,0.0],[1.0,2.0,3.0]],"label":"x"}"#);
        assert_eq!(Configuration::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn base_frame_places_points() {
        let cfg = Configuration::new(vec![
            Point3::new(0.3, -1.0, 2.0),
            Point3::new(1.1, 0.5, 0.2),
            Point3::new(-0.7, 0.9, 1.4),
            Point3::new(2.0, 2.0, -1.0),
        ])
        .unwrap();
        let f = base_frame(&cfg).unwrap();
        assert!(f.point(0).to_vec().norm() < 1e-15);
        assert!(f.point(1).t.abs() < 1e-14 && f.point(1).v.abs() < 1e-14 && f.point(1).u > 0.0);
        assert!(f.point(2).t.abs() < 1e-14 && f.point(2).v > 0.0);
        for (i, j, r) in cfg.pairs() {
            assert!((f.distance(i, j) - r).abs() < 1e-13);
        }
    }

    #[test]
    fn quaternion_rotation_is_proper() {
        let r = Rotation::from_quaternion(0.3, -0.5, 0.2, 0.9);
        assert!((r.determinant() - 1.0).abs() < 1e-14);
        let x = Vec3::new(1.0, -2.0, 0.5);
        assert!((r.apply(&x).norm() - x.norm()).abs() < 1e-14);
    }
}
