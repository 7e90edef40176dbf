//! Scalar closed forms for three and four points.
//!
//! Point indices on [`Configuration`] are 0-based; vertex labels on
//! [`EdgeLengths4`] are 1-based to match the edge names `r21 ... r43`.
//!
//! Signed projected areas use `A_ijk = Im(z_ij * conj(z_kj)) / 2` with
//! `z_ij = zeta_i - zeta_j`, which is the oriented area of the projected
//! triangle and is antisymmetric in every pair of indices.

use serde::{Deserialize, Serialize};

use crate::determinant::atiyah_det;
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Point3};
use crate::symmetry::{edge_index, VertexPermutation, FACES};

/// Slack for the face and volume realizability tests, relative to the
/// matching power of the mean edge.
pub const REALIZABILITY_TOL: f64 = 1e-12;

/// `(a + b - c)(b + c - a)(c + a - b)`.
pub fn d3(a: f64, b: f64, c: f64) -> f64 {
    (a + b - c) * (b + c - a) * (c + a - b)
}

/// Heron's formula for sixteen times the squared area.
pub fn heron_16a2(a: f64, b: f64, c: f64) -> f64 {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    2.0 * a2 * b2 + 2.0 * a2 * c2 + 2.0 * b2 * c2 - a2 * a2 - b2 * b2 - c2 * c2
}

/// `det M` for three points with side lengths `a, b, c`.
pub fn det_m_n3(a: f64, b: f64, c: f64) -> f64 {
    d3(a, b, c) + 8.0 * a * b * c
}

/// One triangle's side lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FaceTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn d3(&self) -> f64 {
        d3(self.a, self.b, self.c)
    }

    pub fn heron_16a2(&self) -> f64 {
        heron_16a2(self.a, self.b, self.c)
    }

    /// `d3 + 8abc`, the three-point determinant of this face.
    pub fn det_m(&self) -> f64 {
        det_m_n3(self.a, self.b, self.c)
    }
}

/// The six edge lengths of four labelled points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeLengths4 {
    /// `r21, r31, r32, r41, r42, r43`.
    pub r: [f64; 6],
}

impl EdgeLengths4 {
    pub fn new(r21: f64, r31: f64, r32: f64, r41: f64, r42: f64, r43: f64) -> Result<Self> {
        Self::from_array([r21, r31, r32, r41, r42, r43])
    }

    pub fn from_array(r: [f64; 6]) -> Result<Self> {
        if r.iter().any(|x| !x.is_finite() || *x <= 0.0) {
            return Err(Error::InvalidInput(format!("edge lengths must be positive and finite: {r:?}")));
        }
        Ok(Self { r })
    }

    /// Edge lengths among the first four points of a configuration.
    pub fn from_config(cfg: &Configuration) -> Result<Self> {
        if cfg.len() < 4 {
            return Err(Error::InvalidInput("need four points".into()));
        }
        let d = |i: usize, j: usize| cfg.distance(i - 1, j - 1);
        Self::new(d(2, 1), d(3, 1), d(3, 2), d(4, 1), d(4, 2), d(4, 3))
    }

    /// Length between vertices `i` and `j` (1-based, either order).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.r[edge_index(i, j)]
    }

    /// Edge set whose `r_ij` is this set's `r_{π(i)π(j)}`.
    pub fn permuted(&self, perm: &VertexPermutation) -> Self {
        Self { r: perm.edge_map().map(|k| self.r[k]) }
    }

    pub fn product(&self) -> f64 {
        self.r.iter().product()
    }

    pub fn mean(&self) -> f64 {
        self.r.iter().sum::<f64>() / 6.0
    }

    pub fn face(&self, [i, j, k]: [usize; 3]) -> FaceTriple {
        FaceTriple::new(self.get(i, j), self.get(i, k), self.get(j, k))
    }

    pub fn faces(&self) -> [FaceTriple; 4] {
        FACES.map(|f| self.face(f))
    }

    /// Product over the four faces of `d3 + 8abc`.
    pub fn face_product(&self) -> f64 {
        self.faces().iter().map(FaceTriple::det_m).product()
    }

    pub fn cayley_menger_144v2(&self) -> f64 {
        cayley_menger_144v2(self)
    }

    /// Errors unless every face is a (possibly flat) triangle and
    /// `144 V^2` is not negative beyond tolerance.
    pub fn check_realizable(&self) -> Result<()> {
        let s = self.mean();
        for (f, face) in FACES.iter().zip(self.faces()) {
            if face.d3() < -REALIZABILITY_TOL * s.powi(3) {
                return Err(Error::NotRealizable(format!("face {f:?} violates the triangle inequality")));
            }
        }
        let cm = self.cayley_menger_144v2();
        if cm < -REALIZABILITY_TOL * s.powi(6) {
            return Err(Error::NotRealizable(format!("144 V^2 = {cm:e} < 0")));
        }
        Ok(())
    }

    /// Places the points in the four-point frame: vertex 1 at the origin,
    /// vertex 2 on the positive real axis of the complex factor, vertex 3 in
    /// the `t = 0` plane and vertex 4 at height `3V / A`.
    ///
    /// When face 123 is much thinner than the fattest face, that face is
    /// used as the base instead (the determinant ignores labelling). Fully
    /// collinear edge sets are laid out on a line.
    pub fn embed(&self) -> Result<Configuration> {
        self.check_realizable()?;
        let s = self.mean();
        let areas = FACES.map(|f| self.face(f).heron_16a2().max(0.0));
        let (best, &best_area) = areas
            .iter()
            .enumerate()
            .fold((0, &-1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });

        if best_area <= 1e-24 * s.powi(4) {
            return self.embed_on_line();
        }
        let base = if areas[0] >= 0.01 * best_area { FACES[0] } else { FACES[best] };
        let apex = (1..=4).find(|v| !base.contains(v)).expect("a vertex off the base face");
        let [a, b, c] = base;
        let h = self.face(base).heron_16a2().max(0.0);

        let r = |i, j| self.get(i, j);
        let rab = r(a, b);
        let uc = (rab * rab + r(a, c).powi(2) - r(b, c).powi(2)) / (2.0 * rab);
        let vc = h.sqrt() / (2.0 * rab);
        let uq = (rab * rab + r(a, apex).powi(2) - r(b, apex).powi(2)) / (2.0 * rab);
        let vq = (r(a, apex).powi(2) - r(c, apex).powi(2) + uc * uc + vc * vc - 2.0 * uq * uc) / (2.0 * vc);
        let height = (self.cayley_menger_144v2().max(0.0) / h).sqrt();

        let mut pts = [Point3::ORIGIN; 4];
        pts[b - 1] = Point3::new(0.0, rab, 0.0);
        pts[c - 1] = Point3::new(0.0, uc, vc);
        pts[apex - 1] = Point3::new(height, uq, vq);
        Configuration::new(pts.to_vec())
    }

    fn embed_on_line(&self) -> Result<Configuration> {
        let (mut a, mut b, mut len) = (1, 2, 0.0);
        for i in 1..=4 {
            for j in i + 1..=4 {
                if self.get(i, j) > len {
                    (a, b, len) = (i, j, self.get(i, j));
                }
            }
        }
        let pts = (1..=4)
            .map(|k| {
                let x = if k == a {
                    0.0
                } else if k == b {
                    len
                } else {
                    (self.get(a, k).powi(2) - self.get(b, k).powi(2) + len * len) / (2.0 * len)
                };
                Point3::new(0.0, x, 0.0)
            })
            .collect();
        Configuration::new(pts)
    }
}

/// `144 V^2` as a polynomial in the squared edge lengths.
pub fn cayley_menger_144v2(e: &EdgeLengths4) -> f64 {
    // squared lengths, named after their edges
    let [r21, r31, r32, r41, r42, r43] = e.r.map(|x| x * x);
    -r21 * r21 * r43 - r21 * r43 * r43 - r32 * r41 * r41 - r32 * r32 * r41 - r31 * r31 * r42 - r31 * r42 * r42
        + r21 * r43 * r31
        + r21 * r43 * r41
        - r21 * r42 * r41
        + r21 * r42 * r43
        + r21 * r42 * r31
        + r21 * r32 * r43
        - r21 * r32 * r31
        + r32 * r42 * r41
        + r31 * r42 * r41
        + r32 * r43 * r41
        - r32 * r42 * r43
        + r32 * r42 * r31
        + r31 * r42 * r43
        + r32 * r31 * r41
        - r31 * r43 * r41
        + r21 * r32 * r41
}

/// Signed area of the projection of triangle `ijk` onto the complex factor.
pub fn signed_projected_area(cfg: &Configuration, i: usize, j: usize, k: usize) -> f64 {
    let zj = cfg.point(j).zeta();
    ((cfg.point(i).zeta() - zj) * (cfg.point(k).zeta() - zj).conj()).im / 2.0
}

/// `16 A_ijk A_ijl` from squared distances, with `d2(a, b) = r_ab^2`.
pub fn area_quadric_rhs(d2: impl Fn(usize, usize) -> f64, i: usize, j: usize, k: usize, l: usize) -> f64 {
    2.0 * d2(i, j) * (d2(i, k) + d2(i, l) - d2(k, l))
        - (d2(i, j) + d2(i, k) - d2(j, k)) * (d2(i, j) + d2(i, l) - d2(j, l))
}

/// `|16 A_ijk A_ijl - RHS|` for four distinct points.
///
/// All points but at most one must share a common `t`. If one point sits at
/// height `r` above that plane, each squared distance to it is reduced by
/// `r^2` before evaluating the right-hand side.
pub fn area_quadric_check(cfg: &Configuration, [i, j, k, l]: [usize; 4]) -> Result<f64> {
    let idx = [i, j, k, l];
    if idx.iter().any(|&x| x >= cfg.len()) || (0..4).any(|a| (a + 1..4).any(|b| idx[a] == idx[b])) {
        return Err(Error::InvalidInput(format!("need four distinct point indices, got {idx:?}")));
    }
    let (_, off) = plane_and_offset(cfg)?;
    let d2 = |a: usize, b: usize| {
        let mut s = cfg.distance(a, b).powi(2);
        if let Some((m, h)) = off {
            if a == m || b == m {
                s -= h * h;
            }
        }
        s
    };
    let lhs = 16.0 * signed_projected_area(cfg, i, j, k) * signed_projected_area(cfg, i, j, l);
    Ok((lhs - area_quadric_rhs(d2, i, j, k, l)).abs())
}

/// Common `t` of the base plane and the optional off-plane point with its
/// height.
fn plane_and_offset(cfg: &Configuration) -> Result<(f64, Option<(usize, f64)>)> {
    let tol = 1e-12 * cfg.diameter();
    let ts: Vec<f64> = cfg.points().iter().map(|p| p.t).collect();
    for m in std::iter::once(None).chain((0..ts.len()).map(Some)) {
        let mut others = ts.iter().enumerate().filter(|(k, _)| Some(*k) != m).map(|(_, t)| *t);
        let t0 = others.next().expect("at least two points");
        if others.all(|t| (t - t0).abs() <= tol) {
            return Ok((t0, m.map(|m| (m, ts[m] - t0))));
        }
    }
    Err(Error::InvalidInput("more than one point lies off a common t-plane".into()))
}

/// Checks `A_ijk A_lmn = (A_ijk A_ijn)(A_imn A_lmn) / (A_ijn A_imn)` for a
/// configuration lying in a plane `t = const`.
///
/// The two bracketed products share an edge each and are evaluated from
/// distances alone; the denominator and the left side come from
/// coordinates. Returns the absolute residual.
pub fn area_product_reduction_check(cfg: &Configuration, ijk: [usize; 3], lmn: [usize; 3]) -> Result<f64> {
    if cfg.len() < 4 {
        return Err(Error::InvalidInput("need at least four points".into()));
    }
    if let (_, Some(_)) = plane_and_offset(cfg)? {
        return Err(Error::InvalidInput("configuration is not planar".into()));
    }
    if ijk.iter().chain(lmn.iter()).any(|&x| x >= cfg.len()) {
        return Err(Error::InvalidInput("index out of range".into()));
    }
    let [i, j, k] = ijk;
    let [l, m, n] = lmn;
    let area = |a, b, c| signed_projected_area(cfg, a, b, c);
    let tiny = 1e-12 * cfg.diameter().powi(2);
    let a_ijn = area(i, j, n);
    let a_imn = area(i, m, n);
    for (name, val) in [("A_ijn", a_ijn), ("A_imn", a_imn)] {
        if val.abs() <= tiny {
            return Err(Error::DegenerateDenominator(name.into()));
        }
    }
    let d2 = |a: usize, b: usize| cfg.distance(a, b).powi(2);
    // 16 A_ijk A_ijn and 16 A_mni A_mnl = 16 A_imn A_lmn
    let first = area_quadric_rhs(d2, i, j, k, n) / 16.0;
    let second = area_quadric_rhs(d2, m, n, i, l) / 16.0;
    let lhs = area(i, j, k) * area(l, m, n);
    Ok((lhs - first * second / (a_ijn * a_imn)).abs())
}

/// Average of `f` over the 24 relabellings of the vertices.
pub fn av4(e: &EdgeLengths4, f: impl Fn(&EdgeLengths4) -> f64) -> f64 {
    VertexPermutation::all().iter().map(|p| f(&e.permuted(p))).sum::<f64>() / 24.0
}

/// `Re(det M)` for four points as a function of the six edge lengths.
pub fn re_det_m_n4(e: &EdgeLengths4) -> Result<f64> {
    let cm = e.cayley_menger_144v2();
    if cm < -REALIZABILITY_TOL * e.mean().powi(6) {
        return Err(Error::NotRealizable(format!("144 V^2 = {cm:e} < 0")));
    }
    let [r21, r31, r32, r41, r42, r43] = e.r;
    let term = |x: &EdgeLengths4| {
        let [r21, r31, r32, r41, r42, r43] = x.r;
        r41 * ((r42 + r43).powi(2) - r32 * r32) * d3(r21, r31, r32)
    };
    Ok(64.0 * e.product() - 4.0 * d3(r21 * r43, r31 * r42, r32 * r41) + 12.0 * av4(e, term) + 2.0 * cm)
}

/// `|det M|` and the two conjectured gaps for four points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjectureGaps {
    pub abs_det_m: f64,
    /// `|det M| - 64 prod r_ij`.
    pub gap2: f64,
    /// `|det M|^2 - prod_faces (d3 + 8abc)`.
    pub gap3: f64,
}

impl ConjectureGaps {
    pub fn from_abs_det(e: &EdgeLengths4, abs_det_m: f64) -> Self {
        Self {
            abs_det_m,
            gap2: abs_det_m - 64.0 * e.product(),
            gap3: abs_det_m * abs_det_m - e.face_product(),
        }
    }
}

pub fn conjecture_gaps(e: &EdgeLengths4) -> Result<ConjectureGaps> {
    let det = atiyah_det(&e.embed()?)?;
    Ok(ConjectureGaps::from_abs_det(e, det.det_m.norm()))
}

pub fn conjecture2_gap(e: &EdgeLengths4) -> Result<f64> {
    conjecture_gaps(e).map(|g| g.gap2)
}

pub fn conjecture3_gap(e: &EdgeLengths4) -> Result<f64> {
    conjecture_gaps(e).map(|g| g.gap3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular() -> EdgeLengths4 {
        EdgeLengths4::from_array([1.0; 6]).unwrap()
    }

    fn collinear() -> EdgeLengths4 {
        EdgeLengths4::new(1.0, 2.0, 1.0, 3.0, 2.0, 1.0).unwrap()
    }

    fn cfg(points: &[[f64; 3]]) -> Configuration {
        Configuration::new(points.iter().map(|&p| p.into()).collect()).unwrap()
    }

    #[test]
    fn d3_examples() {
        assert_eq!(d3(1.0, 1.0, 1.0), 1.0);
        assert_eq!(d3(1.0, 1.0, 2.0), 0.0);
        assert_eq!(d3(3.0, 4.0, 5.0), 48.0);
        for (a, b, c) in [(0.5, 1.25, 1.5), (2.0, 0.25, 2.125)] {
            let v = d3(a, b, c);
            assert_eq!(v, d3(b, a, c));
            assert_eq!(v, d3(c, b, a));
            assert_eq!(v, d3(a, c, b));
            assert_eq!(v, d3(b, c, a));
            assert_eq!(v, d3(c, a, b));
        }
    }

    #[test]
    fn heron_examples() {
        assert_eq!(heron_16a2(3.0, 4.0, 5.0), 576.0);
        assert_eq!(heron_16a2(1.0, 1.0, 2.0), 0.0);
        assert_eq!(heron_16a2(1.0, 1.0, 1.0), 3.0);
    }

    #[test]
    fn cayley_menger_examples() {
        assert_eq!(regular().cayley_menger_144v2(), 2.0);
        assert_eq!(collinear().cayley_menger_144v2(), 0.0);
    }

    #[test]
    fn cayley_menger_matches_triple_product() {
        let c = cfg(&[[0.1, 0.2, -0.3], [1.0, -0.4, 0.5], [-0.2, 1.3, 0.7], [0.6, 0.6, 1.9]]);
        let p = c.points();
        let vol = (p[1] - p[0]).cross(&(p[2] - p[0])).dot(&(p[3] - p[0])).abs() / 6.0;
        let cm = EdgeLengths4::from_config(&c).unwrap().cayley_menger_144v2();
        assert!((cm - 144.0 * vol * vol).abs() < 1e-12 * cm);
    }

    #[test]
    fn signed_area_examples() {
        let c = cfg(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 2.0, 3.0]]);
        assert_eq!(signed_projected_area(&c, 0, 1, 2), 0.5);
        assert_eq!(signed_projected_area(&c, 1, 0, 2), -0.5);
        assert_eq!(signed_projected_area(&c, 2, 1, 0), -0.5);
    }

    #[test]
    fn quadric_planar_offset_and_collinear() {
        let planar = cfg(&[[0.5, 0.0, 0.0], [0.5, 1.3, 0.2], [0.5, 0.4, 1.1], [0.5, -0.7, 0.9]]);
        let lifted = cfg(&[[0.0, 0.0, 0.0], [0.0, 1.3, 0.2], [0.0, 0.4, 1.1], [0.8, -0.7, 0.9]]);
        let line = cfg(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 2.5, 0.0], [0.0, -1.0, 0.0]]);
        for c in [&planar, &lifted] {
            for idx in [[0, 1, 2, 3], [3, 1, 0, 2], [2, 3, 1, 0]] {
                assert!(area_quadric_check(c, idx).unwrap() < 1e-12);
            }
        }
        assert_eq!(area_quadric_check(&line, [0, 1, 2, 3]).unwrap(), 0.0);
        let tilted = cfg(&[[0.0, 0.0, 0.0], [0.3, 1.3, 0.2], [0.0, 0.4, 1.1], [0.8, -0.7, 0.9]]);
        assert!(area_quadric_check(&tilted, [0, 1, 2, 3]).is_err());
    }

    #[test]
    fn area_product_reduction() {
        let c = cfg(&[[0.0, 0.0, 0.0], [0.0, 1.3, 0.2], [0.0, 0.4, 1.1], [0.0, -0.7, 0.9], [0.0, 2.0, -1.0], [0.0, -1.5, -0.4]]);
        assert!(area_product_reduction_check(&c, [0, 1, 2], [3, 4, 5]).unwrap() < 1e-12);
        assert!(area_product_reduction_check(&c, [0, 1, 2], [0, 1, 2]).unwrap() < 1e-12);
        // A_ijn with n = 2 on the line through 0 and 1
        let d = cfg(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.4, 1.1], [0.0, -0.7, 0.9], [0.0, 2.0, -1.0], [0.0, 3.0, 0.0]]);
        assert!(matches!(
            area_product_reduction_check(&d, [0, 1, 2], [3, 4, 5]),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn av4_examples() {
        let e = EdgeLengths4::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0).unwrap();
        assert!((av4(&e, |x| x.r[0]) - 21.0 / 6.0).abs() < 1e-15);
        let [r21, r31, r32, r41, r42, r43] = e.r;
        let expected = (r21 * r43 + r31 * r42 + r41 * r32) / 3.0;
        assert!((av4(&e, |x| x.r[0] * x.r[5]) - expected).abs() < 1e-13);
        assert!((av4(&e, |x| x.product()) - e.product()).abs() < 1e-10);
    }

    #[test]
    fn re_det_m_examples() {
        assert!((re_det_m_n4(&regular()).unwrap() - 100.0).abs() < 1e-12);
        assert!((re_det_m_n4(&collinear()).unwrap() - 768.0).abs() < 1e-10);
    }

    #[test]
    fn n3_examples() {
        assert_eq!(det_m_n3(1.0, 1.0, 1.0), 9.0);
        assert_eq!(det_m_n3(1.0, 1.0, 2.0), 16.0);
    }

    #[test]
    fn conjecture_gap_examples() {
        let g = conjecture_gaps(&regular()).unwrap();
        assert!((g.gap2 - 36.0).abs() < 1e-10);
        assert!((g.gap3 - 3439.0).abs() < 1e-8);
        let g = conjecture_gaps(&collinear()).unwrap();
        assert!(g.gap2.abs() < 1e-9);
    }

    #[test]
    fn embedding_reproduces_edges() {
        for e in [
            EdgeLengths4::new(1.0, 1.2, 0.9, 1.1, 1.3, 0.8).unwrap(),
            collinear(),
            // face 123 flat, the others not
            EdgeLengths4::new(1.0, 2.0, 1.0, 1.25f64.sqrt(), 1.25f64.sqrt(), 3.25f64.sqrt()).unwrap(),
        ] {
            let c = e.embed().unwrap();
            let back = EdgeLengths4::from_config(&c).unwrap();
            for k in 0..6 {
                assert!((back.r[k] - e.r[k]).abs() < 1e-9, "{e:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn non_realizable_edges_are_rejected() {
        let e = EdgeLengths4::new(1.0, 1.0, 1.0, 1.0, 1.0, 3.0).unwrap();
        assert!(matches!(e.embed(), Err(Error::NotRealizable(_))));
        // faces fine, volume negative: two opposite edges of sqrt(2)+
        let e = EdgeLengths4::new(1.5, 1.0, 1.0, 1.0, 1.0, 1.5).unwrap();
        assert!(matches!(re_det_m_n4(&e), Err(Error::NotRealizable(_))));
    }
}
