//! The Atiyah matrix and its determinant.
//!
//! Column `i` holds the coefficients of the symmetric product of the spinors
//! point `i` sees. Entry `k` of a column is the sum over `k`-subsets `S` of
//! the spinors of `prod_{S} w2 * prod_{not S} w1`, so row 0 is the product of
//! all `w1` components and row `n - 1` the product of all `w2` components.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{antipode, lift, Configuration, Spinor, Vec3};

/// Symmetric product of a list of spinors, read as the coefficients of
/// `prod_j (w1_j + w2_j x)` in increasing powers of `x`.
pub fn mixed_column(spinors: &[Spinor]) -> Vec<Complex64> {
    let mut col = Vec::with_capacity(spinors.len() + 1);
    col.push(Complex64::new(1.0, 0.0));
    for s in spinors {
        col.push(Complex64::new(0.0, 0.0));
        for k in (0..col.len()).rev() {
            let below = if k > 0 { col[k - 1] * s.w2 } else { Complex64::new(0.0, 0.0) };
            col[k] = col[k] * s.w1 + below;
        }
    }
    col
}

/// Which end of a pair gets the plain lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairConvention {
    /// The earlier point lifts `p_j - p_i`; the later point takes the antipode.
    #[default]
    EarlierLifts,
    /// The later point lifts `p_i - p_j`; the earlier point takes the antipode.
    /// Since `σ(σ(w)) = -w`, each pair contributes a sign and the determinant
    /// changes by [`PairConvention::swap_sign`].
    LaterLifts,
}

impl PairConvention {
    /// `(-1)^(n(n-1)/2)`: the ratio of the two conventions' determinants.
    pub fn swap_sign(n: usize) -> f64 {
        if (n * n.saturating_sub(1) / 2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtiyahMatrix {
    n: usize,
    /// Column-major.
    entries: Vec<Complex64>,
}

impl AtiyahMatrix {
    pub fn from_columns(columns: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = columns.len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        Ok(Self { n, entries: columns.into_iter().flatten().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[col * self.n + row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.entries[col * self.n..(col + 1) * self.n]
    }

    pub fn determinant(&self) -> Result<Complex64> {
        lu_determinant(self.n, |r, c| self.get(r, c))
    }
}

/// Builds the matrix with the default pairing convention.
pub fn atiyah_matrix(cfg: &Configuration) -> Result<AtiyahMatrix> {
    atiyah_matrix_with(cfg, PairConvention::EarlierLifts, |_, _, v| lift(v))
}

/// Builds the matrix with an explicit convention and per-pair lift.
///
/// `pair_lift(i, j, v)` is called once per unordered pair `i < j` with the
/// vector the lifting end looks along, and must return a spinor whose Hopf
/// image is `v`. The opposite end receives its antipode.
pub fn atiyah_matrix_with<F>(cfg: &Configuration, convention: PairConvention, pair_lift: F) -> Result<AtiyahMatrix>
where
    F: Fn(usize, usize, &Vec3) -> Result<Spinor>,
{
    let n = cfg.len();
    let mut views: Vec<Vec<Spinor>> = vec![Vec::with_capacity(n - 1); n];
    for i in 0..n {
        for j in i + 1..n {
            let (lifter, other) = match convention {
                PairConvention::EarlierLifts => (i, j),
                PairConvention::LaterLifts => (j, i),
            };
            let d = cfg.point(other) - cfg.point(lifter);
            if d.norm() == 0.0 {
                return Err(Error::CoincidentPoints(i, j));
            }
            let w = pair_lift(i, j, &d)?;
            views[lifter].push(w);
            views[other].push(antipode(&w));
        }
    }
    let columns = views.iter().map(|v| mixed_column(v)).collect();
    AtiyahMatrix::from_columns(columns)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetResult {
    pub det_m: Complex64,
    /// Scale-free normalisation `det_m / prod_{i<j} 2 r_ij`.
    pub d: Complex64,
    pub edge_product: f64,
    pub n: usize,
}

/// `det M` by complex LU and the scale-free `D`.
pub fn atiyah_det(cfg: &Configuration) -> Result<DetResult> {
    let n = cfg.len();
    let scale = cfg.diameter();
    let pairs = n * (n - 1) / 2;
    let mut relative_product = 1.0;
    let mut edge_product = 1.0;
    for (_, _, r) in cfg.pairs() {
        relative_product *= r / scale;
        edge_product *= 2.0 * r;
    }
    if !(relative_product >= 1e-300) {
        return Err(Error::NumericalBreakdown(format!(
            "edge product {relative_product:e} * diameter^{pairs} is below the conditioning guard"
        )));
    }
    let det_m = atiyah_matrix(cfg)?.determinant()?;
    Ok(DetResult { det_m, d: det_m / edge_product, edge_product, n })
}

/// Determinant of an `n x n` complex matrix by LU with partial pivoting.
pub fn lu_determinant(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> Result<Complex64> {
    let mut a: Vec<Complex64> = (0..n * n).map(|k| entry(k / n, k % n)).collect();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_mag >= f64::MIN_POSITIVE) || !pivot_mag.is_finite() {
            return Err(Error::NumericalBreakdown(format!("pivot {pivot_mag:e} in column {col}")));
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(pivot_row * n + c, col * n + c);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det *= pivot;
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col + 1..n {
                let sub = factor * a[col * n + c];
                a[r * n + c] -= sub;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Leibniz expansion; independent of the LU path.
    fn leibniz(m: &AtiyahMatrix) -> Complex64 {
        fn perms(n: usize) -> Vec<(Vec<usize>, f64)> {
            if n == 1 {
                return vec![(vec![0], 1.0)];
            }
            let mut out = Vec::new();
            for (p, s) in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    // inserting at pos moves n-1 past (n-1-pos) elements
                    let sign = if (n - 1 - pos).is_multiple_of(2) { s } else { -s };
                    out.push((q, sign));
                }
            }
            out
        }
        perms(m.n())
            .into_iter()
            .map(|(p, s)| p.iter().enumerate().fold(c(s, 0.0), |acc, (col, &row)| acc * m.get(row, col)))
            .sum()
    }

    /// Coefficients of prod (w1 + w2 x) by repeated dense polynomial
    /// multiplication.
    fn poly_product(spinors: &[Spinor]) -> Vec<Complex64> {
        spinors.iter().fold(vec![c(1.0, 0.0)], |acc, s| {
            let mut out = vec![c(0.0, 0.0); acc.len() + 1];
            for (k, a) in acc.iter().enumerate() {
                out[k] += a * s.w1;
                out[k + 1] += a * s.w2;
            }
            out
        })
    }

    #[test]
    fn mixed_column_examples() {
        let e = Spinor::from_real(1.0, 0.0);
        assert_eq!(mixed_column(&[e, e, e]), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let col = mixed_column(&[Spinor::from_real(1.0, 2.0), Spinor::from_real(3.0, 4.0)]);
        assert_eq!(col, vec![c(3.0, 0.0), c(10.0, 0.0), c(8.0, 0.0)]);
    }

    #[test]
    fn mixed_column_matches_polynomial_product() {
        let sp = [
            Spinor::new(c(0.3, 1.0), c(-2.0, 0.5)),
            Spinor::new(c(1.5, -0.2), c(0.1, 0.1)),
            Spinor::new(c(-0.7, 0.0), c(0.0, 2.2)),
            Spinor::new(c(0.9, 0.4), c(1.1, -1.3)),
        ];
        for (a, b) in mixed_column(&sp).iter().zip(poly_product(&sp)) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    /// Point 1 of the four-point frame reproduces the first displayed column
    /// (before its 1 / sqrt(r21 r31 R41) prefactor).
    #[test]
    fn column_of_point_one_in_frame() {
        let z = [c(0.4, 0.1), c(1.3, -0.2), c(0.5, 0.9), c(0.0, 0.0)];
        let height = 0.8;
        let cfg = Configuration::new(vec![
            Point3::new(0.0, z[0].re, z[0].im),
            Point3::new(0.0, z[1].re, z[1].im),
            Point3::new(0.0, z[2].re, z[2].im),
            Point3::new(height, 0.0, 0.0),
        ])
        .unwrap();
        let m = atiyah_matrix(&cfg).unwrap();
        let zij = |i: usize, j: usize| z[i - 1] - z[j - 1];
        let r = |i: usize, j: usize| cfg.distance(i - 1, j - 1);
        let (r21, r31) = (r(2, 1), r(3, 1));
        let big_r41 = r(4, 1) + height;
        let (z21, z31, z41) = (zij(2, 1).conj(), zij(3, 1).conj(), zij(4, 1).conj());
        let expected = [
            c(r21 * r31 * big_r41, 0.0),
            z41 * r21 * r31 + z31 * r21 * big_r41 + z21 * r31 * big_r41,
            z31 * z41 * r21 + z21 * z41 * r31 + z21 * z31 * big_r41,
            z21 * z31 * z41,
        ];
        let pref = 1.0 / (r21 * r31 * big_r41).sqrt();
        for k in 0..4 {
            assert!((m.get(k, 0) - expected[k] * pref).norm() < 1e-13, "row {k}");
        }
    }

    #[test]
    fn two_points() {
        let cfg = Configuration::new(vec![Point3::ORIGIN, Point3::new(0.0, 1.0, 0.0)]).unwrap();
        let m = atiyah_matrix(&cfg).unwrap();
        assert_eq!(m.column(0), &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(m.column(1), &[c(-1.0, 0.0), c(1.0, 0.0)]);
        let det = atiyah_det(&cfg).unwrap();
        assert!((det.det_m - c(2.0, 0.0)).norm() < 1e-15);
        assert!((det.d - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn equilateral_triangle_and_regular_tetrahedron() {
        let h = 3f64.sqrt() / 2.0;
        let tri = Configuration::new(vec![Point3::ORIGIN, Point3::new(0.0, 1.0, 0.0), Point3::new(0.0, 0.5, h)])
            .unwrap();
        let det = atiyah_det(&tri).unwrap().det_m;
        assert!((det - c(9.0, 0.0)).norm() < 1e-12);

        let tet = Configuration::new(vec![
            Point3::ORIGIN,
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.5, h),
            Point3::new((2.0f64 / 3.0).sqrt(), 0.5, h / 3.0),
        ])
        .unwrap();
        let det = atiyah_det(&tet).unwrap();
        assert!((det.det_m.re - 100.0).abs() < 1e-11);
        assert!(det.det_m.im.abs() < 1e-11);
        assert!((det.d.re - 1.5625).abs() < 1e-13);
    }

    #[test]
    fn collinear_four_points() {
        let cfg = Configuration::new((0..4).map(|k| Point3::new(0.0, k as f64, 0.0)).collect()).unwrap();
        let det = atiyah_det(&cfg).unwrap();
        assert!((det.det_m - c(768.0, 0.0)).norm() < 1e-10);
        assert!((det.d - c(1.0, 0.0)).norm() < 1e-13);
        assert!((det.det_m - det.d * det.edge_product).norm() <= 1e-12 * det.det_m.norm());
    }

    #[test]
    fn lu_matches_leibniz() {
        let cfg = Configuration::new(vec![
            Point3::new(0.2, -0.3, 1.0),
            Point3::new(1.0, 0.4, -0.5),
            Point3::new(-0.6, 1.2, 0.3),
            Point3::new(0.1, 0.1, 0.1),
            Point3::new(-1.0, -0.8, 0.6),
        ])
        .unwrap();
        let m = atiyah_matrix(&cfg).unwrap();
        let lu = m.determinant().unwrap();
        let lz = leibniz(&m);
        assert!((lu - lz).norm() < 1e-12 * lz.norm());
    }

    #[test]
    fn convention_and_phase_do_not_matter() {
        let cfg = Configuration::new(vec![
            Point3::new(0.2, -0.3, 1.0),
            Point3::new(1.0, 0.4, -0.5),
            Point3::new(-0.6, 1.2, 0.3),
            Point3::new(-1.0, -0.8, 0.6),
        ])
        .unwrap();
        let base = atiyah_matrix(&cfg).unwrap().determinant().unwrap();
        let swapped = atiyah_matrix_with(&cfg, PairConvention::LaterLifts, |_, _, v| lift(v))
            .unwrap()
            .determinant()
            .unwrap();
        let phased = atiyah_matrix_with(&cfg, PairConvention::EarlierLifts, |i, j, v| {
            Ok(lift(v)? * Complex64::from_polar(1.0, 0.37 * (i + 3 * j) as f64))
        })
        .unwrap()
        .determinant()
        .unwrap();
        assert!((base - swapped).norm() < 1e-12 * base.norm());
        assert!((base - phased).norm() < 1e-12 * base.norm());
    }

    #[test]
    fn convention_swap_sign_by_pair_count() {
        for n in 2..=6 {
            let cfg = Configuration::new(
                (0..n).map(|k| Point3::new((k as f64).sin(), (1.7 * k as f64).cos(), 0.3 * k as f64)).collect(),
            )
            .unwrap();
            let base = atiyah_matrix(&cfg).unwrap().determinant().unwrap();
            let swapped = atiyah_matrix_with(&cfg, PairConvention::LaterLifts, |_, _, v| lift(v))
                .unwrap()
                .determinant()
                .unwrap();
            let sign = PairConvention::swap_sign(n);
            assert_eq!(sign, [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0][n]);
            assert!((swapped - base * sign).norm() < 1e-12 * base.norm(), "n = {n}");
        }
    }

    #[test]
    fn singular_matrix_breaks_down() {
        let err = lu_determinant(2, |_, _| c(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NumericalBreakdown(_)));
    }

    #[test]
    fn conditioning_guard() {
        let cfg = Configuration::new(vec![
            Point3::ORIGIN,
            Point3::new(0.0, 1e-170, 0.0),
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(0.0, 2e-170, 1.0),
        ])
        .unwrap();
        assert!(matches!(atiyah_det(&cfg), Err(Error::NumericalBreakdown(_))));
    }
}
