//! Binary fixed-point reals and complex numbers over `BigInt`, and a
//! high-precision evaluation of the four-point determinant from rational
//! edge lengths.
//!
//! A [`Fixed`] stores `mantissa * 2^-bits`. Every operation rounds to the
//! nearest representable value, so results carry roughly `bits` correct
//! fractional bits for the moderate magnitudes used here.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::symmetry::{edge_index, FACES};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    mantissa: BigInt,
    bits: u32,
}

fn round_shift(x: BigInt, shift: u32) -> BigInt {
    if shift == 0 {
        return x;
    }
    let half = BigInt::one() << (shift - 1);
    (x + half) >> shift
}

/// `num / den` rounded half up.
fn round_div(num: BigInt, den: &BigInt) -> BigInt {
    let (num, den) = if den.is_negative() { (-num, -den.clone()) } else { (num, den.clone()) };
    let twice: BigInt = &den * 2;
    let shifted: BigInt = num * 2 + &den;
    shifted.div_floor(&twice)
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Self { mantissa: BigInt::zero(), bits }
    }

    pub fn from_rational(q: &BigRational, bits: u32) -> Self {
        Self { mantissa: round_div(q.numer() << bits, q.denom()), bits }
    }

    pub fn from_int(k: i64, bits: u32) -> Self {
        Self { mantissa: BigInt::from(k) << bits, bits }
    }

    /// Exact dyadic value.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), BigInt::one() << self.bits)
    }

    pub fn to_f64(&self) -> f64 {
        let (m, e) = (self.mantissa.clone(), self.bits as i32);
        let len = m.bits() as i32;
        // keep 62 significant bits before converting
        let drop = (len - 62).max(0);
        let top: i64 = (m >> drop as u32).try_into().unwrap_or(i64::MAX);
        top as f64 * 2f64.powi(drop - e)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self { mantissa: self.mantissa.abs(), bits: self.bits }
    }

    pub fn recip(&self) -> Result<Self> {
        Fixed::from_int(1, self.bits).div(self)
    }

    pub fn div(&self, rhs: &Fixed) -> Result<Self> {
        if rhs.mantissa.is_zero() {
            return Err(Error::NumericalBreakdown("division by zero".into()));
        }
        Ok(Self { mantissa: round_div(&self.mantissa << self.bits, &rhs.mantissa), bits: self.bits })
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.mantissa.sign() == Sign::Minus {
            return Err(Error::NumericalBreakdown("square root of a negative number".into()));
        }
        // sqrt(m 2^-b) = sqrt(m 2^b) 2^-b; two guard bits, then round
        let wide: BigInt = &self.mantissa << (self.bits + 4);
        Ok(Self { mantissa: round_shift(wide.sqrt(), 2), bits: self.bits })
    }

    fn check(&self, rhs: &Fixed) {
        assert_eq!(self.bits, rhs.bits, "mixed fixed-point precisions");
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.bits == other.bits).then(|| self.mantissa.cmp(&other.mantissa))
    }
}

impl Add for &Fixed {
    type Output = Fixed;

    fn add(self, rhs: &Fixed) -> Fixed {
        self.check(rhs);
        Fixed { mantissa: &self.mantissa + &rhs.mantissa, bits: self.bits }
    }
}

impl Sub for &Fixed {
    type Output = Fixed;

    fn sub(self, rhs: &Fixed) -> Fixed {
        self.check(rhs);
        Fixed { mantissa: &self.mantissa - &rhs.mantissa, bits: self.bits }
    }
}

impl Mul for &Fixed {
    type Output = Fixed;

    fn mul(self, rhs: &Fixed) -> Fixed {
        self.check(rhs);
        Fixed { mantissa: round_shift(&self.mantissa * &rhs.mantissa, self.bits), bits: self.bits }
    }
}

impl Neg for &Fixed {
    type Output = Fixed;

    fn neg(self) -> Fixed {
        Fixed { mantissa: -&self.mantissa, bits: self.bits }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedComplex {
    pub re: Fixed,
    pub im: Fixed,
}

impl FixedComplex {
    pub fn new(re: Fixed, im: Fixed) -> Self {
        Self { re, im }
    }

    pub fn real(re: Fixed) -> Self {
        let bits = re.bits;
        Self { re, im: Fixed::zero(bits) }
    }

    pub fn zero(bits: u32) -> Self {
        Self::real(Fixed::zero(bits))
    }

    pub fn one(bits: u32) -> Self {
        Self::real(Fixed::from_int(1, bits))
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Fixed {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, k: &Fixed) -> Self {
        Self { re: &self.re * k, im: &self.im * k }
    }

    pub fn div(&self, rhs: &FixedComplex) -> Result<Self> {
        let inv = rhs.norm_sqr().recip()?;
        Ok((self * &rhs.conj()).scale(&inv))
    }
}

impl Add for &FixedComplex {
    type Output = FixedComplex;

    fn add(self, rhs: &FixedComplex) -> FixedComplex {
        FixedComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &FixedComplex {
    type Output = FixedComplex;

    fn sub(self, rhs: &FixedComplex) -> FixedComplex {
        FixedComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &FixedComplex {
    type Output = FixedComplex;

    fn mul(self, rhs: &FixedComplex) -> FixedComplex {
        FixedComplex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl Neg for &FixedComplex {
    type Output = FixedComplex;

    fn neg(self) -> FixedComplex {
        FixedComplex { re: -&self.re, im: -&self.im }
    }
}

/// A point `(t, zeta)` in fixed point.
#[derive(Debug, Clone)]
struct FixedPoint {
    t: Fixed,
    zeta: FixedComplex,
}

/// Same chart rule as [`crate::geometry::lift`], in fixed point.
fn lift(t: &Fixed, zeta: &FixedComplex) -> Result<(FixedComplex, FixedComplex)> {
    let r = (&(t * t) + &zeta.norm_sqr()).sqrt()?;
    if r.is_zero() {
        return Err(Error::ZeroVector);
    }
    if t.mantissa.sign() != Sign::Minus {
        let s = (&r + t).sqrt()?;
        let inv = s.recip()?;
        Ok((FixedComplex::real(s), zeta.conj().scale(&inv)))
    } else {
        let s = (&r - t).sqrt()?;
        let inv = s.recip()?;
        Ok((zeta.scale(&inv), FixedComplex::real(s)))
    }
}

fn antipode((w1, w2): &(FixedComplex, FixedComplex)) -> (FixedComplex, FixedComplex) {
    (-&w2.conj(), w1.conj())
}

fn determinant(mut a: Vec<Vec<FixedComplex>>) -> Result<FixedComplex> {
    let n = a.len();
    let bits = a[0][0].re.bits;
    let mut det = FixedComplex::one(bits);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&x, &y| a[x][col].norm_sqr().partial_cmp(&a[y][col].norm_sqr()).unwrap())
            .expect("non-empty range");
        if a[pivot_row][col].is_zero() {
            return Err(Error::NumericalBreakdown(format!("zero pivot in column {col}")));
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -&det;
        }
        let pivot = a[col][col].clone();
        det = &det * &pivot;
        for r in col + 1..n {
            let factor = a[r][col].div(&pivot)?;
            for c in col + 1..n {
                let sub = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &sub;
            }
        }
    }
    Ok(det)
}

/// Places four points from rational edge lengths in the frame with
/// vertex 1 at the origin, vertex 2 on the real axis, vertex 3 in `t = 0`
/// and vertex 4 above it. Requires a non-degenerate face 123.
fn embed(edges: &[BigRational; 6], bits: u32) -> Result<[FixedPoint; 4]> {
    let sq: Vec<BigRational> = edges.iter().map(|r| r * r).collect();
    let d2 = |i: usize, j: usize| &sq[edge_index(i, j)];
    let two = BigRational::from_integer(2.into());
    let r21 = &edges[0];
    // exact rationals where possible
    let u3 = (d2(2, 1) + d2(3, 1) - d2(3, 2)) / (&two * r21);
    let v3_sq = d2(3, 1) - &u3 * &u3;
    let u4 = (d2(2, 1) + d2(4, 1) - d2(4, 2)) / (&two * r21);
    if !v3_sq.is_positive() {
        return Err(Error::NotRealizable("face 123 is flat".into()));
    }
    let fx = |q: &BigRational| Fixed::from_rational(q, bits);
    let v3 = fx(&v3_sq).sqrt()?;
    // v4 = (r41^2 - r43^2 + r31^2 - 2 u4 u3) / (2 v3), since u3^2 + v3^2 = r31^2
    let v4_num = d2(4, 1) - d2(4, 3) + d2(3, 1) - &two * &u4 * &u3;
    let v4 = fx(&(v4_num / &two)).div(&v3)?;
    let h2 = &(&fx(&(d2(4, 1) - &u4 * &u4)) - &(&v4 * &v4));
    if h2.mantissa.sign() == Sign::Minus {
        return Err(Error::NotRealizable("negative squared height".into()));
    }
    let zero = Fixed::zero(bits);
    Ok([
        FixedPoint { t: zero.clone(), zeta: FixedComplex::zero(bits) },
        FixedPoint { t: zero.clone(), zeta: FixedComplex::real(fx(r21)) },
        FixedPoint { t: zero, zeta: FixedComplex::new(fx(&u3), v3) },
        FixedPoint { t: h2.sqrt()?, zeta: FixedComplex::new(fx(&u4), v4) },
    ])
}

/// `det M` of four points given by rational edge lengths, evaluated with
/// `bits` fractional bits (plus internal guard bits).
pub fn det_m_from_edges(edges: &[BigRational; 6], bits: u32) -> Result<FixedComplex> {
    let work = bits + 64;
    let pts = embed(edges, work)?;
    let n = pts.len();
    let mut views: Vec<Vec<(FixedComplex, FixedComplex)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let t = &pts[j].t - &pts[i].t;
            let zeta = &pts[j].zeta - &pts[i].zeta;
            let w = lift(&t, &zeta)?;
            views[j].push(antipode(&w));
            views[i].push(w);
        }
    }
    let columns: Vec<Vec<FixedComplex>> = views
        .iter()
        .map(|spinors| {
            let mut col = vec![FixedComplex::one(work)];
            for (w1, w2) in spinors {
                col.push(FixedComplex::zero(work));
                for k in (0..col.len()).rev() {
                    let below = if k > 0 { &col[k - 1] * w2 } else { FixedComplex::zero(work) };
                    col[k] = &(&col[k] * w1) + &below;
                }
            }
            col
        })
        .collect();
    // row-major copy of the column-built matrix
    let rows = (0..n).map(|r| (0..n).map(|c| columns[c][r].clone()).collect()).collect();
    let det = determinant(rows)?;
    let round = |x: &Fixed| Fixed { mantissa: round_shift(x.mantissa.clone(), work - bits), bits };
    Ok(FixedComplex::new(round(&det.re), round(&det.im)))
}

/// `|det M|^2` as an exact dyadic rational at `bits` fractional bits.
pub fn abs_det_m_sqr_from_edges(edges: &[BigRational; 6], bits: u32) -> Result<BigRational> {
    Ok(det_m_from_edges(edges, bits)?.norm_sqr().to_rational())
}

/// `Re(det M)` as an exact dyadic rational at `bits` fractional bits.
pub fn re_det_m_from_edges(edges: &[BigRational; 6], bits: u32) -> Result<BigRational> {
    Ok(det_m_from_edges(edges, bits)?.re.to_rational())
}

/// Exact check that every face is a proper triangle and `144 V^2 > 0`.
pub fn is_strictly_realizable(edges: &[BigRational; 6]) -> bool {
    let r = |i: usize, j: usize| &edges[edge_index(i, j)];
    let faces_ok = FACES.iter().all(|&[i, j, k]| {
        let (a, b, c) = (r(i, j), r(i, k), r(j, k));
        (a + b - c).is_positive() && (b + c - a).is_positive() && (c + a - b).is_positive()
    });
    faces_ok && crate::sympoly::cm_poly_144v2().eval_exact(edges).is_positive()
}

/// Edges as `f64`, in storage order.
pub fn edges_to_f64(edges: &[BigRational; 6]) -> [f64; 6] {
    use num_traits::ToPrimitive;
    std::array::from_fn(|k| edges[k].to_f64().expect("finite edge"))
}
