//! Exact sparse polynomials in the six edge lengths of a tetrahedron.
//!
//! Coefficients are arbitrary-precision rationals and zero coefficients are
//! never stored, so equal polynomials have identical term maps.
//!
//! The text format is one term per line, `coeff e21 e31 e32 e41 e42 e43`,
//! in decreasing graded-lexicographic order. Coefficients are written as
//! `p` or `p/q`.

mod formulas;
pub mod interpolate;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use self::formulas::{cm_poly_144v2, d3_poly, expand_re_det_m, re_det_m_without_volume};
pub use crate::symmetry::VertexPermutation;
use crate::error::{Error, Result};
use crate::symmetry::EDGE_NAMES;

/// Exponents of `r21, r31, r32, r41, r42, r43`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub [u32; 6]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 6]);

    pub fn var(k: usize) -> Self {
        let mut e = [0; 6];
        e[k] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        Monomial(e)
    }

    /// Exponent vector after sending variable slot `k` to `map[k]`.
    pub fn relabel(&self, map: &[usize; 6]) -> Monomial {
        let mut e = [0; 6];
        for (k, &x) in self.0.iter().enumerate() {
            e[map[k]] += x;
        }
        Monomial(e)
    }

    pub fn eval_f64(&self, x: &[f64; 6]) -> f64 {
        self.0.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product()
    }
}

/// Graded lexicographic: total degree first, then exponents of `r21`,
/// `r31`, ... in turn.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgePoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl EdgePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_terms([(Monomial::ONE, c)])
    }

    pub fn integer(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    /// The edge variable in slot `k` (`0 = r21`, ..., `5 = r43`).
    pub fn var(k: usize) -> Self {
        Self::from_terms([(Monomial::var(k), BigRational::one())])
    }

    /// The six edge variables in storage order.
    pub fn vars() -> [EdgePoly; 6] {
        std::array::from_fn(Self::var)
    }

    /// Sums repeated monomials and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Terms in decreasing graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::integer(1), |acc, _| &acc * self)
    }

    pub fn eval_f64(&self, x: &[f64; 6]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64().expect("finite coefficient") * m.eval_f64(x))
            .sum()
    }

    pub fn eval_exact(&self, x: &[BigRational; 6]) -> BigRational {
        let max_exp = self.terms.keys().flat_map(|m| m.0).max().unwrap_or(0) as usize;
        // powers[k][e] = x_k^e
        let powers: Vec<Vec<BigRational>> = x
            .iter()
            .map(|v| {
                let mut p = vec![BigRational::one()];
                for e in 1..=max_exp {
                    let next = &p[e - 1] * v;
                    p.push(next);
                }
                p
            })
            .collect();
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[k][e as usize];
                }
            }
            total += t;
        }
        total
    }

    /// Substitutes `r_ij -> r_{π(i)π(j)}`.
    pub fn apply_permutation(&self, perm: &VertexPermutation) -> Self {
        let map = perm.edge_map();
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.relabel(&map), c.clone())))
    }

    /// Average over the 24 vertex relabellings.
    pub fn sym_av(&self) -> Self {
        let mut acc = Self::zero();
        for p in VertexPermutation::all() {
            acc = &acc + &self.apply_permutation(&p);
        }
        acc.scale(&BigRational::new(1.into(), 24.into()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (m, c) in self.terms() {
            let e = m.0;
            out.push_str(&format!("{} {} {} {} {} {} {}\n", c, e[0], e[1], e[2], e[3], e[4], e[5]));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut p = Self::zero();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: n + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 7 {
                return Err(err(format!("expected 7 fields, found {}", fields.len())));
            }
            let coeff = parse_rational(fields[0]).ok_or_else(|| err(format!("bad coefficient {:?}", fields[0])))?;
            let mut e = [0u32; 6];
            for (slot, f) in e.iter_mut().zip(&fields[1..]) {
                *slot = f.parse().map_err(|_| err(format!("bad exponent {f:?}")))?;
            }
            let m = Monomial(e);
            if p.terms.contains_key(&m) {
                return Err(err("repeated monomial".into()));
            }
            p.add_term(m, coeff);
        }
        Ok(p)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for EdgePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.degree() == 0 {
                factors.push(a.to_string());
            }
            for (k, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(EDGE_NAMES[k].to_string()),
                    _ => factors.push(format!("{}^{}", EDGE_NAMES[k], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &EdgePoly {
    type Output = EdgePoly;

    fn add(self, rhs: &EdgePoly) -> EdgePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &EdgePoly {
    type Output = EdgePoly;

    fn sub(self, rhs: &EdgePoly) -> EdgePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &EdgePoly {
    type Output = EdgePoly;

    fn neg(self) -> EdgePoly {
        EdgePoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

impl Mul for &EdgePoly {
    type Output = EdgePoly;

    fn mul(self, rhs: &EdgePoly) -> EdgePoly {
        let mut out = EdgePoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for EdgePoly {
            type Output = EdgePoly;

            fn $f(self, rhs: EdgePoly) -> EdgePoly {
                (&self).$f(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for EdgePoly {
    type Output = EdgePoly;

    fn neg(self) -> EdgePoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn difference_of_squares() {
        let [r21, r31, ..] = EdgePoly::vars();
        let p = &(&r21 + &r31) * &(&r21 - &r31);
        let expected = &r21.pow(2) - &r31.pow(2);
        assert_eq!(p, expected);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn p_minus_p_is_empty() {
        let [a, b, c, ..] = EdgePoly::vars();
        let p = &(&a * &b) + &c.scale(&q(3, 7));
        assert!((&p + &(-&p)).is_zero());
    }

    #[test]
    fn d3_has_ten_terms() {
        let [a, b, c, ..] = EdgePoly::vars();
        let p = d3_poly(&a, &b, &c);
        assert_eq!(p.len(), 10);
        assert!(p.is_homogeneous(3));
        assert_eq!(p.coefficient(&Monomial([3, 0, 0, 0, 0, 0])), q(-1, 1));
        assert_eq!(p.coefficient(&Monomial([1, 1, 1, 0, 0, 0])), q(-2, 1));
        assert_eq!(p.coefficient(&Monomial([2, 1, 0, 0, 0, 0])), q(1, 1));
    }

    #[test]
    fn permutation_action() {
        let [r21, r31, r32, r41, r42, r43] = EdgePoly::vars();
        let swap12 = VertexPermutation::new([2, 1, 3, 4]).unwrap();
        assert_eq!(r21.apply_permutation(&swap12), r21);
        assert_eq!(r31.apply_permutation(&swap12), r32);
        assert_eq!(r32.apply_permutation(&swap12), r31);
        assert_eq!(r41.apply_permutation(&swap12), r42);
        assert_eq!(r42.apply_permutation(&swap12), r41);
        assert_eq!(r43.apply_permutation(&swap12), r43);

        let prod = EdgePoly::vars().iter().fold(EdgePoly::integer(1), |acc, v| &acc * v);
        for p in VertexPermutation::all() {
            assert_eq!(prod.apply_permutation(&p), prod);
        }
        let p = &r31.pow(2) + &(&r42 * &r21);
        assert_eq!(p.apply_permutation(&VertexPermutation::IDENTITY), p);
    }

    #[test]
    fn sym_av_examples() {
        let [r21, r31, r32, r41, r42, r43] = EdgePoly::vars();
        let all = [&r21, &r31, &r32, &r41, &r42, &r43].into_iter().fold(EdgePoly::zero(), |acc, v| &acc + v);
        assert_eq!(r21.sym_av(), all.scale(&q(1, 6)));
        let pairs = &(&(&r21 * &r43) + &(&r31 * &r42)) + &(&r41 * &r32);
        assert_eq!((&r21 * &r43).sym_av(), pairs.scale(&q(1, 3)));
        assert_eq!(pairs.sym_av(), pairs);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let [a, b, ..] = EdgePoly::vars();
        let p = &(&a.pow(3) * &b).scale(&q(-5, 3)) + &EdgePoly::integer(7);
        let text = p.to_text();
        assert_eq!(text, "-5/3 3 1 0 0 0 0\n7 0 0 0 0 0 0\n");
        assert_eq!(EdgePoly::from_text(&text).unwrap(), p);
        assert!(matches!(EdgePoly::from_text("1 2 3"), Err(Error::Parse { line: 1, .. })));
        assert!(EdgePoly::from_text("1/0 0 0 0 0 0 0").is_err());
        assert!(EdgePoly::from_text("1 0 0 0 0 0 1\n2 0 0 0 0 0 1").is_err());
    }

    #[test]
    fn display_is_readable() {
        let [a, b, ..] = EdgePoly::vars();
        let p = &(&a.pow(2) * &b).scale(&q(-2, 1)) + &b;
        assert_eq!(p.to_string(), "-2*r21^2*r31 + r31");
    }

    #[test]
    fn graded_lex_order() {
        assert!(Monomial([0, 0, 0, 0, 0, 2]) > Monomial([1, 0, 0, 0, 0, 0]));
        assert!(Monomial([1, 0, 0, 0, 0, 1]) > Monomial([0, 1, 1, 0, 0, 0]));
    }
}
