//! Recovery of homogeneous edge polynomials from sampled values.
//!
//! A homogeneous polynomial of degree `d` in the six edges is fixed by its
//! dehomogenisation `q(x) = p(1, x_1, ..., x_5)` with `x_k = r_k / r21`,
//! a polynomial of total degree at most `d` in five variables. Sampling `q`
//! on the simplex lattice `x = 1 + step * a`, `a ∈ N^5`, `|a| <= d`, is
//! unisolvent: the multivariate forward differences at the origin are the
//! coefficients of `q` in the basis `prod_k binom(a_k, j_k)`. Those are
//! converted to monomials one axis at a time and rehomogenised.
//!
//! All of this is exact rational arithmetic. Samples from a fixed-point
//! evaluation are exact dyadic rationals, so the only inexact step is the
//! final rounding of coefficients to small-denominator rationals. With a
//! dyadic step and integer coefficients the samples themselves are dyadic
//! with few fractional bits, and a fixed-point evaluation accurate to its
//! last bit reproduces them exactly.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{EdgePoly, Monomial};
use crate::error::{Error, Result};
use crate::precise;

type Index = [u32; 5];

/// The sample points `(1, 1 + step a_1, ..., 1 + step a_5)`.
#[derive(Debug, Clone)]
pub struct SimplexLattice {
    degree: u32,
    step: BigRational,
    indices: Vec<Index>,
}

impl SimplexLattice {
    pub fn new(degree: u32, step: BigRational) -> Self {
        let mut indices = Vec::new();
        let mut a = [0u32; 5];
        fn rec(k: usize, left: u32, a: &mut Index, out: &mut Vec<Index>) {
            if k == 5 {
                out.push(*a);
                return;
            }
            for e in 0..=left {
                a[k] = e;
                rec(k + 1, left - e, a, out);
            }
            a[k] = 0;
        }
        rec(0, degree, &mut a, &mut indices);
        Self { degree, step, indices }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Index] {
        &self.indices
    }

    pub fn edges(&self, a: &Index) -> [BigRational; 6] {
        std::array::from_fn(|k| {
            if k == 0 {
                BigRational::one()
            } else {
                BigRational::one() + &self.step * BigRational::from_integer(a[k - 1].into())
            }
        })
    }

    /// Evaluates `f` at every lattice point, in index order.
    pub fn sample<F>(&self, f: F) -> Result<Vec<BigRational>>
    where
        F: Fn(&[BigRational; 6]) -> Result<BigRational> + Sync,
    {
        self.indices.par_iter().map(|a| f(&self.edges(a))).collect()
    }

    /// The unique homogeneous polynomial of this degree through the
    /// samples (given in index order).
    pub fn interpolate(&self, values: &[BigRational]) -> Result<EdgePoly> {
        if values.len() != self.indices.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                self.indices.len(),
                values.len()
            )));
        }
        let pos: HashMap<Index, usize> = self.indices.iter().enumerate().map(|(k, a)| (*a, k)).collect();
        let mut c = values.to_vec();

        // forward differences, one axis at a time
        for axis in 0..5 {
            let mut order: Vec<usize> = (0..self.indices.len()).collect();
            order.sort_by_key(|&k| std::cmp::Reverse(self.indices[k][axis]));
            for level in 1..=self.degree {
                for &k in &order {
                    let a = self.indices[k];
                    if a[axis] < level {
                        continue;
                    }
                    let mut b = a;
                    b[axis] -= 1;
                    let prev = c[pos[&b]].clone();
                    c[k] -= prev;
                }
            }
        }

        // binomial basis -> monomials in x, axis by axis
        let basis = binomial_to_monomial(self.degree, &self.step);
        let mut coeffs: HashMap<Index, BigRational> =
            self.indices.iter().zip(c).filter(|(_, v)| !v.is_zero()).map(|(a, v)| (*a, v)).collect();
        for axis in 0..5 {
            let mut next: HashMap<Index, BigRational> = HashMap::with_capacity(coeffs.len());
            for (a, v) in &coeffs {
                for (m, t) in basis[a[axis] as usize].iter().enumerate() {
                    if t.is_zero() {
                        continue;
                    }
                    let mut b = *a;
                    b[axis] = m as u32;
                    *next.entry(b).or_insert_with(BigRational::zero) += v * t;
                }
            }
            next.retain(|_, v| !v.is_zero());
            coeffs = next;
        }

        let d = self.degree;
        Ok(EdgePoly::from_terms(coeffs.into_iter().map(|(b, v)| {
            let rest: u32 = b.iter().sum();
            (Monomial([d - rest, b[0], b[1], b[2], b[3], b[4]]), v)
        })))
    }
}

/// Row `k`: coefficients in powers of `x` of `binom((x - 1) / step, k)`.
fn binomial_to_monomial(degree: u32, step: &BigRational) -> Vec<Vec<BigRational>> {
    let n = degree as usize + 1;
    let inv = step.recip();
    let mut rows = Vec::with_capacity(n);
    let mut current = vec![BigRational::one()];
    rows.push(current.clone());
    for k in 0..degree {
        // multiply by ((x - 1)/step - k) / (k + 1) = (inv x - (inv + k)) / (k + 1)
        let shift = &inv + BigRational::from_integer(k.into());
        let denom = BigRational::from_integer((k + 1).into());
        let mut next = vec![BigRational::zero(); current.len() + 1];
        for (e, c) in current.iter().enumerate() {
            next[e + 1] += c * &inv / &denom;
            next[e] -= c * &shift / &denom;
        }
        current = next;
        rows.push(current.clone());
    }
    for r in &mut rows {
        r.resize(n, BigRational::zero());
    }
    rows
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// from the continued-fraction convergents.
pub fn nearest_rational(x: &BigRational, max_den: &BigInt) -> BigRational {
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    let mut best = BigRational::from_integer(x.round().to_integer());
    loop {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > max_den {
            break;
        }
        best = BigRational::new(h2.clone(), k2.clone());
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    best
}

/// What to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    /// Zero everywhere.
    Zero,
    /// The closed form for `Re(det M)`, evaluated exactly.
    ReDetMClosedForm,
    /// `Re(det M)` from the determinant, in fixed point.
    ReDetM,
    /// `|det M|^2` from the determinant, in fixed point.
    AbsDetMSquared,
}

impl Target {
    pub fn natural_degree(&self) -> u32 {
        match self {
            Target::Zero | Target::ReDetMClosedForm | Target::ReDetM => 6,
            Target::AbsDetMSquared => 12,
        }
    }

    fn evaluate(&self, edges: &[BigRational; 6], bits: u32) -> Result<BigRational> {
        match self {
            Target::Zero => Ok(BigRational::zero()),
            Target::ReDetMClosedForm => Ok(super::expand_re_det_m().eval_exact(edges)),
            Target::ReDetM => precise::re_det_m_from_edges(edges, bits),
            Target::AbsDetMSquared => precise::abs_det_m_sqr_from_edges(edges, bits),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InterpolationOptions {
    pub degree: u32,
    pub precision_bits: u32,
    pub step: BigRational,
    /// Largest denominator accepted when rounding coefficients.
    pub max_denominator: BigInt,
    /// Largest accepted distance between a raw coefficient and its rounding.
    pub rounding_tolerance: f64,
    /// Held-out random realizable samples used for the residual.
    pub holdout: usize,
    pub seed: u64,
    /// Largest accepted relative residual on the held-out samples.
    pub residual_tolerance: f64,
}

impl InterpolationOptions {
    pub fn new(degree: u32) -> Self {
        Self {
            degree,
            precision_bits: 256,
            step: BigRational::new(1.into(), 32.into()),
            max_denominator: BigInt::from(1_000_000),
            rounding_tolerance: 1e-20,
            holdout: 64,
            seed: 0x5eed,
            residual_tolerance: 1e-20,
        }
    }

    /// Fractional bits the lattice can eat: `degree` differences each
    /// scaled by up to `2 / step`.
    pub fn estimated_loss_bits(&self) -> u32 {
        let inv = self.step.recip().to_f64().unwrap_or(f64::INFINITY);
        (self.degree as f64 * (inv.log2().ceil() + 1.0)).ceil() as u32
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Interpolation {
    #[serde(skip)]
    pub poly: EdgePoly,
    pub target: Target,
    pub degree: u32,
    pub precision_bits: u32,
    pub samples: usize,
    pub terms: usize,
    /// Largest distance between a raw coefficient and its rounding.
    pub max_rounding_error: f64,
    /// Largest relative error on held-out samples.
    pub residual: f64,
}

/// Samples `target` on the simplex lattice, interpolates exactly, rounds
/// coefficients and checks the result on random held-out edge sets.
pub fn interpolate_homogeneous(target: Target, options: &InterpolationOptions) -> Result<Interpolation> {
    let needed = options.estimated_loss_bits() + 64;
    if options.precision_bits < needed && !matches!(target, Target::Zero | Target::ReDetMClosedForm) {
        return Err(Error::IllConditioned(format!(
            "{} bits requested, the lattice needs at least {needed}",
            options.precision_bits
        )));
    }
    let lattice = SimplexLattice::new(options.degree, options.step.clone());
    if let Some(a) = lattice.indices().iter().find(|a| !precise::is_strictly_realizable(&lattice.edges(a))) {
        return Err(Error::IllConditioned(format!("lattice point {a:?} is not a tetrahedron")));
    }
    let values = lattice.sample(|e| target.evaluate(e, options.precision_bits))?;
    let raw = lattice.interpolate(&values)?;

    let mut max_rounding_error = 0.0f64;
    let mut terms = Vec::with_capacity(raw.len());
    for (m, c) in raw.terms() {
        let r = nearest_rational(c, &options.max_denominator);
        let err = (c - &r).abs().to_f64().unwrap_or(f64::INFINITY);
        max_rounding_error = max_rounding_error.max(err);
        terms.push((*m, r));
    }
    if max_rounding_error > options.rounding_tolerance {
        return Err(Error::ResidualTooLarge { residual: max_rounding_error, tolerance: options.rounding_tolerance });
    }
    let poly = EdgePoly::from_terms(terms);

    let residual = holdout_residual(&poly, target, options)?;
    if residual > options.residual_tolerance {
        return Err(Error::ResidualTooLarge { residual, tolerance: options.residual_tolerance });
    }
    Ok(Interpolation {
        terms: poly.len(),
        poly,
        target,
        degree: options.degree,
        precision_bits: options.precision_bits,
        samples: lattice.len(),
        max_rounding_error,
        residual,
    })
}

/// Random rational edge sets near the regular tetrahedron that are strictly
/// realizable.
pub fn random_realizable_edges(count: usize, seed: u64) -> Vec<[BigRational; 6]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let e: [BigRational; 6] =
            std::array::from_fn(|_| BigRational::new(rng.random_range(700..1400).into(), 1000.into()));
        if precise::is_strictly_realizable(&e) {
            out.push(e);
        }
    }
    out
}

fn holdout_residual(poly: &EdgePoly, target: Target, options: &InterpolationOptions) -> Result<f64> {
    let points = random_realizable_edges(options.holdout, options.seed);
    let errs: Vec<f64> = points
        .par_iter()
        .map(|e| {
            let want = target.evaluate(e, options.precision_bits)?;
            let got = poly.eval_exact(e);
            let diff = (&got - &want).abs();
            Ok(if want.is_zero() {
                diff.to_f64().unwrap_or(f64::INFINITY)
            } else {
                (diff / want.abs()).to_f64().unwrap_or(f64::INFINITY)
            })
        })
        .collect::<Result<_>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(SimplexLattice::new(6, q(1, 32)).len(), 462);
        assert_eq!(SimplexLattice::new(12, q(1, 32)).len(), 6188);
    }

    #[test]
    fn recovers_a_known_polynomial() {
        let [a, b, c, d, e, f] = EdgePoly::vars();
        let p = &(&(&a.pow(2) * &f).scale(&q(3, 5)) - &(&(&b * &c) * &d)) + &(&e.pow(2) * &a).scale(&q(-7, 1));
        let lattice = SimplexLattice::new(3, q(1, 8));
        let values = lattice.sample(|x| Ok(p.eval_exact(x))).unwrap();
        assert_eq!(lattice.interpolate(&values).unwrap(), p);
    }

    #[test]
    fn zero_function_gives_zero() {
        let out = interpolate_homogeneous(Target::Zero, &InterpolationOptions::new(4)).unwrap();
        assert!(out.poly.is_zero());
        assert_eq!(out.terms, 0);
    }

    #[test]
    fn nearest_rational_examples() {
        let max = BigInt::from(1000);
        assert_eq!(nearest_rational(&q(333_334, 1_000_000), &max), q(1, 3));
        assert_eq!(nearest_rational(&q(-5, 2), &max), q(-5, 2));
        assert_eq!(nearest_rational(&q(7, 1), &max), q(7, 1));
        assert_eq!(nearest_rational(&q(1, 10_000), &max), q(0, 1));
    }

    #[test]
    fn basis_rows() {
        // binom((x - 1) * 2, 2) = (2x - 2)(2x - 3) / 2 = 2x^2 - 5x + 3
        let rows = binomial_to_monomial(2, &q(1, 2));
        assert_eq!(rows[2], vec![q(3, 1), q(-5, 1), q(2, 1)]);
        assert_eq!(rows[1], vec![q(-2, 1), q(2, 1), q(0, 1)]);
    }

    #[test]
    fn refit_of_the_determinant_is_exact_after_rounding() {
        let out = interpolate_homogeneous(Target::ReDetM, &InterpolationOptions::new(6)).unwrap();
        assert_eq!(out.poly, crate::sympoly::expand_re_det_m());
        assert!(out.max_rounding_error < 1e-40, "{}", out.max_rounding_error);
    }

    #[test]
    fn low_precision_is_ill_conditioned() {
        let mut opts = InterpolationOptions::new(12);
        opts.precision_bits = 64;
        assert!(matches!(
            interpolate_homogeneous(Target::AbsDetMSquared, &opts),
            Err(Error::IllConditioned(_))
        ));
    }
}
