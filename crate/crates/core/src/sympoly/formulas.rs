use num_rational::BigRational;

use super::EdgePoly;

/// `(a + b - c)(b + c - a)(c + a - b)` for polynomial arguments.
pub fn d3_poly(a: &EdgePoly, b: &EdgePoly, c: &EdgePoly) -> EdgePoly {
    let x = &(a + b) - c;
    let y = &(b + c) - a;
    let z = &(c + a) - b;
    &(&x * &y) * &z
}

/// `144 V^2`, written out monomial by monomial in the squared edges.
pub fn cm_poly_144v2() -> EdgePoly {
    let [r21, r31, r32, r41, r42, r43] = EdgePoly::vars().map(|v| v.pow(2));
    let t = |s: i64, a: &EdgePoly, b: &EdgePoly, c: &EdgePoly| (&(a * b) * c).scale(&BigRational::from_integer(s.into()));
    let terms = [
        t(-1, &r21, &r21, &r43),
        t(-1, &r21, &r43, &r43),
        t(-1, &r32, &r41, &r41),
        t(-1, &r32, &r32, &r41),
        t(-1, &r31, &r31, &r42),
        t(-1, &r31, &r42, &r42),
        t(1, &r21, &r43, &r31),
        t(1, &r21, &r43, &r41),
        t(-1, &r21, &r42, &r41),
        t(1, &r21, &r42, &r43),
        t(1, &r21, &r42, &r31),
        t(1, &r21, &r32, &r43),
        t(-1, &r21, &r32, &r31),
        t(1, &r32, &r42, &r41),
        t(1, &r31, &r42, &r41),
        t(1, &r32, &r43, &r41),
        t(-1, &r32, &r42, &r43),
        t(1, &r32, &r42, &r31),
        t(1, &r31, &r42, &r43),
        t(1, &r32, &r31, &r41),
        t(-1, &r31, &r43, &r41),
        t(1, &r21, &r32, &r41),
    ];
    terms.iter().fold(EdgePoly::zero(), |acc, p| &acc + p)
}

/// `64 prod r - 4 d3(r21 r43, r31 r42, r32 r41)
///  + 12 av(r41 ((r42 + r43)^2 - r32^2) d3(r21, r31, r32))`.
pub fn re_det_m_without_volume() -> EdgePoly {
    let [r21, r31, r32, r41, r42, r43] = EdgePoly::vars();
    let int = |k: i64| BigRational::from_integer(k.into());
    let all = [&r21, &r31, &r32, &r41, &r42, &r43].into_iter().fold(EdgePoly::integer(1), |acc, v| &acc * v);
    let opposite = d3_poly(&(&r21 * &r43), &(&r31 * &r42), &(&r32 * &r41));
    let face = d3_poly(&r21, &r31, &r32);
    let lever = &(&r42 + &r43).pow(2) - &r32.pow(2);
    let averaged = (&(&r41 * &lever) * &face).sym_av();
    &(&all.scale(&int(64)) - &opposite.scale(&int(4))) + &averaged.scale(&int(12))
}

/// `Re(det M)` for four points as an exact polynomial in the edge lengths:
/// [`re_det_m_without_volume`] plus `288 V^2 = 2 * 144 V^2`.
pub fn expand_re_det_m() -> EdgePoly {
    &re_det_m_without_volume() + &cm_poly_144v2().scale(&BigRational::from_integer(2.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sympoly::Monomial;

    #[test]
    fn cm_poly_has_22_terms() {
        let p = cm_poly_144v2();
        assert_eq!(p.len(), 22);
        assert!(p.is_homogeneous(6));
        assert!(p.terms().all(|(m, _)| m.0.iter().all(|e| e % 2 == 0)));
        assert_eq!(p.eval_f64(&[1.0; 6]), 2.0);
        assert_eq!(p.eval_f64(&[1.0, 2.0, 1.0, 3.0, 2.0, 1.0]), 0.0);
    }

    #[test]
    fn expansion_shape() {
        let p = expand_re_det_m();
        assert!(p.is_homogeneous(6));
        assert_eq!(p.eval_f64(&[1.0; 6]), 100.0);
        assert_eq!(p.eval_f64(&[1.0, 2.0, 1.0, 3.0, 2.0, 1.0]), 768.0);
        assert_eq!(p.sym_av(), p);
        assert_eq!(p.coefficient(&Monomial([1; 6])).to_integer(), 24.into());
        // the volume block shares no monomial with the rest
        let rest = re_det_m_without_volume();
        assert_eq!(p.len(), rest.len() + cm_poly_144v2().len());
    }
}
