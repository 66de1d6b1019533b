//! Chord-tangent group law on monic cubic models y^2 = x^3 + a2 x^2 + a4 x + a6.
//!
//! This is the classical genus-1 group law, kept separate from the Cantor
//! path on purpose: the two are checked against each other, and the height
//! machinery runs on this one.

use crate::curve::{CurvePoint, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::field::Field;

fn require_monic_cubic<F: Field>(curve: &HyperellipticCurve<F>) -> Result<()> {
    if curve.genus() != 1 || !curve.f().lc().is_one() {
        return Err(Error::Internal(format!(
            "chord-tangent law needs a monic cubic, got {}",
            curve.f()
        )));
    }
    Ok(())
}

/// P + Q by chord and tangent. Both points must lie on the curve.
pub fn ec_add<F: Field>(
    curve: &HyperellipticCurve<F>,
    p: &CurvePoint<F>,
    q: &CurvePoint<F>,
) -> Result<CurvePoint<F>> {
    require_monic_cubic(curve)?;
    let (x1, y1) = match p {
        CurvePoint::Infinity => return Ok(q.clone()),
        CurvePoint::Affine { x, y } => (x, y),
    };
    let (x2, y2) = match q {
        CurvePoint::Infinity => return Ok(p.clone()),
        CurvePoint::Affine { x, y } => (x, y),
    };
    let a2 = curve.f().coeff(2);

    let lambda = if x1 == x2 {
        if *y1 == y2.neg() {
            return Ok(CurvePoint::Infinity);
        }
        // tangent: f'(x) / 2y
        let fp = curve.f().derivative().eval(x1);
        fp.div(&y1.double()).ok_or(Error::DivisionByZero("tangent slope"))?
    } else {
        y2.sub(y1)
            .div(&x2.sub(x1))
            .ok_or(Error::DivisionByZero("chord slope"))?
    };

    let x3 = lambda.square().sub(&a2).sub(x1).sub(x2);
    let y3 = lambda.mul(&x1.sub(&x3)).sub(y1);
    Ok(CurvePoint::Affine { x: x3, y: y3 })
}

pub fn ec_neg<F: Field>(p: &CurvePoint<F>) -> CurvePoint<F> {
    match p {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::Affine {
            x: x.clone(),
            y: y.neg(),
        },
    }
}

pub fn ec_double<F: Field>(
    curve: &HyperellipticCurve<F>,
    p: &CurvePoint<F>,
) -> Result<CurvePoint<F>> {
    ec_add(curve, p, p)
}

/// n P by double-and-add; n may be negative or zero.
pub fn ec_scalar_mul<F: Field>(
    curve: &HyperellipticCurve<F>,
    n: i64,
    p: &CurvePoint<F>,
) -> Result<CurvePoint<F>> {
    if n == 0 {
        return Ok(CurvePoint::Infinity);
    }
    let base = if n < 0 { ec_neg(p) } else { p.clone() };
    let mut n = n.unsigned_abs();
    let mut acc = CurvePoint::Infinity;
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = ec_add(curve, &acc, &sq)?;
        }
        n >>= 1;
        if n > 0 {
            sq = ec_add(curve, &sq, &sq)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::rational::Rational;

    type Q = Rational;
    type QPoly = Polynomial<Q>;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn curve_37a_scaled() -> HyperellipticCurve<Q> {
        // y^2 = x^3 - 16x + 16
        HyperellipticCurve::new(QPoly::from_i64(&[16, -16, 0, 1])).unwrap()
    }

    #[test]
    fn small_multiples_stay_on_curve() {
        let e = curve_37a_scaled();
        let p = e.point(q(0), q(4)).unwrap();
        let mut acc = CurvePoint::Infinity;
        for _ in 0..12 {
            acc = ec_add(&e, &acc, &p).unwrap();
            assert!(e.on_curve(&acc));
        }
    }

    #[test]
    fn inverse_and_identity() {
        let e = curve_37a_scaled();
        let p = e.point(q(0), q(4)).unwrap();
        let s = ec_add(&e, &p, &ec_neg(&p)).unwrap();
        assert!(s.is_infinity());
        assert_eq!(ec_add(&e, &p, &CurvePoint::Infinity).unwrap(), p);
        assert_eq!(ec_scalar_mul(&e, 0, &p).unwrap(), CurvePoint::Infinity);
    }

    #[test]
    fn associativity_spot_checks() {
        let e = curve_37a_scaled();
        let p = e.point(q(0), q(4)).unwrap();
        let q2 = ec_double(&e, &p).unwrap();
        let q3 = ec_add(&e, &q2, &p).unwrap();
        let left = ec_add(&e, &ec_add(&e, &p, &q2).unwrap(), &q3).unwrap();
        let right = ec_add(&e, &p, &ec_add(&e, &q2, &q3).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(ec_scalar_mul(&e, 6, &p).unwrap(), ec_double(&e, &q3).unwrap());
    }

    #[test]
    fn two_torsion_doubles_to_identity() {
        // y^2 = x^3 - x has (0,0), (1,0), (-1,0)
        let e = HyperellipticCurve::new(QPoly::from_i64(&[0, -1, 0, 1])).unwrap();
        for x in [-1i64, 0, 1] {
            let t = e.point(q(x), q(0)).unwrap();
            assert!(ec_double(&e, &t).unwrap().is_infinity());
        }
    }

    #[test]
    fn handles_a2_term() {
        // y^2 = x^3 + x^2 - 2x = x(x-1)(x+2): sum of two 2-torsion points is
        // the third, and the a2 coefficient enters the x3 formula
        let e = HyperellipticCurve::new(QPoly::from_i64(&[0, -2, 1, 1])).unwrap();
        let t0 = e.point(q(0), q(0)).unwrap();
        let t1 = e.point(q(1), q(0)).unwrap();
        let t2 = e.point(q(-2), q(0)).unwrap();
        assert_eq!(ec_add(&e, &t0, &t1).unwrap(), t2);
    }
}
