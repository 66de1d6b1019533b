//! Complete factorization over Q for polynomials of degree at most 4.
//!
//! Linear factors come from the rational root theorem; quartic splits into
//! quadratics go through the resolvent cubic. Degree 4 covers every q(x)
//! appearing in the biquadratic families handled here; higher degrees error
//! out rather than silently returning a partial factorization.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::Polynomial;
use crate::rational::Rational;

type QPoly = Polynomial<Rational>;

/// Monic irreducible factors of p over Q, with multiplicity, ascending degree.
/// The leading coefficient is dropped (factors multiply to p/lc).
pub fn monic_factors(p: &QPoly) -> Result<Vec<QPoly>> {
    let d = p
        .degree()
        .ok_or_else(|| Error::Internal("cannot factor the zero polynomial".into()))?;
    if d > 4 {
        return Err(Error::Internal(format!(
            "factorization over Q implemented for degree <= 4, got {d}"
        )));
    }
    let mut rest = p.monic().0;
    let mut out = Vec::new();

    // strip rational roots
    loop {
        match rational_root(&rest) {
            Some(r) => {
                let lin = QPoly::new(vec![r.neg(), Rational::one()]);
                rest = rest.div_exact(&lin)?;
                out.push(lin);
            }
            None => break,
        }
        if rest.deg() == 0 {
            break;
        }
    }

    match rest.deg() {
        0 => {}
        1 => out.push(rest),
        2 => out.extend(factor_quadratic(&rest)),
        3 => out.push(rest), // no rational root left: irreducible cubic
        4 => out.extend(factor_rootless_quartic(&rest)?),
        _ => unreachable!("degree bounded by 4"),
    }
    out.sort_by_key(|f| f.deg());
    Ok(out)
}

/// True iff p has no nonconstant proper factor over Q (degree <= 4 only).
pub fn is_irreducible(p: &QPoly) -> Result<bool> {
    Ok(monic_factors(p)?.len() == 1 && p.deg() >= 1)
}

/// Some rational root of p, if one exists.
pub fn rational_root(p: &QPoly) -> Option<Rational> {
    let d = p.degree()?;
    if d == 0 {
        return None;
    }
    if p.coeff(0).is_zero() {
        return Some(Rational::zero());
    }
    // clear denominators to an integer polynomial
    let mut den = BigInt::from(1);
    for c in p.coeffs() {
        den = num_integer::lcm(den, c.denom().clone());
    }
    let int_coeffs: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&den / c.denom()))
        .collect();
    let a0 = int_coeffs[0].abs();
    let an = int_coeffs[d].abs();
    for num in divisors(&a0) {
        for den in divisors(&an) {
            for sign in [1i64, -1] {
                let cand = Rational::new(&num * BigInt::from(sign), den.clone())
                    .expect("nonzero denominator");
                if p.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Positive divisors by trial division; factorization inputs here have small
/// numerators and denominators by construction.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::from(1);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Monic quadratic: split by discriminant or return it whole.
fn factor_quadratic(p: &QPoly) -> Vec<QPoly> {
    debug_assert_eq!(p.deg(), 2);
    let (b, c) = (p.coeff(1), p.coeff(0));
    let disc = b.square().sub(&c.mul(&Rational::from_int(4)));
    match disc.sqrt_exact() {
        Some(s) => {
            let half = Rational::new(1.into(), 2.into()).unwrap();
            let r1 = b.neg().add(&s).mul(&half);
            let r2 = b.neg().sub(&s).mul(&half);
            vec![
                QPoly::new(vec![r1.neg(), Rational::one()]),
                QPoly::new(vec![r2.neg(), Rational::one()]),
            ]
        }
        None => vec![p.clone()],
    }
}

/// Monic quartic with no rational root: either a product of two irreducible
/// monic quadratics, found through the resolvent cubic of the depressed
/// quartic, or irreducible.
fn factor_rootless_quartic(p: &QPoly) -> Result<Vec<QPoly>> {
    debug_assert_eq!(p.deg(), 4);
    // depress: x -> x - c3/4
    let shift = p.coeff(3).div(&Rational::from_int(4)).unwrap();
    let x_minus = QPoly::new(vec![shift.neg(), Rational::one()]);
    let dep = p.compose(&x_minus);
    debug_assert!(dep.coeff(3).is_zero());
    let (pp, qq, rr) = (dep.coeff(2), dep.coeff(1), dep.coeff(0));

    let split = split_depressed_quartic(&pp, &qq, &rr);
    let Some((f1, f2)) = split else {
        return Ok(vec![p.clone()]);
    };
    // shift back: x -> x + c3/4
    let x_plus = QPoly::new(vec![shift.clone(), Rational::one()]);
    let g1 = f1.compose(&x_plus);
    let g2 = f2.compose(&x_plus);
    debug_assert_eq!(g1.mul(&g2), *p);
    let mut parts = Vec::new();
    for g in [g1, g2] {
        parts.extend(factor_quadratic(&g));
    }
    Ok(parts)
}

/// Quadratic-times-quadratic split of x^4 + p x^2 + q x + r, if one exists
/// over Q. Writes the split as (x^2 + ux + v)(x^2 - ux + z); u^2 is then a
/// rational square root of the resolvent cubic U^3 + 2p U^2 + (p^2-4r) U - q^2.
fn split_depressed_quartic(
    p: &Rational,
    q: &Rational,
    r: &Rational,
) -> Option<(QPoly, QPoly)> {
    let half = Rational::new(1.into(), 2.into()).unwrap();
    if q.is_zero() {
        // biquadratic: (x^2 + v)(x^2 + z) with v + z = p, v z = r
        let disc = p.square().sub(&r.mul(&Rational::from_int(4)));
        if let Some(s) = disc.sqrt_exact() {
            let v = p.add(&s).mul(&half);
            let z = p.sub(&s).mul(&half);
            return Some((
                QPoly::new(vec![v, Rational::zero(), Rational::one()]),
                QPoly::new(vec![z, Rational::zero(), Rational::one()]),
            ));
        }
        // or (x^2 + ux + v)(x^2 - ux + v) with v^2 = r, u^2 = 2v - p
        if let Some(v0) = r.sqrt_exact() {
            for v in [v0.clone(), v0.neg()] {
                let u2 = v.double().sub(p);
                if let Some(u) = u2.sqrt_exact() {
                    return Some((
                        QPoly::new(vec![v.clone(), u.clone(), Rational::one()]),
                        QPoly::new(vec![v.clone(), u.neg(), Rational::one()]),
                    ));
                }
            }
        }
        return None;
    }
    // resolvent cubic roots U = u^2 with u != 0
    let resolvent = QPoly::new(vec![
        q.square().neg(),
        p.square().sub(&r.mul(&Rational::from_int(4))),
        p.double(),
        Rational::one(),
    ]);
    let mut rest = resolvent;
    while let Some(root) = rational_root(&rest) {
        let lin = QPoly::new(vec![root.neg(), Rational::one()]);
        rest = rest.div_exact(&lin).expect("root divides");
        if root.is_zero() {
            continue;
        }
        if let Some(u) = root.sqrt_exact() {
            // z - v = q/u, z + v = p + u^2
            let diff = q.div(&u).expect("u nonzero");
            let sum = p.add(&u.square());
            let z = sum.add(&diff).mul(&half);
            let v = sum.sub(&diff).mul(&half);
            debug_assert_eq!(v.mul(&z), *r);
            return Some((
                QPoly::new(vec![v, u.clone(), Rational::one()]),
                QPoly::new(vec![z, u.neg(), Rational::one()]),
            ));
        }
        if rest.deg() == 0 {
            break;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> QPoly {
        QPoly::from_i64(c)
    }

    fn product(fs: &[QPoly]) -> QPoly {
        fs.iter().fold(QPoly::one(), |a, b| a.mul(b))
    }

    #[test]
    fn quartic_with_no_rational_structure_is_irreducible() {
        // x^4 + 11x^2 + 4: no rational roots, resolvent cubic
        // U^3 + 22U^2 + 105U - 0 ... q = 0 path: disc = 121 - 16 = 105 not a
        // square; v^2 = 4 gives u^2 = +-4 - 11 < 0 or not square
        let q = poly(&[4, 0, 11, 0, 1]);
        assert!(is_irreducible(&q).unwrap());
        assert_eq!(monic_factors(&q).unwrap(), vec![q]);
    }

    #[test]
    fn splits_into_linears() {
        let p = poly(&[0, -1, 0, 1]); // x^3 - x
        let fs = monic_factors(&p).unwrap();
        assert_eq!(fs.len(), 3);
        assert_eq!(product(&fs), p);
        assert!(fs.iter().all(|f| f.deg() == 1));
    }

    #[test]
    fn quadratic_split_of_biquadratic() {
        // x^4 - 3x^2 + 2 = (x^2 - 1)(x^2 - 2) -> (x-1)(x+1)(x^2-2)
        let p = poly(&[2, 0, -3, 0, 1]);
        let fs = monic_factors(&p).unwrap();
        assert_eq!(product(&fs), p);
        assert_eq!(fs.iter().map(|f| f.deg()).collect::<Vec<_>>(), vec![1, 1, 2]);
    }

    #[test]
    fn quartic_into_two_irreducible_quadratics() {
        // (x^2 + x + 1)(x^2 - x + 3) = x^4 + 3x^2 + 2x + 3
        let f1 = poly(&[1, 1, 1]);
        let f2 = poly(&[3, -1, 1]);
        let p = f1.mul(&f2);
        let fs = monic_factors(&p).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(product(&fs), p);
        assert!(fs.contains(&f1) && fs.contains(&f2));
    }

    #[test]
    fn cross_quadratic_split_with_nonzero_cubic_term() {
        // (x^2 + 2x + 2)(x^2 + x + 1), needs depression first
        let f1 = poly(&[2, 2, 1]);
        let f2 = poly(&[1, 1, 1]);
        let p = f1.mul(&f2);
        let fs = monic_factors(&p).unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(product(&fs), p);
    }

    #[test]
    fn rational_roots_with_denominators() {
        // (x - 1/2)(x + 3)(x^2 + 1), non-monic on input
        let p = poly(&[-1, 2]).mul(&poly(&[3, 1])).mul(&poly(&[1, 0, 1]));
        let fs = monic_factors(&p).unwrap();
        assert_eq!(fs.iter().map(|f| f.deg()).collect::<Vec<_>>(), vec![1, 1, 2]);
        let half: Rational = "1/2".parse().unwrap();
        assert!(fs.iter().any(|f| f.eval(&half).is_zero()));
    }

    #[test]
    fn degree_cap() {
        assert!(monic_factors(&poly(&[1, 0, 0, 0, 0, 1])).is_err());
    }

    #[test]
    fn irreducible_cubic_stays_whole() {
        let p = poly(&[2, 0, 0, 1]); // x^3 + 2, Eisenstein at 2
        assert!(is_irreducible(&p).unwrap());
    }
}
