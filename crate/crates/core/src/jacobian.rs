//! Jacobian arithmetic in Mumford representation.
//!
//! A divisor class is a pair (u, v) with u monic, deg v < deg u <= g and
//! u | v^2 - f; the identity is (1, 0). Composition and reduction follow
//! Cantor's algorithm; the reduction loop replaces u by (f - v^2)/u,
//! normalizes monic, and flips v modulo the new u, until deg u <= g.

use std::fmt;

use num_bigint::BigInt;

use crate::curve::{CurvePoint, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::Polynomial;

#[derive(Clone, PartialEq, Eq)]
pub struct MumfordDivisor<F: Field> {
    u: Polynomial<F>,
    v: Polynomial<F>,
}

impl<F: Field> MumfordDivisor<F> {
    pub fn identity() -> Self {
        MumfordDivisor {
            u: Polynomial::one(),
            v: Polynomial::zero(),
        }
    }

    /// Validated constructor.
    pub fn new(
        curve: &HyperellipticCurve<F>,
        u: Polynomial<F>,
        v: Polynomial<F>,
    ) -> Result<Self> {
        let d = MumfordDivisor { u, v };
        d.validate(curve)?;
        Ok(d)
    }

    pub fn u(&self) -> &Polynomial<F> {
        &self.u
    }

    pub fn v(&self) -> &Polynomial<F> {
        &self.v
    }

    pub fn is_identity(&self) -> bool {
        self.u.is_one() && self.v.is_zero()
    }

    /// Weight of the reduced divisor (number of affine points counted with
    /// multiplicity).
    pub fn weight(&self) -> usize {
        self.u.deg()
    }

    pub fn validate(&self, curve: &HyperellipticCurve<F>) -> Result<()> {
        if self.u.is_zero() || !self.u.lc().is_one() {
            return Err(Error::InvalidDivisor(format!("u = {} is not monic", self.u)));
        }
        if self.u.deg() > curve.genus() {
            return Err(Error::InvalidDivisor(format!(
                "deg u = {} exceeds genus {}",
                self.u.deg(),
                curve.genus()
            )));
        }
        if !self.v.is_zero() && self.v.deg() >= self.u.deg() {
            return Err(Error::InvalidDivisor(format!(
                "deg v = {} not below deg u = {}",
                self.v.deg(),
                self.u.deg()
            )));
        }
        let rem = self.v.square().sub(curve.f()).rem(&self.u)?;
        if !rem.is_zero() {
            return Err(Error::InvalidDivisor(format!(
                "u does not divide v^2 - f (remainder {rem})"
            )));
        }
        Ok(())
    }
}

/// Class of (P) - (infinity) for a point P on the curve.
pub fn embed<F: Field>(
    curve: &HyperellipticCurve<F>,
    p: &CurvePoint<F>,
) -> Result<MumfordDivisor<F>> {
    match p {
        CurvePoint::Infinity => Ok(MumfordDivisor::identity()),
        CurvePoint::Affine { x, y } => {
            if !curve.on_curve(p) {
                return Err(Error::PointNotOnCurve);
            }
            Ok(MumfordDivisor {
                u: Polynomial::new(vec![x.neg(), F::one()]),
                v: Polynomial::constant(y.clone()),
            })
        }
    }
}

/// Cantor composition followed by reduction to canonical form.
pub fn cantor_add<F: Field>(
    curve: &HyperellipticCurve<F>,
    d1: &MumfordDivisor<F>,
    d2: &MumfordDivisor<F>,
) -> Result<MumfordDivisor<F>> {
    // The neutral class composes trivially; short-circuiting also keeps the
    // field-agnostic identity literal away from coefficient inversion.
    if d1.is_identity() {
        return Ok(d2.clone());
    }
    if d2.is_identity() {
        return Ok(d1.clone());
    }
    let f = curve.f();
    let (u1, v1) = (&d1.u, &d1.v);
    let (u2, v2) = (&d2.u, &d2.v);

    // d = gcd(u1, u2, v1 + v2) = s1 u1 + s2 u2 + s3 (v1 + v2)
    let (d0, e1, e2) = u1.ext_gcd(u2);
    let vsum = v1.add(v2);
    let (d, c1, c2) = d0.ext_gcd(&vsum);
    let s1 = c1.mul(&e1);
    let s2 = c1.mul(&e2);
    let s3 = c2;

    let u = u1.mul(u2).div_exact(&d.square())?;
    let numerator = s1
        .mul(u1)
        .mul(v2)
        .add(&s2.mul(u2).mul(v1))
        .add(&s3.mul(&v1.mul(v2).add(f)));
    let v = numerator.div_exact(&d)?.rem(&u)?;

    reduce(curve, u, v)
}

fn reduce<F: Field>(
    curve: &HyperellipticCurve<F>,
    mut u: Polynomial<F>,
    mut v: Polynomial<F>,
) -> Result<MumfordDivisor<F>> {
    let g = curve.genus();
    while u.deg() > g {
        let next_u = curve.f().sub(&v.square()).div_exact(&u)?;
        let (next_u, _) = next_u.monic();
        let next_v = v.neg().rem(&next_u)?;
        u = next_u;
        v = next_v;
    }
    let (u, _) = u.monic();
    let v = v.rem(&u)?;
    let out = MumfordDivisor { u, v };
    debug_assert!(out.validate(curve).is_ok());
    Ok(out)
}

/// Inverse class: (u, -v mod u).
pub fn negate<F: Field>(
    curve: &HyperellipticCurve<F>,
    d: &MumfordDivisor<F>,
) -> Result<MumfordDivisor<F>> {
    if d.is_identity() {
        return Ok(d.clone());
    }
    let v = d.v.neg().rem(&d.u)?;
    let out = MumfordDivisor {
        u: d.u.clone(),
        v,
    };
    debug_assert!(out.validate(curve).is_ok());
    Ok(out)
}

/// n-fold sum by double-and-add; n may be negative or zero.
pub fn scalar_mul<F: Field>(
    curve: &HyperellipticCurve<F>,
    n: i64,
    d: &MumfordDivisor<F>,
) -> Result<MumfordDivisor<F>> {
    if n == 0 {
        return Ok(MumfordDivisor::identity());
    }
    let base = if n < 0 { negate(curve, d)? } else { d.clone() };
    let mut n = n.unsigned_abs();
    let mut acc = MumfordDivisor::identity();
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = cantor_add(curve, &acc, &sq)?;
        }
        n >>= 1;
        if n > 0 {
            sq = cantor_add(curve, &sq, &sq)?;
        }
    }
    Ok(acc)
}

/// Class of sum m_i (P_i) - (sum m_i)(infinity), folded with Cantor steps.
pub fn class_of_divisor<F: Field>(
    curve: &HyperellipticCurve<F>,
    terms: &[(CurvePoint<F>, i64)],
) -> Result<MumfordDivisor<F>> {
    let mut acc = MumfordDivisor::identity();
    for (p, m) in terms {
        let cls = scalar_mul(curve, *m, &embed(curve, p)?)?;
        acc = cantor_add(curve, &acc, &cls)?;
    }
    Ok(acc)
}

impl<F: Field> fmt::Display for MumfordDivisor<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u = {}, v = {})", self.u, self.v)
    }
}

impl<F: Field> fmt::Debug for MumfordDivisor<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Degree of the preimage [n]^{-1} C_0 of a curve C_0 in the Jacobian meeting
/// a principal polarization once: multiplication by n has degree n^{2g} on a
/// g-dimensional abelian variety, so the pullback has degree n^{2g}.
pub fn preimage_degree(n: u32, genus: u32) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::ZeroScalar);
    }
    Ok(BigInt::from(n).pow(2 * genus))
}
