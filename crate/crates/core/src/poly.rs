//! Dense univariate polynomials over an exact field.
//!
//! Coefficients are stored ascending (index i holds the x^i coefficient) and
//! the representation is trimmed: no trailing zeros, the zero polynomial is
//! the empty list. Division, gcd and resultants are the Euclidean versions
//! over a field; gcds are always returned monic so they are canonical.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;

/// A field in which exact square roots can be extracted.
pub trait SquareRootField: Field {
    /// `Some(r)` with `r*r == self` iff `self` is a square.
    fn sqrt(&self) -> Option<Self>;
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial<F: Field> {
    coeffs: Vec<F>,
}

impl<F: Field> Polynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().map_or(false, F::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    /// The monomial c x^k.
    pub fn monomial(c: F, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Polynomial { coeffs }
    }

    pub fn x() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| F::from_i64(c)).collect())
    }

    /// Monic (x - r1)...(x - rk).
    pub fn from_roots(roots: &[F]) -> Self {
        let mut p = Self::one();
        for r in roots {
            p = p.mul(&Self::new(vec![r.neg(), F::one()]));
        }
        p
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with deg 0 for the zero polynomial; callers that care about the
    /// distinction use `degree`.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&rhs.coeff(i)));
        }
        Self::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            coeffs: self.coeffs.iter().map(F::neg).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Euclidean division: `self = q * div + r` with `deg r < deg div`.
    pub fn divrem(&self, div: &Self) -> Result<(Self, Self)> {
        if div.is_zero() {
            return Err(Error::DivisionByZero("polynomial division"));
        }
        let dlc_inv = div.lc().inv().expect("nonzero leading coefficient");
        let dd = div.deg();
        let mut rem = self.clone();
        let mut quo = vec![F::zero(); self.coeffs.len().saturating_sub(div.coeffs.len()) + 1];
        while !rem.is_zero() && rem.deg() >= dd {
            let k = rem.deg() - dd;
            let c = rem.lc().mul(&dlc_inv);
            quo[k] = quo[k].add(&c);
            rem = rem.sub(&div.mul(&Self::monomial(c, k)));
        }
        Ok((Self::new(quo), rem))
    }

    pub fn rem(&self, div: &Self) -> Result<Self> {
        Ok(self.divrem(div)?.1)
    }

    /// Division known to be exact; an inexact division is an internal error.
    pub fn div_exact(&self, div: &Self) -> Result<Self> {
        let (q, r) = self.divrem(div)?;
        if !r.is_zero() {
            return Err(Error::Internal(format!(
                "inexact polynomial division: remainder {r:?}"
            )));
        }
        Ok(q)
    }

    /// Monic associate and the leading coefficient that was divided out.
    pub fn monic(&self) -> (Self, F) {
        if self.is_zero() {
            return (Self::zero(), F::one());
        }
        let lc = self.lc();
        let inv = lc.inv().expect("nonzero leading coefficient");
        (self.scale(&inv), lc)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("divisor nonzero");
            a = b;
            b = r;
        }
        a.monic().0
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*rhs = g, g monic.
    pub fn ext_gcd(&self, rhs: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("divisor nonzero");
            (r0, r1) = (r1, r);
            (s0, s1) = (s1.clone(), s0.sub(&q.mul(&s1)));
            (t0, t1) = (t1.clone(), t0.sub(&q.mul(&t1)));
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let lc_inv = r0.lc().inv().expect("nonzero leading coefficient");
        (
            r0.scale(&lc_inv),
            s0.scale(&lc_inv),
            t0.scale(&lc_inv),
        )
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c.mul(&F::from_i64(i as i64 + 1)))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        self.eval_with(|c| c.clone(), x)
    }

    /// Horner evaluation after mapping coefficients into another field.
    pub fn eval_with<G: Field>(&self, lift: impl Fn(&F) -> G, x: &G) -> G {
        let mut acc = G::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&lift(c));
        }
        acc
    }

    /// Substitute a polynomial for the variable: self(inner).
    pub fn compose(&self, inner: &Polynomial<F>) -> Polynomial<F> {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Polynomial::constant(c.clone()));
        }
        acc
    }

    /// Coefficient-wise map into another field; fallible for reductions that
    /// can hit bad denominators.
    pub fn map_coeffs<G: Field>(
        &self,
        f: impl Fn(&F) -> Result<G>,
    ) -> Result<Polynomial<G>> {
        let coeffs: Result<Vec<G>> = self.coeffs.iter().map(f).collect();
        Ok(Polynomial::new(coeffs?))
    }

    /// Substitute x -> -x.
    pub fn flip_sign(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { c.neg() } else { c.clone() })
                .collect(),
        )
    }

    /// Resultant of `self` and `rhs` via the Euclidean recursion.
    pub fn resultant(&self, rhs: &Self) -> F {
        fn go<F: Field>(a: &Polynomial<F>, b: &Polynomial<F>) -> F {
            if a.is_zero() || b.is_zero() {
                return F::zero();
            }
            let (m, n) = (a.deg(), b.deg());
            if n == 0 {
                return pow_f(&b.lc(), m as u32);
            }
            if m < n {
                let r = go(b, a);
                return if (m * n) % 2 == 1 { r.neg() } else { r };
            }
            let r = a.rem(b).expect("divisor nonzero");
            if r.is_zero() {
                return F::zero();
            }
            let sign = (m * n) % 2 == 1;
            let factor = pow_f(&b.lc(), (m - r.deg()) as u32);
            let rec = go(b, &r);
            let out = factor.mul(&rec);
            if sign {
                out.neg()
            } else {
                out
            }
        }
        go(self, rhs)
    }

    /// Discriminant (-1)^(d(d-1)/2) res(f, f') / lc(f), for deg f >= 1.
    pub fn discriminant(&self) -> Result<F> {
        let d = self
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::Internal("discriminant needs degree >= 1".into()))?;
        let res = self.resultant(&self.derivative());
        let lc_inv = self.lc().inv().expect("nonzero leading coefficient");
        let signed = if (d * (d - 1) / 2) % 2 == 1 {
            res.neg()
        } else {
            res
        };
        Ok(signed.mul(&lc_inv))
    }

    /// True if the polynomial is squarefree (nontrivial gcd with derivative).
    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if self.deg() == 0 {
            return true;
        }
        self.gcd(&self.derivative()).is_one()
    }
}

impl<F: SquareRootField> Polynomial<F> {
    /// Exact polynomial square root, if `self` is a square in F[x].
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let d = self.deg();
        if d % 2 != 0 {
            return None;
        }
        let m = d / 2;
        let lc_root = self.lc().sqrt()?;
        let mut root = Self::monomial(lc_root.clone(), m);
        let denom_inv = lc_root.double().inv().expect("nonzero");
        // match coefficients top-down: the x^(m+k) coefficient of self - root^2
        // determines the x^k coefficient of the root
        for k in (0..m).rev() {
            let diff = self.sub(&root.square());
            let c = diff.coeff(m + k).mul(&denom_inv);
            root = root.add(&Self::monomial(c, k));
        }
        (root.square() == *self).then_some(root)
    }
}

fn pow_f<F: Field>(base: &F, e: u32) -> F {
    let mut out = F::one();
    for _ in 0..e {
        out = out.mul(base);
    }
    out
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
