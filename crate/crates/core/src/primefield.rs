//! Machine-word prime fields F_p.
//!
//! The modulus travels with each element. Elements produced by the
//! context-free `Field` constructors (`zero`, `one`, `from_i64`) start out as
//! integer literals with no modulus and bind to one on first contact with a
//! bound element; generic polynomial code never notices.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;

/// An element of F_p for an odd machine-word prime p, or an unbound integer
/// literal when `modulus == 0`.
#[derive(Clone, Copy)]
pub struct PrimeFieldElement {
    /// Residue in `0..modulus` when bound; raw `i64` bit pattern when unbound.
    value: u64,
    modulus: u64,
}

pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = 37u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeFieldElement {
    /// Residue of `n` mod `p`. Requires `p` odd prime below `MAX_MODULUS`
    /// (char 2 never occurs here: all curves are y^2 = f(x) models).
    pub fn new(n: i64, p: u64) -> Result<Self> {
        if p < 3 || p >= MAX_MODULUS || !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeFieldElement {
            value: n.rem_euclid(p as i64) as u64,
            modulus: p,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Canonical residue in `0..p`. Panics on unbound literals.
    pub fn residue(&self) -> u64 {
        assert!(self.modulus != 0, "unbound prime field literal");
        self.value
    }

    fn bind(&self, p: u64) -> Self {
        if self.modulus != 0 {
            assert_eq!(self.modulus, p, "prime field modulus mismatch");
            *self
        } else {
            PrimeFieldElement {
                value: (self.value as i64).rem_euclid(p as i64) as u64,
                modulus: p,
            }
        }
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        match (a.modulus, b.modulus) {
            (0, 0) => (*a, *b),
            (0, p) => (a.bind(p), *b),
            (p, 0) => (*a, b.bind(p)),
            (p, q) => {
                assert_eq!(p, q, "prime field modulus mismatch");
                (*a, *b)
            }
        }
    }

    fn lit(n: i64) -> Self {
        PrimeFieldElement {
            value: n as u64,
            modulus: 0,
        }
    }
}

impl PartialEq for PrimeFieldElement {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::unify(self, other);
        if a.modulus == 0 {
            a.value as i64 == b.value as i64
        } else {
            a.value == b.value
        }
    }
}

impl Eq for PrimeFieldElement {}

impl Field for PrimeFieldElement {
    fn zero() -> Self {
        Self::lit(0)
    }

    fn one() -> Self {
        Self::lit(1)
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn add(&self, rhs: &Self) -> Self {
        let (a, b) = Self::unify(self, rhs);
        if a.modulus == 0 {
            Self::lit((a.value as i64).wrapping_add(b.value as i64))
        } else {
            PrimeFieldElement {
                value: (a.value + b.value) % a.modulus,
                modulus: a.modulus,
            }
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = Self::unify(self, rhs);
        if a.modulus == 0 {
            Self::lit((a.value as i64).wrapping_mul(b.value as i64))
        } else {
            PrimeFieldElement {
                value: ((a.value as u128 * b.value as u128) % a.modulus as u128) as u64,
                modulus: a.modulus,
            }
        }
    }

    fn neg(&self) -> Self {
        if self.modulus == 0 {
            Self::lit(-(self.value as i64))
        } else if self.value == 0 {
            *self
        } else {
            PrimeFieldElement {
                value: self.modulus - self.value,
                modulus: self.modulus,
            }
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.modulus == 0 {
            // integer units are units modulo every prime; anything else has
            // no modulus-free inverse
            return match self.value as i64 {
                0 => None,
                1 | -1 => Some(*self),
                n => panic!("cannot invert unbound literal {n}"),
            };
        }
        if self.value == 0 {
            return None;
        }
        // extended Euclid on (value, modulus)
        let p = self.modulus as i64;
        let (mut r0, mut r1) = (self.value as i64, p);
        let (mut s0, mut s1) = (1i64, 0i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1, "modulus must be prime");
        Some(PrimeFieldElement {
            value: s0.rem_euclid(p) as u64,
            modulus: self.modulus,
        })
    }

    fn from_i64(n: i64) -> Self {
        Self::lit(n)
    }
}

impl fmt::Display for PrimeFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modulus == 0 {
            write!(f, "{}", self.value as i64)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl fmt::Debug for PrimeFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime_u64(5));
        assert!(is_prime_u64(104729));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(104730));
    }

    #[test]
    fn arithmetic_mod_7() {
        let a = PrimeFieldElement::new(5, 7).unwrap();
        let b = PrimeFieldElement::new(4, 7).unwrap();
        assert_eq!(a.add(&b).residue(), 2);
        assert_eq!(a.mul(&b).residue(), 6);
        assert_eq!(a.inv().unwrap().residue(), 3); // 5*3 = 15 = 1 mod 7
        assert_eq!(a.sub(&b).residue(), 1);
        assert!(PrimeFieldElement::new(0, 7).unwrap().inv().is_none());
    }

    #[test]
    fn literals_bind_on_contact() {
        let a = PrimeFieldElement::new(3, 11).unwrap();
        let two = PrimeFieldElement::from_i64(2);
        assert_eq!(two.mul(&a).residue(), 6);
        let minus_one = PrimeFieldElement::from_i64(-1);
        assert_eq!(minus_one.add(&a).residue(), 2);
        assert_eq!(minus_one.mul(&a), a.neg());
    }

    #[test]
    fn inverse_round_trip_small_primes() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for v in 1..p.min(40) {
                let e = PrimeFieldElement::new(v as i64, p).unwrap();
                assert!(e.mul(&e.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(PrimeFieldElement::new(1, 4).is_err());
        assert!(PrimeFieldElement::new(1, 2).is_err());
    }
}
