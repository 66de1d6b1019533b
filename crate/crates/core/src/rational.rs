//! Exact rational numbers.
//!
//! Thin wrapper around `num_rational::BigRational` pinning down the
//! representation contract: denominator positive, fraction reduced. The
//! wrapper also owns the wire format (`"num/den"` strings) and the exact
//! square-root test used by the independence certificates.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("rational construction"));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// `num/den` reduced, denominator positive.
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Exact square root if this is a square in Q.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational(BigRational::new(n, d)))
        } else {
            None
        }
    }

    pub fn is_square(&self) -> bool {
        self.sqrt_exact().is_some()
    }

    /// Naive multiplicative height max(|num|, |den|).
    pub fn height_big(&self) -> BigInt {
        let n = self.numer().abs();
        let d = self.denom().abs();
        if n > d {
            n
        } else {
            d
        }
    }

    /// log max(|num|, |den|), the naive logarithmic height.
    pub fn log_height(&self) -> f64 {
        log_bigint(&self.height_big())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

/// log of a positive big integer, stable for thousands of digits.
pub fn log_bigint(n: &BigInt) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let n = n.abs();
    let bits = n.bits();
    if bits <= 52 {
        let v: f64 = n.to_string().parse().unwrap();
        return v.ln();
    }
    // keep the top 64 bits as mantissa, track the shifted-out exponent
    let shift = bits - 52;
    let top = &n >> shift;
    let v: f64 = top.to_string().parse().unwrap();
    v.ln() + (shift as f64) * std::f64::consts::LN_2
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let n = r.numer().abs();
    let d = r.denom().clone();
    if n.is_zero() {
        return 0.0;
    }
    let ln = log_bigint(&n) - log_bigint(&d);
    if ln > 700.0 {
        return sign * f64::INFINITY;
    }
    if ln < -700.0 {
        return 0.0;
    }
    sign * ln.exp()
}

impl Field for Rational {
    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }

    fn neg(&self) -> Self {
        Rational(-self.0.clone())
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"a"` or `"a/b"` with optional sign.
    fn from_str(s: &str) -> Result<Self> {
        let parse_int = |part: &str| -> Result<BigInt> {
            BigInt::from_str(part.trim())
                .map_err(|_| Error::Json(format!("bad rational literal {s:?}")))
        };
        match s.split_once('/') {
            None => Ok(Rational(BigRational::from_integer(parse_int(s)?))),
            Some((n, d)) => {
                let den = parse_int(d)?;
                if den.is_zero() {
                    return Err(Error::DivisionByZero("rational literal"));
                }
                Ok(Rational(BigRational::new(parse_int(n)?, den)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Rational;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"num/den\" string or integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
                Ok(Rational::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
                Ok(Rational::from_bigint(BigInt::from(v)))
            }
        }
        deserializer.deserialize_any(V)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

/// Sign of the numerator: -1, 0, or 1.
pub fn sign_i32(r: &Rational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// gcd of two big integers (absolute value).
pub fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}
