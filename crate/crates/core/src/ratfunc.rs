//! The rational function field Q(t).
//!
//! One concrete type serves both Q(t) and Q(s); the variable name is purely
//! notational and chosen by the caller at display time. Fractions are kept
//! reduced with monic denominator, so equality is structural.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{Polynomial, SquareRootField};
use crate::rational::Rational;

pub type QPoly = Polynomial<Rational>;

#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: QPoly,
    den: QPoly,
}

impl RationalFunction {
    /// num/den, reduced, monic denominator. Errors on zero denominator.
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("rational function construction"));
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                num: QPoly::zero(),
                den: QPoly::one(),
            });
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let (den, lc) = den.monic();
        let num = num.scale(&lc.inv().expect("nonzero"));
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: QPoly) -> Self {
        Self::new(p, QPoly::one()).expect("denominator one")
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_poly(QPoly::constant(c))
    }

    /// The generator t of Q(t).
    pub fn t() -> Self {
        Self::from_poly(QPoly::x())
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The underlying polynomial when the denominator is 1.
    pub fn as_polynomial(&self) -> Result<&QPoly> {
        if self.is_polynomial() {
            Ok(&self.num)
        } else {
            Err(Error::Internal(format!(
                "expected polynomial, got denominator {}",
                self.den
            )))
        }
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.deg() == 0
    }

    /// Evaluate at t = t0; errors at poles.
    pub fn eval(&self, t0: &Rational) -> Result<Rational> {
        let d = self.den.eval(t0);
        if d.is_zero() {
            return Err(Error::BadSpecialization {
                t0: t0.to_string(),
                reason: "pole of a coefficient".into(),
            });
        }
        Ok(self.num.eval(t0).div(&d).expect("nonzero"))
    }

    /// Substitute t -> phi(t) for another rational function phi.
    pub fn compose(&self, phi: &RationalFunction) -> Result<Self> {
        let lift = |c: &Rational| RationalFunction::from_rational(c.clone());
        let n = self.num.eval_with(lift, phi);
        let d = self.den.eval_with(lift, phi);
        if d.is_zero() {
            return Err(Error::DivisionByZero("substitution hit a pole"));
        }
        n.div(&d).ok_or(Error::DivisionByZero("substitution hit a pole"))
    }
}

impl Field for RationalFunction {
    fn zero() -> Self {
        Self::from_poly(QPoly::zero())
    }

    fn one() -> Self {
        Self::from_poly(QPoly::one())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        let num = self
            .num
            .mul(&rhs.den)
            .add(&rhs.num.mul(&self.den));
        let den = self.den.mul(&rhs.den);
        Self::new(num, den).expect("nonzero denominator")
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        Self::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den)).expect("nonzero denominator")
    }

    fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::new(self.den.clone(), self.num.clone()).expect("nonzero"))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(Rational::from_int(n))
    }
}

impl SquareRootField for Rational {
    fn sqrt(&self) -> Option<Self> {
        self.sqrt_exact()
    }
}

impl SquareRootField for RationalFunction {
    fn sqrt(&self) -> Option<Self> {
        // n/d reduced is a square in Q(t) iff n*d is a square in Q[t]
        let root = self.num.mul(&self.den).sqrt_exact()?;
        Some(Self::new(root, self.den.clone()).expect("nonzero denominator"))
    }
}

/// Outcome of the exact square test in Q(t).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SquareTest {
    Square { root: WireRatFunc },
    NotSquare { reason: String },
}

impl SquareTest {
    pub fn is_square(&self) -> bool {
        matches!(self, SquareTest::Square { .. })
    }
}

/// Decides whether r is a square in Q(t), with witness or obstruction.
pub fn is_square_in_function_field(r: &RationalFunction) -> SquareTest {
    if r.is_zero() {
        return SquareTest::Square {
            root: WireRatFunc::from(&RationalFunction::zero()),
        };
    }
    let nd = r.num().mul(r.den());
    let d = nd.deg();
    if d % 2 != 0 {
        return SquareTest::NotSquare {
            reason: format!("odd degree {d}: an odd-degree element has no square root"),
        };
    }
    if nd.lc().sqrt_exact().is_none() {
        return SquareTest::NotSquare {
            reason: format!("leading coefficient {} is not a square in Q", nd.lc()),
        };
    }
    match r.sqrt() {
        Some(root) => SquareTest::Square {
            root: WireRatFunc::from(&root),
        },
        None => SquareTest::NotSquare {
            reason: "coefficient obstruction: no polynomial square root matches".into(),
        },
    }
}

/// Wire form of a rational function: ascending numerator and denominator
/// coefficient lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireRatFunc {
    pub num: Vec<Rational>,
    pub den: Vec<Rational>,
}

impl From<&RationalFunction> for WireRatFunc {
    fn from(r: &RationalFunction) -> Self {
        WireRatFunc {
            num: r.num().coeffs().to_vec(),
            den: r.den().coeffs().to_vec(),
        }
    }
}

impl TryFrom<&WireRatFunc> for RationalFunction {
    type Error = Error;

    fn try_from(w: &WireRatFunc) -> Result<Self> {
        RationalFunction::new(
            QPoly::new(w.num.clone()),
            QPoly::new(w.den.clone()),
        )
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireRatFunc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WireRatFunc::deserialize(d)?;
        RationalFunction::try_from(&w).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "[{}] / [{}]", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(QPoly::from_i64(num), QPoly::from_i64(den)).unwrap()
    }

    #[test]
    fn normalization() {
        // (2t^2 - 2) / (4t - 4) = (t + 1) / 2
        let r = rf(&[-2, 0, 2], &[-4, 4]);
        assert_eq!(r, rf(&[1, 1], &[2]));
        assert!(r.is_polynomial());
        assert!(RationalFunction::new(QPoly::one(), QPoly::zero()).is_err());
    }

    #[test]
    fn field_ops_reduce() {
        let a = rf(&[0, 1], &[1]); // t
        let inv = a.inv().unwrap(); // 1/t
        assert!(a.mul(&inv).is_one());
        let s = a.add(&inv); // (t^2+1)/t
        assert_eq!(s, rf(&[1, 0, 1], &[0, 1]));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn eval_and_poles() {
        let r = rf(&[1, 1], &[-2, 1]); // (t+1)/(t-2)
        assert_eq!(r.eval(&Rational::from_int(3)).unwrap(), Rational::from_int(4));
        assert!(r.eval(&Rational::from_int(2)).is_err());
    }

    #[test]
    fn compose_substitution() {
        // r(t) = t^2, phi(t) = -t: r(phi) = t^2
        let r = rf(&[0, 0, 1], &[1]);
        let phi = rf(&[0, -1], &[1]);
        assert_eq!(r.compose(&phi).unwrap(), r);
        // r(t) = t, phi = c/t: composition is c/t
        let c_over_t = rf(&[6], &[0, 1]);
        assert_eq!(rf(&[0, 1], &[1]).compose(&c_over_t).unwrap(), c_over_t);
    }

    #[test]
    fn square_test_witnesses() {
        // t^2 is a square with root t
        let sq = is_square_in_function_field(&rf(&[0, 0, 1], &[1]));
        match sq {
            SquareTest::Square { root } => {
                let r = RationalFunction::try_from(&root).unwrap();
                assert_eq!(r.mul(&r), rf(&[0, 0, 1], &[1]));
            }
            _ => panic!("t^2 must be a square"),
        }
        // t^2 + 1 is not
        assert!(!is_square_in_function_field(&rf(&[1, 0, 1], &[1])).is_square());
        // -(t^3 - t) has odd degree
        match is_square_in_function_field(&rf(&[0, 1, 0, -1], &[1])) {
            SquareTest::NotSquare { reason } => assert!(reason.contains("odd degree")),
            _ => panic!("odd degree cannot be a square"),
        }
        // 1/t^2 is a square
        assert!(is_square_in_function_field(&rf(&[1], &[0, 0, 1])).is_square());
        // 2 is not a square in Q(t)
        assert!(!is_square_in_function_field(&rf(&[2], &[1])).is_square());
        // (t^2-2t+1)/(t^4): root (t-1)/t^2
        let r = rf(&[1, -2, 1], &[0, 0, 0, 0, 1]);
        match is_square_in_function_field(&r) {
            SquareTest::Square { root } => {
                let root = RationalFunction::try_from(&root).unwrap();
                assert_eq!(root.square(), r);
            }
            _ => panic!("must be square"),
        }
    }
}
