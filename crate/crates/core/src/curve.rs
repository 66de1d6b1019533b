//! Odd-degree hyperelliptic curve models y^2 = f(x).
//!
//! Only odd degree is supported: there is then a single rational point at
//! infinity, which every divisor class is supported against. Constructors
//! enforce nonzero discriminant, so a curve value is always nonsingular.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::Polynomial;

#[derive(Clone, PartialEq, Eq)]
pub struct HyperellipticCurve<F: Field> {
    f: Polynomial<F>,
    genus: usize,
}

impl<F: Field> HyperellipticCurve<F> {
    /// y^2 = f(x) with f of odd degree d >= 3 and disc(f) != 0.
    pub fn new(f: Polynomial<F>) -> Result<Self> {
        let d = f.degree().ok_or(Error::BadModelDegree(0))?;
        if d < 3 || d % 2 == 0 {
            return Err(Error::BadModelDegree(d));
        }
        if f.discriminant()?.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(HyperellipticCurve {
            f,
            genus: (d - 1) / 2,
        })
    }

    pub fn f(&self) -> &Polynomial<F> {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        2 * self.genus + 1
    }

    pub fn on_curve(&self, p: &CurvePoint<F>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y.square() == self.f.eval(x),
        }
    }

    /// Checked affine point constructor.
    pub fn point(&self, x: F, y: F) -> Result<CurvePoint<F>> {
        let p = CurvePoint::Affine { x, y };
        if self.on_curve(&p) {
            Ok(p)
        } else {
            Err(Error::PointNotOnCurve)
        }
    }

    /// The hyperelliptic involution (x, y) -> (x, -y).
    pub fn involution(&self, p: &CurvePoint<F>) -> CurvePoint<F> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: x.clone(),
                y: y.neg(),
            },
        }
    }

    /// Transport the model through a coefficient-wise field map, revalidating
    /// nonsingularity (this is how specializations and reductions fail on bad
    /// fibers).
    pub fn map_model<G: Field>(
        &self,
        map: impl Fn(&F) -> Result<G>,
    ) -> Result<HyperellipticCurve<G>> {
        HyperellipticCurve::new(self.f.map_coeffs(map)?)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum CurvePoint<F: Field> {
    Affine { x: F, y: F },
    Infinity,
}

impl<F: Field> CurvePoint<F> {
    pub fn affine(x: F, y: F) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn map<G: Field>(&self, map: impl Fn(&F) -> Result<G>) -> Result<CurvePoint<G>> {
        Ok(match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: map(x)?,
                y: map(y)?,
            },
        })
    }
}

impl<F: Field> fmt::Display for CurvePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "infinity"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl<F: Field> fmt::Debug for CurvePoint<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<F: Field> fmt::Display for HyperellipticCurve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = {}", self.f)
    }
}

impl<F: Field> fmt::Debug for HyperellipticCurve<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    type Q = Rational;
    type QPoly = Polynomial<Q>;

    #[test]
    fn genus_from_degree() {
        let c = HyperellipticCurve::new(QPoly::from_i64(&[0, -1, 0, 1])).unwrap();
        assert_eq!(c.genus(), 1);
        let c5 = HyperellipticCurve::new(QPoly::from_i64(&[0, 4, 0, -5, 0, 1])).unwrap();
        assert_eq!(c5.genus(), 2);
    }

    #[test]
    fn rejects_bad_models() {
        // even degree
        assert!(matches!(
            HyperellipticCurve::new(QPoly::from_i64(&[-1, 0, 0, 0, 1])),
            Err(Error::BadModelDegree(4))
        ));
        // degree too small
        assert!(HyperellipticCurve::new(QPoly::from_i64(&[3, 1])).is_err());
        // repeated root
        assert!(matches!(
            HyperellipticCurve::new(
                QPoly::from_roots(&[Q::from_int(1), Q::from_int(1), Q::from_int(0)])
            ),
            Err(Error::SingularCurve)
        ));
    }

    #[test]
    fn membership_and_involution() {
        let c = HyperellipticCurve::new(QPoly::from_i64(&[0, -1, 0, 1])).unwrap();
        // f(2) = 6, so y = 0 is wrong at x = 2
        assert!(c.point(Q::from_int(2), Q::from_int(0)).is_err());
        let w = c.point(Q::from_int(0), Q::from_int(0)).unwrap();
        assert!(c.on_curve(&w));
        assert_eq!(c.involution(&w), w); // Weierstrass points are fixed
        let inf = CurvePoint::Infinity;
        assert!(c.on_curve(&inf));
        assert_eq!(c.involution(&inf), inf);
    }
}
