//! Field abstraction shared by the coefficient towers.
//!
//! Everything downstream (polynomials, curves, Cantor arithmetic) is generic
//! over this trait so the same code runs over Q, Q(t), Q(s) and F_p.

use std::fmt::{Debug, Display};

/// An exact field. Implementations must have a canonical representation so
/// that `==` decides equality of field elements.
pub trait Field: Clone + PartialEq + Eq + Debug + Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` exactly for zero.
    fn inv(&self) -> Option<Self>;
    /// Canonical image of a small integer.
    fn from_i64(n: i64) -> Self;

    fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self.mul(&r))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn double(&self) -> Self {
        self.add(self)
    }

    fn square(&self) -> Self {
        self.mul(self)
    }
}
