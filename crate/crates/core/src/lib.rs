//! Exact arithmetic for rank jumps of hyperelliptic Jacobians under base
//! change.
//!
//! The crate builds a tower of exact coefficient fields (Q, F_p, Q(t)), runs
//! Cantor's algorithm on Mumford representatives over any of them, and uses
//! that machinery to verify section relations for the split families
//! y^2 = p(x) + t^2, produce independence certificates, and survey rank jumps
//! on specialized fibers through Neron-Tate heights.

pub mod error;
pub mod field;
pub mod rational;
pub mod primefield;
pub mod poly;
pub mod ratfunc;
pub mod curve;
pub mod jacobian;
pub mod weierstrass;
pub mod counting;
pub mod factor;
pub mod families;
pub mod surface;
pub mod twotorsion;
pub mod heights;
pub mod conic;
pub mod specialize;

pub use error::{Error, Result};
pub use field::Field;
pub use rational::Rational;
pub use primefield::PrimeFieldElement;
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;
pub use curve::{CurvePoint, HyperellipticCurve};
pub use jacobian::MumfordDivisor;
