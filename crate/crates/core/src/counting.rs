//! Point counts over small prime fields and the torsion sieve built on them.
//!
//! Orders |J(F_p)| are computed from naive counts of the curve over F_p and
//! F_{p^2} through the L-polynomial; only genus <= 2 is supported, which is
//! all the fiberwise checks need. The gcd of several good orders bounds the
//! rational torsion, giving a cheap non-torsion witness.

use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::jacobian::{embed, scalar_mul, MumfordDivisor};
use crate::primefield::{is_prime_u64, PrimeFieldElement};
use crate::rational::Rational;

/// Reduce a rational number mod p; fails when p divides the denominator.
pub fn reduce_rational_mod_p(r: &Rational, p: u64) -> Result<PrimeFieldElement> {
    let pb = num_bigint::BigInt::from(p);
    let num = r.numer() % &pb;
    let den = r.denom() % &pb;
    let num_i = i64::try_from(num).expect("residue fits");
    let den_i = i64::try_from(den).expect("residue fits");
    let den_el = PrimeFieldElement::new(den_i, p)?;
    let den_inv = den_el.inv().ok_or(Error::BadSpecialization {
        t0: r.to_string(),
        reason: format!("denominator divisible by {p}"),
    })?;
    Ok(PrimeFieldElement::new(num_i, p)?.mul(&den_inv))
}

/// Reduction of the model mod p; errors if the reduction is singular or a
/// coefficient has a pole at p.
pub fn reduce_curve_mod_p(
    curve: &HyperellipticCurve<Rational>,
    p: u64,
) -> Result<HyperellipticCurve<PrimeFieldElement>> {
    curve.map_model(|c| reduce_rational_mod_p(c, p))
}

/// Euler criterion: 1 if square and nonzero, 0 if zero, -1 otherwise.
fn chi(v: &PrimeFieldElement, p: u64) -> i64 {
    if v.is_zero() {
        return 0;
    }
    let mut e = (p - 1) / 2;
    let mut base = *v;
    let mut acc = PrimeFieldElement::new(1, p).unwrap();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    if acc.residue() == 1 {
        1
    } else {
        -1
    }
}

/// |C(F_p)| including the single point at infinity.
pub fn curve_point_count(curve: &HyperellipticCurve<PrimeFieldElement>, p: u64) -> u64 {
    let mut count = 1u64; // infinity
    for x in 0..p {
        let xe = PrimeFieldElement::new(x as i64, p).unwrap();
        let v = curve.f().eval(&xe);
        count += (1 + chi(&v, p)) as u64;
    }
    count
}

// --- arithmetic in F_{p^2} = F_p(sqrt(d)), d a fixed non-residue ------------

#[derive(Clone, Copy, PartialEq, Eq)]
struct Fp2 {
    a: u64,
    b: u64, // a + b sqrt(d)
}

struct Fp2Ctx {
    p: u64,
    d: u64,
}

impl Fp2Ctx {
    fn new(p: u64) -> Self {
        let d = (2..p)
            .find(|&d| chi(&PrimeFieldElement::new(d as i64, p).unwrap(), p) == -1)
            .expect("odd prime field has a non-residue");
        Fp2Ctx { p, d }
    }

    fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2 {
            a: (x.a + y.a) % self.p,
            b: (x.b + y.b) % self.p,
        }
    }

    fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let p = self.p as u128;
        let (xa, xb, ya, yb) = (x.a as u128, x.b as u128, y.a as u128, y.b as u128);
        let a = (xa * ya + xb * yb % p * (self.d as u128)) % p;
        let b = (xa * yb + xb * ya) % p;
        Fp2 {
            a: a as u64,
            b: b as u64,
        }
    }

    fn is_zero(&self, x: Fp2) -> bool {
        x.a == 0 && x.b == 0
    }

    /// Square test via the norm: x is a square in F_{p^2} iff
    /// Norm(x) = a^2 - d b^2 is a square in F_p (norm of a non-square is a
    /// non-square because the norm map is surjective onto F_p^*).
    fn is_square(&self, x: Fp2) -> bool {
        if self.is_zero(x) {
            return true;
        }
        let p = self.p as u128;
        let a2 = (x.a as u128 * x.a as u128) % p;
        let db2 = (self.d as u128 * x.b as u128 % p) * x.b as u128 % p;
        let norm = (a2 + p - db2) % p;
        let n = PrimeFieldElement::new(norm as i64, self.p).unwrap();
        chi(&n, self.p) >= 0
    }

    fn eval_poly(&self, coeffs: &[u64], x: Fp2) -> Fp2 {
        let mut acc = Fp2 { a: 0, b: 0 };
        for &c in coeffs.iter().rev() {
            acc = self.mul(acc, x);
            acc = self.add(acc, Fp2 { a: c, b: 0 });
        }
        acc
    }
}

/// |C(F_{p^2})| by exhaustive enumeration.
fn curve_point_count_fp2(curve: &HyperellipticCurve<PrimeFieldElement>, p: u64) -> u64 {
    let ctx = Fp2Ctx::new(p);
    let coeffs: Vec<u64> = curve.f().coeffs().iter().map(|c| c.residue()).collect();
    let mut count = 1u64;
    for a in 0..p {
        for b in 0..p {
            let x = Fp2 { a, b };
            let v = ctx.eval_poly(&coeffs, x);
            if ctx.is_zero(v) {
                count += 1;
            } else if ctx.is_square(v) {
                count += 2;
            }
        }
    }
    count
}

/// |J(F_p)| for genus 1 or 2, through the L-polynomial.
pub fn jacobian_order_mod_p(curve: &HyperellipticCurve<PrimeFieldElement>, p: u64) -> Result<u64> {
    if !is_prime_u64(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    let n1 = curve_point_count(curve, p) as i128;
    let p_i = p as i128;
    match curve.genus() {
        1 => Ok(n1 as u64),
        2 => {
            let n2 = curve_point_count_fp2(curve, p) as i128;
            let t1 = p_i + 1 - n1; // sum of Frobenius eigenvalues
            let t2 = p_i * p_i + 1 - n2; // sum of squares
            let e1 = t1;
            let e2 = (t1 * t1 - t2) / 2;
            // L(1) = 1 - e1 + e2 - p e1 + p^2
            let order = 1 - e1 + e2 - p_i * e1 + p_i * p_i;
            u64::try_from(order).map_err(|_| {
                Error::Internal(format!("negative Jacobian order {order} from counts"))
            })
        }
        g => Err(Error::Internal(format!(
            "jacobian_order_mod_p supports genus <= 2, got {g}"
        ))),
    }
}

/// Odd primes below `bound` where the curve has good reduction.
pub fn good_primes(curve: &HyperellipticCurve<Rational>, bound: u64) -> Vec<u64> {
    (3..bound)
        .filter(|&p| is_prime_u64(p))
        .filter(|&p| reduce_curve_mod_p(curve, p).is_ok())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionVerdict {
    NonTorsion,
    Torsion,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NontorsionWitness {
    pub primes: Vec<u64>,
    pub orders: Vec<u64>,
    pub torsion_bound: u64,
    pub verdict: TorsionVerdict,
}

/// Decide non-torsion of a point over Q by reduction: rational torsion
/// injects into J(F_p) at good odd p, so its order divides every good order.
/// If B = gcd of the orders and B * class != 0, the class is non-torsion.
pub fn nontorsion_witness(
    curve: &HyperellipticCurve<Rational>,
    point: &CurvePoint<Rational>,
    primes: &[u64],
) -> Result<NontorsionWitness> {
    nontorsion_witness_class(curve, &embed(curve, point)?, primes)
}

/// The same sieve for a divisor class given directly.
pub fn nontorsion_witness_class(
    curve: &HyperellipticCurve<Rational>,
    class: &MumfordDivisor<Rational>,
    primes: &[u64],
) -> Result<NontorsionWitness> {
    let good: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| reduce_curve_mod_p(curve, p).is_ok())
        .collect();
    if good.len() < 3 {
        return Err(Error::NoGoodPrimes(format!(
            "need at least 3 good primes, got {} from {primes:?}",
            good.len()
        )));
    }
    let mut orders = Vec::new();
    for &p in &good {
        let cp = reduce_curve_mod_p(curve, p)?;
        orders.push(jacobian_order_mod_p(&cp, p)?);
    }
    let bound = orders.iter().fold(0u64, |acc, &o| num_integer::gcd(acc, o));
    let verdict = if class.is_identity() {
        TorsionVerdict::Torsion
    } else if scalar_mul(curve, bound as i64, class)?.is_identity() {
        TorsionVerdict::Inconclusive
    } else {
        TorsionVerdict::NonTorsion
    };
    Ok(NontorsionWitness {
        primes: good,
        orders,
        torsion_bound: bound,
        verdict,
    })
}

/// Reduce a Mumford representative coefficientwise mod p. Fails when p
/// divides a denominator or the reduced pair is not a valid representative
/// on the reduced curve.
pub fn reduce_class_mod_p(
    curve_p: &HyperellipticCurve<PrimeFieldElement>,
    class: &MumfordDivisor<Rational>,
    p: u64,
) -> Result<MumfordDivisor<PrimeFieldElement>> {
    let u = class.u().map_coeffs(|c| reduce_rational_mod_p(c, p))?;
    let v = class.v().map_coeffs(|c| reduce_rational_mod_p(c, p))?;
    MumfordDivisor::new(curve_p, u, v)
}

/// Exact order of a class in J(F_p), by iterated addition. `cap` guards
/// against runaway loops; it should exceed the Weil bound (1 + sqrt(p))^2g.
pub fn class_order(
    curve: &HyperellipticCurve<PrimeFieldElement>,
    class: &MumfordDivisor<PrimeFieldElement>,
    cap: u64,
) -> Result<u64> {
    let mut acc = class.clone();
    let mut n = 1u64;
    while !acc.is_identity() {
        if n >= cap {
            return Err(Error::Internal(format!(
                "class order exceeded cap {cap}; cap below the group order?"
            )));
        }
        acc = crate::jacobian::cantor_add(curve, &acc, class)?;
        n += 1;
    }
    Ok(n)
}

/// Non-torsion witness for a single class based on exact reduced orders.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassOrderWitness {
    pub primes: Vec<u64>,
    pub class_orders: Vec<u64>,
    pub verdict: TorsionVerdict,
    pub detail: String,
}

/// Upper bound for |J(F_p)| from the Weil interval, with slack.
fn weil_order_cap(genus: usize, p: u64) -> u64 {
    let s = (p as f64).sqrt() + 1.0;
    s.powi(2 * genus as i32) as u64 * 2 + 16
}

/// Genus-agnostic non-torsion test. At a good odd prime the reduction map
/// is injective on rational torsion, so a torsion class has the same exact
/// order at every usable prime. Distinct reduced orders prove non-torsion;
/// a common order N is settled by computing N·class over Q exactly.
pub fn nontorsion_witness_by_orders(
    curve: &HyperellipticCurve<Rational>,
    class: &MumfordDivisor<Rational>,
    primes: &[u64],
) -> Result<ClassOrderWitness> {
    if class.is_identity() {
        return Ok(ClassOrderWitness {
            primes: vec![],
            class_orders: vec![],
            verdict: TorsionVerdict::Torsion,
            detail: "identity class".into(),
        });
    }
    let mut used = Vec::new();
    let mut orders = Vec::new();
    for &p in primes {
        let Ok(cp) = reduce_curve_mod_p(curve, p) else {
            continue;
        };
        let Ok(clp) = reduce_class_mod_p(&cp, class, p) else {
            continue;
        };
        match class_order(&cp, &clp, weil_order_cap(cp.genus(), p)) {
            Ok(n) => {
                used.push(p);
                orders.push(n);
            }
            Err(_) => continue,
        }
    }
    if used.len() < 2 {
        return Err(Error::NoGoodPrimes(format!(
            "order witness needs two usable primes from {primes:?}, got {}",
            used.len()
        )));
    }
    if orders.windows(2).any(|w| w[0] != w[1]) {
        let detail = format!("reduced orders {orders:?} at primes {used:?} disagree");
        return Ok(ClassOrderWitness {
            primes: used,
            class_orders: orders,
            verdict: TorsionVerdict::NonTorsion,
            detail,
        });
    }
    let n = orders[0];
    let over_q = scalar_mul(curve, n as i64, class)?;
    let (verdict, detail) = if over_q.is_identity() {
        (
            TorsionVerdict::Torsion,
            format!("class has exact order {n} over Q"),
        )
    } else {
        (
            TorsionVerdict::NonTorsion,
            format!("common reduced order {n}, but {n}*class != 0 over Q"),
        )
    };
    Ok(ClassOrderWitness {
        primes: used,
        class_orders: orders,
        verdict,
        detail,
    })
}
