//! Canonical heights on integral genus-1 models, height-pairing Gram
//! matrices, and an exact small-relation search.
//!
//! The canonical height is computed as the doubling limit lim h(2ⁿP)/4ⁿ with
//! exact big-rational point doubling and the naive height h = log max(|num|,
//! |den|) of the x-coordinate. The error constant is explicit: writing
//! x(2P) = Φ/Ψ with the duplication polynomials, two Bezout identities bound
//! both the coefficient growth and the worst-case cancellation gcd(Φ, Ψ),
//! giving |h(2P) − 4h(P)| ≤ 3·C with C recorded per curve. The identities
//! themselves are re-verified exactly, as polynomial identities, every time
//! the constant is computed.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::rational::Rational;
use crate::ratfunc::QPoly;
use crate::weierstrass::{ec_add, ec_scalar_mul};

/// Point with rational coordinates on an integral short Weierstrass model.
pub type QPoint = CurvePoint<Rational>;
/// Genus-1 curve over Q.
pub type QCurve = HyperellipticCurve<Rational>;

/// Largest torsion order on a genus-1 curve over Q.
const MAX_TORSION_ORDER: i64 = 12;

/// A genus-1 curve put in the form y² = x³ + Ax + B with integers A, B,
/// together with the substitution that got it there.
#[derive(Clone, Debug)]
pub struct IntegralModel {
    pub a: BigInt,
    pub b: BigInt,
    pub curve: QCurve,
    /// x ↦ x + shift removes the quadratic term first (shift = a₂/3).
    pub shift: Rational,
    /// (x, y) ↦ (u²x, u³y) clears denominators; u is a positive integer.
    pub u: BigInt,
}

impl IntegralModel {
    /// Build from any monic genus-1 model y² = x³ + a₂x² + a₁x + a₀ over Q.
    pub fn from_curve(c: &QCurve) -> Result<Self> {
        if c.genus() != 1 {
            return Err(Error::BadHeightInput(format!(
                "integral models are for genus 1, got genus {}",
                c.genus()
            )));
        }
        let f = c.f();
        if !f.lc().is_one() {
            return Err(Error::BadHeightInput(
                "integral models need a monic cubic".into(),
            ));
        }
        // depress the cubic: x ↦ x − a₂/3
        let third = Rational::new(1.into(), 3.into()).expect("3 != 0");
        let shift = f.coeff(2).mul(&third);
        let x_minus = QPoly::new(vec![shift.neg(), Rational::one()]);
        let dep = f.compose(&x_minus);
        debug_assert!(dep.coeff(2).is_zero());
        let (a_rat, b_rat) = (dep.coeff(1), dep.coeff(0));

        // least positive u with u⁴·a and u⁶·b integral
        let mut u = BigInt::from(1);
        let mut den = a_rat.denom() * b_rat.denom();
        let mut l = BigInt::from(2);
        while den > BigInt::from(1) {
            let mut e4 = 0u32; // v_l(den(a))
            let mut e6 = 0u32; // v_l(den(b))
            let mut da = a_rat.denom().clone();
            while (&da % &l).is_zero() {
                da /= &l;
                e4 += 1;
            }
            let mut db = b_rat.denom().clone();
            while (&db % &l).is_zero() {
                db /= &l;
                e6 += 1;
            }
            let e = (e4.div_ceil(4)).max(e6.div_ceil(6));
            u *= l.pow(e);
            while (&den % &l).is_zero() {
                den /= &l;
            }
            l += 1;
        }
        let u4 = Rational::from_bigint(u.pow(4));
        let u6 = Rational::from_bigint(u.pow(6));
        let a_int = a_rat.mul(&u4);
        let b_int = b_rat.mul(&u6);
        debug_assert!(a_int.denom().is_one() && b_int.denom().is_one());
        let a = a_int.numer().clone();
        let b = b_int.numer().clone();

        let curve = QCurve::new(QPoly::new(vec![
            Rational::from_bigint(b.clone()),
            Rational::from_bigint(a.clone()),
            Rational::zero(),
            Rational::one(),
        ]))?;
        Ok(IntegralModel {
            a,
            b,
            curve,
            shift,
            u,
        })
    }

    /// Carry a point of the original model onto the integral model.
    pub fn transport(&self, p: &QPoint) -> Result<QPoint> {
        let moved = match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let u2 = Rational::from_bigint(self.u.pow(2));
                let u3 = Rational::from_bigint(self.u.pow(3));
                CurvePoint::affine(x.add(&self.shift).mul(&u2), y.mul(&u3))
            }
        };
        if !self.curve.on_curve(&moved) {
            return Err(Error::PointNotOnCurve);
        }
        Ok(moved)
    }

    /// 4A³ + 27B², nonzero on a nonsingular model.
    pub fn delta(&self) -> BigInt {
        BigInt::from(4) * self.a.pow(3) + BigInt::from(27) * self.b.pow(2)
    }
}

/// Tuning for the doubling limit.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HeightSettings {
    /// Hard cap on the number of doublings.
    pub budget: u32,
    /// Stop as soon as the error bound drops below this.
    pub target_error: f64,
    /// Refuse (rather than report a larger bound) when the budget is too
    /// small for the target.
    pub strict: bool,
}

impl Default for HeightSettings {
    fn default() -> Self {
        HeightSettings {
            budget: 6,
            target_error: 1e-3,
            strict: false,
        }
    }
}

/// Canonical-height estimate with its provable error radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightEstimate {
    pub value: f64,
    /// |value − ĥ(P)| ≤ error_bound = c_curve / 4^doublings_used.
    pub error_bound: f64,
    pub doublings_used: u32,
    /// Per-curve constant in the error bound.
    pub c_curve: f64,
    /// Set when P was proved torsion, making the value 0 exactly.
    pub exact_torsion: bool,
}

/// The per-curve constant C with |ĥ − h(2ⁿP)/4ⁿ| ≤ C/4ⁿ.
///
/// With x = m/e in lowest terms and M = max(|m|, e), the duplication
/// formula gives x(2P) = Φ/Ψ with
///   Φ = m⁴ − 2Am²e² − 8Bme³ + A²e⁴,  Ψ = 4e(m³ + Ame² + Be³).
/// Upward: max(|Φ|, |Ψ|) ≤ c_up · M⁴ by the triangle inequality. Downward:
/// the two cofactor identities
///   (3x²+4A)·φ − (3x³−5Ax−27B)·(x³+Ax+B) = δ,
///   W₁·φ + W₂·ψ = 4δx⁷,           δ = 4A³ + 27B²,
/// homogenize to 4δ·e⁷ and 4δ·m⁷ as combinations of Φ and Ψ, so
/// gcd(Φ, Ψ) | 4δ and 4|δ|M⁷ ≤ S·M³·max(|Φ|, |Ψ|) with S the larger
/// cofactor coefficient sum; hence H(2P) ≥ M⁴/S. Together
/// |h(2P) − 4h(P)| ≤ max(ln c_up, ln S) and the geometric tail gives
/// C = max(ln c_up, ln S)/3.
pub fn curve_height_constant(model: &IntegralModel) -> Result<f64> {
    verify_duplication_identities(model)?;
    let (a, b) = (model.a.abs(), model.b.abs());
    let c = BigInt::from;

    // |Φ| ≤ (1 + 2|A| + 8|B| + A²)M⁴, |Ψ| ≤ 4(1 + |A| + |B|)M⁴
    let c_up_phi = c(1) + c(2) * &a + c(8) * &b + a.pow(2);
    let c_up_psi = c(4) * (c(1) + &a + &b);
    let c_up = c_up_phi.max(c_up_psi);

    // coefficient sums of the homogenized cofactor pairs
    let s_e = c(15) + c(21) * &a + c(27) * &b;
    let s_w1 = c(4) * (c(4) * a.pow(3) + c(27) * b.pow(2))
        + c(4) * a.pow(2) * &b
        + c(4) * (c(3) * a.pow(4) + c(22) * &a * b.pow(2))
        + c(4) * (c(3) * a.pow(3) * &b + c(24) * b.pow(3));
    let s_w2 = a.pow(2) * &b
        + c(5) * a.pow(4)
        + c(32) * &a * b.pow(2)
        + c(26) * a.pow(3) * &b
        + c(192) * b.pow(3)
        + c(3) * a.pow(5)
        + c(24) * a.pow(2) * b.pow(2);
    let s = s_e.max(s_w1 + s_w2);

    let worst = c_up.max(s);
    Ok(crate::rational::log_bigint(&worst) / 3.0)
}

/// Check the two cofactor identities exactly as polynomial identities in
/// Q[x] for this curve's A and B. Cheap, and it pins the frozen algebra.
fn verify_duplication_identities(model: &IntegralModel) -> Result<()> {
    let a = Rational::from_bigint(model.a.clone());
    let b = Rational::from_bigint(model.b.clone());
    let q = |n: i64| Rational::from_int(n);
    let delta = q(4).mul(&a.pow(3)).add(&q(27).mul(&b.square()));

    // φ = x⁴ − 2Ax² − 8Bx + A², ψ = 4(x³ + Ax + B)
    let phi = QPoly::new(vec![
        a.square(),
        q(-8).mul(&b),
        q(-2).mul(&a),
        q(0),
        q(1),
    ]);
    let f = QPoly::new(vec![b.clone(), a.clone(), q(0), q(1)]);
    let psi = f.scale(&q(4));

    // (3x² + 4A)·φ − (3x³ − 5Ax − 27B)·f = δ
    let left1 = QPoly::new(vec![q(4).mul(&a), q(0), q(3)]).mul(&phi);
    let left2 = QPoly::new(vec![q(-27).mul(&b), q(-5).mul(&a), q(0), q(3)]).mul(&f);
    if left1.sub(&left2) != QPoly::constant(delta.clone()) {
        return Err(Error::Internal(
            "first duplication cofactor identity failed".into(),
        ));
    }

    // W₁·φ + W₂·ψ = 4δx⁷
    let w1 = QPoly::new(vec![
        q(12).mul(&a.pow(3).mul(&b)).add(&q(96).mul(&b.pow(3))),
        q(12).mul(&a.pow(4)).add(&q(88).mul(&a).mul(&b.square())),
        q(-4).mul(&a.square()).mul(&b),
        q(16).mul(&a.pow(3)).add(&q(108).mul(&b.square())),
    ]);
    let w2 = QPoly::new(vec![
        q(-3).mul(&a.pow(5)).sub(&q(24).mul(&a.square()).mul(&b.square())),
        q(26).mul(&a.pow(3)).mul(&b).add(&q(192).mul(&b.pow(3))),
        q(5).mul(&a.pow(4)).add(&q(32).mul(&a).mul(&b.square())),
        a.square().mul(&b),
    ]);
    let rhs = QPoly::monomial(q(4).mul(&delta), 7);
    if w1.mul(&phi).add(&w2.mul(&psi)) != rhs {
        return Err(Error::Internal(
            "second duplication cofactor identity failed".into(),
        ));
    }
    Ok(())
}

/// Naive height of a point: log max(|num x|, |den x|); 0 at infinity.
pub fn naive_height(p: &QPoint) -> f64 {
    match p {
        CurvePoint::Infinity => 0.0,
        CurvePoint::Affine { x, .. } => x.log_height(),
    }
}

/// Exact torsion test by order: true iff [n]P = O for some n ≤ 12.
pub fn torsion_order(model: &IntegralModel, p: &QPoint) -> Result<Option<i64>> {
    if p.is_infinity() {
        return Ok(Some(1));
    }
    let mut acc = p.clone();
    for n in 2..=MAX_TORSION_ORDER {
        acc = ec_add(&model.curve, &acc, p)?;
        if acc.is_infinity() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Fast necessary condition for torsion on an integral model: integer
/// coordinates with y = 0 or y² dividing 16·|δ|.
fn passes_torsion_screen(model: &IntegralModel, p: &QPoint) -> bool {
    match p {
        CurvePoint::Infinity => true,
        CurvePoint::Affine { x, y } => {
            if !x.denom().is_one() || !y.denom().is_one() {
                return false;
            }
            let ynum = y.numer();
            if ynum.is_zero() {
                return true;
            }
            (BigInt::from(16) * model.delta().abs() % ynum.pow(2)).is_zero()
        }
    }
}

/// Canonical height by the doubling limit, with an explicit error bound.
///
/// Torsion points (order ≤ 12) get an exact 0. Otherwise the number of
/// doublings is the smallest n with c_curve/4ⁿ ≤ target_error, clipped to
/// the budget; in strict mode an insufficient budget is an error instead.
pub fn canonical_height(
    model: &IntegralModel,
    p: &QPoint,
    settings: &HeightSettings,
) -> Result<HeightEstimate> {
    if !model.curve.on_curve(p) {
        return Err(Error::PointNotOnCurve);
    }
    let c_curve = curve_height_constant(model)?;
    if passes_torsion_screen(model, p) {
        if let Some(_order) = torsion_order(model, p)? {
            return Ok(HeightEstimate {
                value: 0.0,
                error_bound: 0.0,
                doublings_used: 0,
                c_curve,
                exact_torsion: true,
            });
        }
    }

    let mut needed = 0u32;
    while c_curve / 4f64.powi(needed as i32) > settings.target_error && needed < 32 {
        needed += 1;
    }
    if needed > settings.budget && settings.strict {
        return Err(Error::DoublingBudgetExceeded {
            budget: settings.budget,
            needed,
        });
    }
    let n = needed.min(settings.budget);

    let mut q = p.clone();
    for _ in 0..n {
        q = ec_add(&model.curve, &q, &q)?;
        if q.is_infinity() {
            // 2-power torsion beyond the screen: exact zero
            return Ok(HeightEstimate {
                value: 0.0,
                error_bound: 0.0,
                doublings_used: 0,
                c_curve,
                exact_torsion: true,
            });
        }
    }
    Ok(HeightEstimate {
        value: naive_height(&q) / 4f64.powi(n as i32),
        error_bound: c_curve / 4f64.powi(n as i32),
        doublings_used: n,
        c_curve,
        exact_torsion: false,
    })
}

/// Height-pairing Gram matrix ⟨P,Q⟩ = (ĥ(P+Q) − ĥ(P) − ĥ(Q))/2 with exact
/// point additions, plus its determinant and the worst entry error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramReport {
    pub matrix: Vec<Vec<f64>>,
    pub det: f64,
    pub max_entry_error: f64,
    pub heights: Vec<HeightEstimate>,
}

impl GramReport {
    /// Numeric independence verdict: determinant clears the tolerance.
    pub fn independent_at(&self, eps: f64) -> bool {
        self.det > eps
    }
}

pub fn gram_matrix(
    model: &IntegralModel,
    points: &[QPoint],
    settings: &HeightSettings,
) -> Result<GramReport> {
    let k = points.len();
    let mut heights = Vec::with_capacity(k);
    for p in points {
        heights.push(canonical_height(model, p, settings)?);
    }
    let mut matrix = vec![vec![0.0f64; k]; k];
    let mut max_err = heights.iter().map(|h| h.error_bound).fold(0.0, f64::max);
    for i in 0..k {
        matrix[i][i] = heights[i].value;
        for j in (i + 1)..k {
            let sum = ec_add(&model.curve, &points[i], &points[j])?;
            let hs = canonical_height(model, &sum, settings)?;
            let pairing =
                (hs.value - heights[i].value - heights[j].value) / 2.0;
            let err = (hs.error_bound
                + heights[i].error_bound
                + heights[j].error_bound)
                / 2.0;
            max_err = max_err.max(err);
            matrix[i][j] = pairing;
            matrix[j][i] = pairing;
        }
    }
    Ok(GramReport {
        det: det(&matrix),
        matrix,
        max_entry_error: max_err,
        heights,
    })
}

/// Determinant by cofactor expansion; the matrices here are at most 4×4.
fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        _ => {
            let mut acc = 0.0;
            for col in 0..n {
                let minor: Vec<Vec<f64>> = (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != col)
                            .map(|c| m[r][c])
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * m[0][col] * det(&minor);
            }
            acc
        }
    }
}

/// Exhaustive search for Σ nᵢPᵢ torsion with |nᵢ| ≤ bound; returns the
/// first relation found (sign-normalized so the leading coefficient is
/// positive) or None. Exact arithmetic throughout.
pub fn small_relation_search(
    model: &IntegralModel,
    points: &[QPoint],
    coeff_bound: i64,
) -> Result<Option<Vec<i64>>> {
    if points.len() > 4 {
        return Err(Error::BadSearch(format!(
            "relation search supports up to 4 points, got {}",
            points.len()
        )));
    }
    if !(1..=20).contains(&coeff_bound) {
        return Err(Error::BadSearch(format!(
            "coefficient bound must be in 1..=20, got {coeff_bound}"
        )));
    }
    for p in points {
        if !model.curve.on_curve(p) {
            return Err(Error::PointNotOnCurve);
        }
    }
    let mut coeffs = vec![0i64; points.len()];
    search_rec(model, points, coeff_bound, 0, &CurvePoint::Infinity, &mut coeffs)
}

/// Depth-first over coefficient vectors whose first nonzero entry is
/// positive, carrying the exact partial sum.
fn search_rec(
    model: &IntegralModel,
    points: &[QPoint],
    bound: i64,
    depth: usize,
    partial: &QPoint,
    coeffs: &mut Vec<i64>,
) -> Result<Option<Vec<i64>>> {
    if depth == points.len() {
        if coeffs.iter().all(|&c| c == 0) {
            return Ok(None);
        }
        let is_relation = partial.is_infinity()
            || (passes_torsion_screen(model, partial)
                && torsion_order(model, partial)?.is_some());
        return Ok(is_relation.then(|| coeffs.clone()));
    }
    let leading_zero_so_far = coeffs[..depth].iter().all(|&c| c == 0);
    let lo = if leading_zero_so_far { 0 } else { -bound };
    for n in lo..=bound {
        coeffs[depth] = n;
        let term = ec_scalar_mul(&model.curve, n, &points[depth])?;
        let next = ec_add(&model.curve, partial, &term)?;
        if let Some(hit) = search_rec(model, points, bound, depth + 1, &next, coeffs)? {
            return Ok(Some(hit));
        }
    }
    coeffs[depth] = 0;
    Ok(None)
}
