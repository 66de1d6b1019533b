//! Base changes of the split families.
//!
//! Three constructions live here:
//!
//! * the *quadratic pullback* record: under the degree-2 cover t ↦ u = t²
//!   the deck involution σ: t ↦ −t negates every section class, so the
//!   σ-fixed part of the section subgroup is 2-torsion and the free rank
//!   seen downstairs is 0, while upstairs it is the full certified 2g;
//! * the *conic base change*: for a new abscissa a with p(a) = c ≠ 0, the
//!   conic v² − t² = c is rationally parametrized by the splitting
//!   (v − t)(v + t) = c with v − t = s, giving t(s) = (c − s²)/(2s) and
//!   v(s) = (c + s²)/(2s) for s ≠ 0. Substituting t ↦ t(s) produces a
//!   family over Q(s) carrying the pulled-back sections P_i = (e_i, t(s))
//!   and one new section P_a = (a, v(s));
//! * the *double base change*: for a biquadratic family and parameters
//!   (a, b), the pair of equations r² = p(a) + t², s² = q(b)·(p(b) + t²)
//!   cuts out an auxiliary curve whose rational points produce fibers where
//!   both layers of the tower gain a section at once.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::counting::{
    nontorsion_witness, nontorsion_witness_by_orders, ClassOrderWitness, NontorsionWitness,
    TorsionVerdict,
};
use crate::curve::{CurvePoint, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::families::{
    lift_to_qt, BiquadraticFamily, CurveTarget, FamilySection, RelationCheck, ShiodaFamily, TCurve,
    TPoly,
};
use crate::field::Field;
use crate::heights::{gram_matrix, small_relation_search, HeightSettings, IntegralModel};
use crate::jacobian::{embed, negate, MumfordDivisor};
use crate::poly::Polynomial;
use crate::ratfunc::RationalFunction;
use crate::rational::Rational;
use crate::twotorsion::{certify_generic_rank, galois_twist_conclusion, TwistConclusion};

type QPoly = Polynomial<Rational>;
type QCurve = HyperellipticCurve<Rational>;
type QPoint = CurvePoint<Rational>;

/// Rational parametrization of the conic v² − t² = c.
#[derive(Clone, Debug)]
pub struct ConicParametrization {
    /// The constant c = p(a); nonzero.
    pub c: Rational,
    /// t(s) = (c − s²)/(2s).
    pub t_of_s: RationalFunction,
    /// v(s) = (c + s²)/(2s).
    pub v_of_s: RationalFunction,
    /// Parameter values where the maps are undefined.
    pub excluded: Vec<Rational>,
}

impl ConicParametrization {
    pub fn new(c: Rational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::BadBaseChange(
                "conic v^2 - t^2 = c needs c != 0".into(),
            ));
        }
        let num_t = QPoly::new(vec![c.clone(), Rational::zero(), Rational::from_int(-1)]);
        let num_v = QPoly::new(vec![c.clone(), Rational::zero(), Rational::from_int(1)]);
        let den = QPoly::from_i64(&[0, 2]);
        let par = ConicParametrization {
            c,
            t_of_s: RationalFunction::new(num_t, den.clone())?,
            v_of_s: RationalFunction::new(num_v, den)?,
            excluded: vec![Rational::zero()],
        };
        if !par.identity_holds() {
            return Err(Error::Internal(
                "conic parametrization identity v(s)^2 - t(s)^2 = c failed".into(),
            ));
        }
        Ok(par)
    }

    /// v(s)² − t(s)² = c, exactly in Q(s).
    pub fn identity_holds(&self) -> bool {
        let diff = self.v_of_s.square().sub(&self.t_of_s.square());
        diff == RationalFunction::from_rational(self.c.clone())
    }

    fn check_excluded(&self, s: &Rational) -> Result<()> {
        if self.excluded.contains(s) {
            return Err(Error::BadBaseChange(format!(
                "s = {s} is excluded by the parametrization"
            )));
        }
        Ok(())
    }

    pub fn t_at(&self, s: &Rational) -> Result<Rational> {
        self.check_excluded(s)?;
        self.t_of_s.eval(s)
    }

    pub fn v_at(&self, s: &Rational) -> Result<Rational> {
        self.check_excluded(s)?;
        self.v_of_s.eval(s)
    }
}

/// Substitute t ↦ −t in a rational function of t.
fn sigma_rf(r: &RationalFunction) -> Result<RationalFunction> {
    RationalFunction::new(r.num().flip_sign(), r.den().flip_sign())
}

/// Apply the involution t ↦ −t coefficientwise to a Mumford representative.
pub fn sigma_class(
    curve: &TCurve,
    class: &MumfordDivisor<RationalFunction>,
) -> Result<MumfordDivisor<RationalFunction>> {
    let u = class.u().map_coeffs(sigma_rf)?;
    let v = class.v().map_coeffs(sigma_rf)?;
    MumfordDivisor::new(curve, u, v)
}

/// Outcome of comparing the section subgroup across the degree-2 cover
/// t ↦ u = t².
#[derive(Clone, Debug, Serialize)]
pub struct QuadraticPullbackRecord {
    pub family: String,
    pub genus: usize,
    /// Free rank of the section subgroup over the subfield Q(u).
    pub rank_over_subfield: usize,
    /// Certified free rank over Q(t).
    pub rank_over_extension: usize,
    pub checks: Vec<RelationCheck>,
    pub narrative: Vec<String>,
}

impl QuadraticPullbackRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Certify that the deck involution σ: t ↦ −t acts as −1 on every section
/// class, forcing rank 0 over Q(u) against the certified rank 2g over Q(t).
pub fn quadratic_pullback(family: &ShiodaFamily) -> Result<QuadraticPullbackRecord> {
    let g = family.genus();
    let d = family.degree();
    let curve = &family.curve;
    let mut checks = Vec::new();

    // the model itself is σ-stable: f = p(x) + t² has only even powers of t
    let f_stable = family
        .curve
        .f()
        .coeffs()
        .iter()
        .all(|c| sigma_rf(c).map(|s| s == *c).unwrap_or(false));
    checks.push(RelationCheck {
        name: "sigma.model-stable".into(),
        claim: "double-cover.model-descends".into(),
        holds: f_stable,
        detail: "f(x, -t) = f(x, t) coefficientwise".into(),
    });

    for i in 0..d {
        let sec = family.section(i);
        let check = (|| -> Result<bool> {
            let class = embed(curve, &sec.point)?;
            let flipped = sigma_class(curve, &class)?;
            let negated = negate(curve, &class)?;
            Ok(flipped == negated)
        })();
        let (holds, detail) = match check {
            Ok(h) => (
                h,
                format!("sigma applied to the Mumford pair of j({})", sec.label),
            ),
            Err(e) => (false, format!("computation failed: {e}")),
        };
        checks.push(RelationCheck {
            name: format!("sigma.negates.j({})", sec.label),
            claim: "double-cover.sigma-acts-as-minus-one".into(),
            holds,
            detail,
        });
    }

    // extension-side leg: the certified generic rank
    let cert = certify_generic_rank(family)?;
    checks.push(RelationCheck {
        name: "extension.certified-rank".into(),
        claim: "double-cover.extension-rank".into(),
        holds: cert.conclusion_rank == Some(2 * g),
        detail: format!(
            "independence certificate concludes rank {:?}, expected {}",
            cert.conclusion_rank,
            2 * g
        ),
    });

    Ok(QuadraticPullbackRecord {
        family: family.describe(),
        genus: g,
        rank_over_subfield: 0,
        rank_over_extension: 2 * g,
        checks,
        narrative: vec![
            "t generates a quadratic extension of Q(u) with u = t^2; the deck involution is sigma: t -> -t".into(),
            "sigma fixes the curve model and sends every section class j(P_i) to -j(P_i) (verified above)".into(),
            "an element of the section subgroup defined over Q(u) is sigma-fixed, hence equal to its own negative, hence 2-torsion".into(),
            format!("the free rank over Q(u) is therefore 0, while over Q(t) it is the certified {}", 2 * g),
        ],
    })
}

/// A conic base change: the family pulled back along t = t(s), with the new
/// section it acquires.
#[derive(Clone, Debug)]
pub struct ConicBaseChange {
    pub parametrization: ConicParametrization,
    pub a: Rational,
    /// y² = p(x) + t(s)² over Q(s).
    pub curve: TCurve,
    /// The new section P_a = (a, v(s)).
    pub new_section: FamilySection,
    /// The pulled-back sections P_i = (e_i, t(s)).
    pub pulled_back: Vec<FamilySection>,
}

/// Pull the family back along the conic parametrization for abscissa `a`.
pub fn conic_base_change(family: &ShiodaFamily, a: &Rational) -> Result<ConicBaseChange> {
    if family.roots.iter().any(|e| e == a) {
        return Err(Error::BadBaseChange(format!(
            "a = {a} is a root of p; the new abscissa must avoid the e_i"
        )));
    }
    let c = family.p.eval(a);
    if c.is_zero() {
        return Err(Error::BadBaseChange(format!(
            "p({a}) = 0: the conic v^2 - t^2 = p(a) degenerates"
        )));
    }
    let par = ConicParametrization::new(c)?;

    let f_s = lift_to_qt(&family.p).add(&TPoly::constant(par.t_of_s.square()));
    let curve = TCurve::new(f_s)?;

    let new_point = CurvePoint::affine(
        RationalFunction::from_rational(a.clone()),
        par.v_of_s.clone(),
    );
    if !curve.on_curve(&new_point) {
        return Err(Error::Internal(
            "new section (a, v(s)) rejected by the on-curve check".into(),
        ));
    }
    let new_section = FamilySection {
        label: "P_a".into(),
        target: CurveTarget::X1,
        point: new_point,
    };

    let mut pulled_back = Vec::new();
    for (idx, e) in family.roots.iter().enumerate() {
        let pt = CurvePoint::affine(
            RationalFunction::from_rational(e.clone()),
            par.t_of_s.clone(),
        );
        if !curve.on_curve(&pt) {
            return Err(Error::Internal(format!(
                "pulled-back section P{} rejected by the on-curve check",
                idx + 1
            )));
        }
        pulled_back.push(FamilySection {
            label: format!("P{}", idx + 1),
            target: CurveTarget::X1,
            point: pt,
        });
    }

    Ok(ConicBaseChange {
        parametrization: par,
        a: a.clone(),
        curve,
        new_section,
        pulled_back,
    })
}

/// One specialization of the new section, with its non-torsion verdict.
#[derive(Clone, Debug, Serialize)]
pub struct SpecializationWitness {
    pub s: Rational,
    pub t: Rational,
    pub x: Rational,
    pub y: Rational,
    pub witness: Option<NontorsionWitness>,
    pub nontorsion: bool,
    pub detail: String,
}

/// Certificate that the new section raises the rank to 2g + 1 over Q(s).
#[derive(Clone, Debug, Serialize)]
pub struct NewSectionCertificate {
    pub family: String,
    pub a: Rational,
    pub c: Rational,
    pub generic_rank: usize,
    pub claimed_rank: usize,
    pub twist: TwistConclusion,
    pub twist_narrative: Vec<String>,
    pub witnesses: Vec<SpecializationWitness>,
    pub verdict: String,
}

impl NewSectionCertificate {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }
}

/// Combine the involution-twist derivation with non-torsion witnesses at
/// specializations: a hypothetical relation m·j(P_a) = Σ m_i·j(P_i) forces
/// j(P_a) to be torsion, and any non-torsion specialization refutes that,
/// for every m at once. PASS needs at least two firing witnesses.
pub fn new_section_independence(
    family: &ShiodaFamily,
    a: &Rational,
    s_values: &[Rational],
    primes: &[u64],
) -> Result<NewSectionCertificate> {
    if s_values.len() < 2 {
        return Err(Error::BadBaseChange(format!(
            "need at least two specialization parameters, got {}",
            s_values.len()
        )));
    }
    let bc = conic_base_change(family, a)?;
    let g = family.genus();
    let twist = galois_twist_conclusion(1, &vec![0; family.degree()])?;
    let twist_narrative = vec![
        "the extension Q(s)/Q(u) with u = t(s)^2 has an involution fixing j(P_a) and negating every j(P_i)".into(),
        "apply it to a hypothetical relation m*j(P_a) = sum m_i*j(P_i) with m >= 1 and add the two forms: 2m*j(P_a) = 0".into(),
        "so any relation at all makes j(P_a) a torsion class; the witnesses below show it is not".into(),
    ];

    let mut witnesses = Vec::new();
    let mut fired = 0usize;
    for s0 in s_values {
        let computed = (|| -> Result<SpecializationWitness> {
            let t0 = bc.parametrization.t_at(s0)?;
            let v0 = bc.parametrization.v_at(s0)?;
            let fiber = QCurve::new(family.p.add(&QPoly::constant(t0.square())))?;
            let point = fiber.point(a.clone(), v0.clone())?;
            let witness = nontorsion_witness(&fiber, &point, primes)?;
            let nontorsion = witness.verdict == TorsionVerdict::NonTorsion;
            Ok(SpecializationWitness {
                s: s0.clone(),
                t: t0,
                x: a.clone(),
                y: v0,
                detail: format!("verdict {:?} at primes {:?}", witness.verdict, witness.primes),
                witness: Some(witness),
                nontorsion,
            })
        })();
        let record = computed.unwrap_or_else(|e| SpecializationWitness {
            s: s0.clone(),
            t: Rational::zero(),
            x: a.clone(),
            y: Rational::zero(),
            witness: None,
            nontorsion: false,
            detail: format!("witness unavailable: {e}"),
        });
        if record.nontorsion {
            fired += 1;
        }
        witnesses.push(record);
    }

    let verdict = if fired >= 2 { "PASS" } else { "INCONCLUSIVE" };
    Ok(NewSectionCertificate {
        family: family.describe(),
        a: a.clone(),
        c: bc.parametrization.c.clone(),
        generic_rank: 2 * g,
        claimed_rank: 2 * g + 1,
        twist,
        twist_narrative,
        witnesses,
        verdict: verdict.into(),
    })
}

/// The auxiliary curve cut out by r² = p(a) + t², s² = q(b)·(p(b) + t²).
#[derive(Clone, Debug, Serialize)]
pub struct DoubleBaseChangeCurve {
    pub a: Rational,
    pub b: Rational,
    pub p_at_a: Rational,
    pub p_at_b: Rational,
    pub q_at_b: Rational,
    pub equations: [String; 2],
    pub genus_one: bool,
    pub degenerate_reasons: Vec<String>,
}

/// Build the auxiliary curve for parameters (a, b). Degeneracy is a flagged
/// state, not an error: each visible factorization is listed.
pub fn double_base_change(
    family: &BiquadraticFamily,
    a: &Rational,
    b: &Rational,
) -> DoubleBaseChangeCurve {
    let p_at_a = family.x1.p.eval(a);
    let p_at_b = family.x1.p.eval(b);
    let q_at_b = family.q.eval(b);
    let mut reasons = Vec::new();
    if p_at_a.is_zero() {
        reasons.push("p(a) = 0: the first quadric splits as r = ±t".to_string());
    }
    if p_at_b.is_zero() {
        reasons.push(format!(
            "p(b) = 0: the second quadric degenerates to s² = {q_at_b}·t²"
        ));
    }
    if q_at_b.is_zero() {
        reasons.push("q(b) = 0: the second equation collapses to s² = 0".to_string());
    }
    if !p_at_a.is_zero() && !p_at_b.is_zero() && p_at_a == p_at_b {
        reasons.push("p(a) = p(b): the two quadrics coincide up to scaling".to_string());
    }
    DoubleBaseChangeCurve {
        a: a.clone(),
        b: b.clone(),
        equations: [
            format!("r^2 = {p_at_a} + t^2"),
            format!("s^2 = {q_at_b}*({p_at_b} + t^2)"),
        ],
        genus_one: reasons.is_empty(),
        degenerate_reasons: reasons,
        p_at_a,
        p_at_b,
        q_at_b,
    }
}

/// A rational point on the auxiliary curve, with nonnegative square roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CabPoint {
    pub t: Rational,
    pub r: Rational,
    pub s: Rational,
}

/// Verify both defining equations exactly.
pub fn verify_cab_point(curve: &DoubleBaseChangeCurve, point: &CabPoint) -> bool {
    let t2 = point.t.square();
    point.r.square() == curve.p_at_a.add(&t2)
        && point.s.square() == curve.q_at_b.mul(&curve.p_at_b.add(&t2))
}

fn scan_denominators(
    curve: &DoubleBaseChangeCurve,
    height_bound: i64,
    n_from: i64,
    n_to: i64,
) -> Vec<CabPoint> {
    let mut hits = Vec::new();
    for n in n_from..=n_to {
        for m in -height_bound..=height_bound {
            if num_integer::gcd(m, n) != 1 {
                continue;
            }
            let t = Rational::new(BigInt::from(m), BigInt::from(n))
                .expect("denominator is positive");
            let t2 = t.square();
            let w1 = curve.p_at_a.add(&t2);
            let w2 = curve.q_at_b.mul(&curve.p_at_b.add(&t2));
            let (Some(r), Some(s)) = (w1.sqrt_exact(), w2.sqrt_exact()) else {
                continue;
            };
            hits.push(CabPoint { t, r, s });
        }
    }
    hits
}

/// Enumerate t = m/n with max(|m|, n) ≤ height_bound and keep the values
/// where both right-hand sides are rational squares. Every hit is
/// re-verified against the defining equations before being returned.
pub fn search_points_on_cab(
    curve: &DoubleBaseChangeCurve,
    height_bound: i64,
) -> Result<Vec<CabPoint>> {
    search_points_on_cab_threaded(curve, height_bound, 1)
}

/// Same search split across worker threads by denominator range. The merge
/// keeps denominators in ascending order, so the output is identical for
/// every thread count.
pub fn search_points_on_cab_threaded(
    curve: &DoubleBaseChangeCurve,
    height_bound: i64,
    threads: usize,
) -> Result<Vec<CabPoint>> {
    if height_bound < 1 {
        return Err(Error::BadSearch(format!(
            "height bound must be >= 1, got {height_bound}"
        )));
    }
    let threads = threads.clamp(1, height_bound as usize);
    let chunk = (height_bound + threads as i64 - 1) / threads as i64;
    let mut hits = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for k in 0..threads as i64 {
            let lo = 1 + k * chunk;
            let hi = (lo + chunk - 1).min(height_bound);
            if lo > hi {
                continue;
            }
            handles.push(scope.spawn(move || scan_denominators(curve, height_bound, lo, hi)));
        }
        for h in handles {
            hits.extend(h.join().expect("search worker panicked"));
        }
    });
    for p in &hits {
        if !verify_cab_point(curve, p) {
            return Err(Error::Internal(format!(
                "search hit t = {} failed post-hoc verification",
                p.t
            )));
        }
    }
    Ok(hits)
}

/// Scoring of one fiber reached through a point on the auxiliary curve.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleJumpFiber {
    pub t: Rational,
    pub r: Rational,
    pub s: Rational,
    /// Gram determinant of the candidate triple on the first layer.
    pub x1_gram_det: Option<f64>,
    /// Relation found among the candidates, if any.
    pub x1_relation: Option<Vec<i64>>,
    /// True when the determinant clears eps and the search found nothing.
    pub x1_certified: bool,
    /// Candidate count scored on the first layer: 3 when certified, else 2.
    pub x1_score: usize,
    pub x3_new_section_on_curve: bool,
    pub x3_class_witness: Option<ClassOrderWitness>,
    /// Candidate count scored on the double-cover layer: 4 when the new
    /// section lands on the fiber and its class resists the torsion sieve.
    pub x3_score: usize,
    pub total_score: usize,
    pub achieves_double_jump: bool,
    pub detail: Vec<String>,
}

/// Survey of all supplied auxiliary-curve points.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleJumpReport {
    pub family: String,
    pub a: Rational,
    pub b: Rational,
    pub degenerate: bool,
    pub degenerate_reasons: Vec<String>,
    /// Generic total across both layers: (d1 − 1) + d1.
    pub generic_total: usize,
    /// Bookkeeping target after the double jump: (2g1 + 1) + (d1 + 1).
    pub target_total: usize,
    pub fibers: Vec<DoubleJumpFiber>,
    /// t-values whose fiber reaches the target score.
    pub achieved_t: Vec<Rational>,
}

/// Primes for the double-cover torsion sieve; chosen past the small primes
/// where a biquadratic q with composite discriminant loses separability.
const X3_WITNESS_PRIMES: [u64; 7] = [5, 7, 11, 13, 17, 19, 23];

/// Assemble, for each point on the auxiliary curve, the enlarged candidate
/// sets on both layers of the tower and score their independence: the
/// first layer numerically (Gram determinant plus exhaustive relation
/// search), the double-cover layer by exact bookkeeping (on-curve check and
/// a reduced-order torsion sieve on the new class).
pub fn double_jump_report(
    family: &BiquadraticFamily,
    a: &Rational,
    b: &Rational,
    points: &[CabPoint],
    settings: &HeightSettings,
    eps: f64,
    relation_bound: i64,
) -> Result<DoubleJumpReport> {
    let d1 = family.d1();
    if d1 != 3 || family.d2() != 4 {
        return Err(Error::BadBaseChange(format!(
            "the double-jump report needs deg p = 3 and deg q = 4, got ({d1}, {})",
            family.d2()
        )));
    }
    let aux = double_base_change(family, a, b);
    let generic_total = (d1 - 1) + d1;
    let target_total = 3 + (d1 + 1);

    let mut fibers = Vec::new();
    let mut achieved = Vec::new();
    for pt in points {
        if !verify_cab_point(&aux, pt) {
            return Err(Error::BadBaseChange(format!(
                "supplied point t = {} is not on the auxiliary curve",
                pt.t
            )));
        }
        let fiber = score_fiber(family, a, b, pt, settings, eps, relation_bound);
        if fiber.achieves_double_jump {
            achieved.push(fiber.t.clone());
        }
        fibers.push(fiber);
    }

    Ok(DoubleJumpReport {
        family: family.describe(),
        a: a.clone(),
        b: b.clone(),
        degenerate: !aux.genus_one,
        degenerate_reasons: aux.degenerate_reasons,
        generic_total,
        target_total,
        fibers,
        achieved_t: achieved,
    })
}

fn score_fiber(
    family: &BiquadraticFamily,
    a: &Rational,
    b: &Rational,
    pt: &CabPoint,
    settings: &HeightSettings,
    eps: f64,
    relation_bound: i64,
) -> DoubleJumpFiber {
    let mut detail = Vec::new();
    let t0 = &pt.t;

    // first layer: y² = p(x) + t0² with candidates (e1, t0), (e2, t0), (a, r)
    let mut x1_gram_det = None;
    let mut x1_relation = None;
    let mut x1_certified = false;
    let x1 = (|| -> Result<(f64, Option<Vec<i64>>)> {
        let fiber = QCurve::new(family.x1.p.add(&QPoly::constant(t0.square())))?;
        let model = IntegralModel::from_curve(&fiber)?;
        let raw: Vec<QPoint> = vec![
            fiber.point(family.x1.roots[0].clone(), t0.clone())?,
            fiber.point(family.x1.roots[1].clone(), t0.clone())?,
            fiber.point(a.clone(), pt.r.clone())?,
        ];
        let moved: Result<Vec<QPoint>> = raw.iter().map(|p| model.transport(p)).collect();
        let moved = moved?;
        let gram = gram_matrix(&model, &moved, settings)?;
        let relation = small_relation_search(&model, &moved, relation_bound)?;
        Ok((gram.det, relation))
    })();
    match x1 {
        Ok((det, relation)) => {
            x1_certified = det > eps && relation.is_none();
            let mut line = format!("first layer: det = {det:.6e}");
            if let Some(rel) = &relation {
                let _ = write!(line, ", relation {rel:?} found");
            } else {
                let _ = write!(line, ", no relation up to {relation_bound}");
            }
            detail.push(line);
            x1_gram_det = Some(det);
            x1_relation = relation;
        }
        Err(e) => detail.push(format!("first layer scoring unavailable: {e}")),
    }
    let x1_score = if x1_certified { 3 } else { 2 };

    // double-cover layer: w² = (p(x) + t0²)·q(x) with the new point (b, s)
    let mut x3_on = false;
    let mut x3_witness = None;
    let x3 = (|| -> Result<(bool, ClassOrderWitness)> {
        let f3 = family.x1.p.add(&QPoly::constant(t0.square())).mul(&family.q);
        let fiber = QCurve::new(f3)?;
        let new_point = fiber.point(b.clone(), pt.s.clone())?;
        let class = embed(&fiber, &new_point)?;
        let witness = nontorsion_witness_by_orders(&fiber, &class, &X3_WITNESS_PRIMES)?;
        Ok((true, witness))
    })();
    match x3 {
        Ok((on, witness)) => {
            detail.push(format!(
                "double-cover layer: new section on fiber, {}",
                witness.detail
            ));
            x3_on = on;
            x3_witness = Some(witness);
        }
        Err(e) => detail.push(format!("double-cover scoring unavailable: {e}")),
    }
    let x3_nontorsion = x3_witness
        .as_ref()
        .map(|w| w.verdict == TorsionVerdict::NonTorsion)
        .unwrap_or(false);
    let x3_score = if x3_on && x3_nontorsion { 4 } else { 3 };

    let total_score = x1_score + x3_score;
    DoubleJumpFiber {
        t: pt.t.clone(),
        r: pt.r.clone(),
        s: pt.s.clone(),
        x1_gram_det,
        x1_relation,
        x1_certified,
        x1_score,
        x3_new_section_on_curve: x3_on,
        x3_class_witness: x3_witness,
        x3_score,
        total_score,
        achieves_double_jump: total_score >= 7,
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn qq(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d)).unwrap()
    }

    fn g1_family() -> ShiodaFamily {
        ShiodaFamily::build(&[q(-1), q(0), q(1)]).unwrap()
    }

    fn g2_family() -> ShiodaFamily {
        ShiodaFamily::build(&[q(-2), q(-1), q(0), q(1), q(2)]).unwrap()
    }

    fn biquadratic() -> BiquadraticFamily {
        BiquadraticFamily::build(&[q(-1), q(0), q(1)], &QPoly::from_i64(&[4, 0, 11, 0, 1]), None)
            .unwrap()
    }

    #[test]
    fn parametrization_example_values() {
        let par = ConicParametrization::new(q(6)).unwrap();
        assert_eq!(par.t_at(&q(2)).unwrap(), qq(1, 2));
        assert_eq!(par.v_at(&q(2)).unwrap(), qq(5, 2));
        let v = par.v_at(&q(2)).unwrap();
        let t = par.t_at(&q(2)).unwrap();
        assert_eq!(v.square().sub(&t.square()), q(6));
        assert!(par.t_at(&q(0)).is_err());
    }

    #[test]
    fn parametrization_rejects_zero() {
        assert!(ConicParametrization::new(q(0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn parametrization_identity_random_c(num in -200i64..200, den in 1i64..40) {
            prop_assume!(num != 0);
            let par = ConicParametrization::new(qq(num, den)).unwrap();
            prop_assert!(par.identity_holds());
        }
    }

    #[test]
    fn quadratic_pullback_ranks() {
        let rec1 = quadratic_pullback(&g1_family()).unwrap();
        assert_eq!(
            (rec1.rank_over_subfield, rec1.rank_over_extension),
            (0, 2)
        );
        assert!(rec1.passed(), "{:#?}", rec1.checks);

        let rec2 = quadratic_pullback(&g2_family()).unwrap();
        assert_eq!(
            (rec2.rank_over_subfield, rec2.rank_over_extension),
            (0, 4)
        );
        assert!(rec2.passed(), "{:#?}", rec2.checks);
    }

    #[test]
    fn conic_base_change_example() {
        let fam = g1_family();
        let bc = conic_base_change(&fam, &q(2)).unwrap();
        assert_eq!(bc.parametrization.c, q(6));
        assert_eq!(bc.pulled_back.len(), 3);
        // constructor already enforces on-curve; double-check one section
        assert!(bc.curve.on_curve(&bc.new_section.point));
        assert!(bc.curve.on_curve(&bc.pulled_back[0].point));
    }

    #[test]
    fn conic_base_change_rejects_roots_of_p() {
        let fam = g1_family();
        assert!(matches!(
            conic_base_change(&fam, &q(1)),
            Err(Error::BadBaseChange(_))
        ));
    }

    #[test]
    fn new_section_certificate_passes_for_reference_family() {
        let fam = g1_family();
        let cert =
            new_section_independence(&fam, &q(2), &[q(2), q(3)], &[5, 7, 11]).unwrap();
        assert_eq!(cert.generic_rank, 2);
        assert_eq!(cert.claimed_rank, 3);
        assert_eq!(cert.twist.forced_torsion, 2);
        assert!(cert.passed(), "{:#?}", cert.witnesses);
        assert!(cert.witnesses.iter().all(|w| w.nontorsion));
    }

    #[test]
    fn new_section_certificate_reports_inconclusive() {
        // p = x(x−1)(x−10) has p(5) = −100, so v(±10) = 0 and the new
        // section specializes to a 2-torsion point at both chosen s
        let fam = ShiodaFamily::build(&[q(0), q(1), q(10)]).unwrap();
        let cert =
            new_section_independence(&fam, &q(5), &[q(10), q(-10)], &[5, 7, 11, 13, 17]).unwrap();
        assert_eq!(cert.verdict, "INCONCLUSIVE");
        assert!(cert.witnesses.iter().all(|w| !w.nontorsion));
    }

    #[test]
    fn double_base_change_flags() {
        let fam = biquadratic();
        let good = double_base_change(&fam, &q(2), &q(3));
        assert!(good.genus_one, "{:?}", good.degenerate_reasons);

        let b_root = double_base_change(&fam, &q(2), &q(0));
        assert!(!b_root.genus_one);
        assert!(b_root.degenerate_reasons[0].contains("p(b) = 0"));

        let a_root = double_base_change(&fam, &q(1), &q(3));
        assert!(!a_root.genus_one);

        let coincident = double_base_change(&fam, &q(2), &q(-2));
        // p(2) = 6, p(−2) = −6: distinct, so this one is fine
        assert!(coincident.genus_one);
    }

    #[test]
    fn degenerate_control_reproduces_closed_form() {
        let fam = biquadratic();
        let aux = double_base_change(&fam, &q(2), &q(0));
        let hits = search_points_on_cab(&aux, 10).unwrap();
        // closed form: p(b) = 0 makes the second equation s² = 4t², always a
        // square, so hits are exactly the t with 6 + t² square
        let expected: Vec<CabPoint> = {
            let mut v = Vec::new();
            for n in 1..=10i64 {
                for m in -10..=10i64 {
                    if num_integer::gcd(m, n) != 1 {
                        continue;
                    }
                    let t = qq(m, n);
                    if let Some(r) = q(6).add(&t.square()).sqrt_exact() {
                        let s = q(4).mul(&t.square()).sqrt_exact().unwrap();
                        v.push(CabPoint { t, r, s });
                    }
                }
            }
            v
        };
        assert_eq!(hits, expected);
        let control = hits.iter().find(|h| h.t == qq(1, 2)).expect("t = 1/2 hit");
        assert_eq!(control.r, qq(5, 2));
        assert_eq!(control.s, q(1));
    }

    #[test]
    fn nondegenerate_hit_found() {
        let fam = biquadratic();
        let aux = double_base_change(&fam, &q(2), &q(-2));
        assert!(aux.genus_one);
        let hits = search_points_on_cab(&aux, 5).unwrap();
        let hit = hits.iter().find(|h| h.t == qq(5, 2)).expect("t = 5/2 hit");
        assert_eq!(hit.r, qq(7, 2));
        assert_eq!(hit.s, q(4));
        for h in &hits {
            assert!(verify_cab_point(&aux, h));
        }
    }

    #[test]
    fn search_is_thread_count_invariant() {
        let fam = biquadratic();
        let aux = double_base_change(&fam, &q(2), &q(-2));
        let one = search_points_on_cab_threaded(&aux, 12, 1).unwrap();
        let three = search_points_on_cab_threaded(&aux, 12, 3).unwrap();
        let many = search_points_on_cab_threaded(&aux, 12, 64).unwrap();
        assert_eq!(one, three);
        assert_eq!(one, many);
    }

    #[test]
    fn double_jump_report_scores_known_hit() {
        let fam = biquadratic();
        let aux = double_base_change(&fam, &q(2), &q(-2));
        let hits = search_points_on_cab(&aux, 5).unwrap();
        let settings = HeightSettings::default();
        let report =
            double_jump_report(&fam, &q(2), &q(-2), &hits, &settings, 1e-2, 10).unwrap();
        assert_eq!(report.generic_total, 5);
        assert_eq!(report.target_total, 7);
        assert!(!report.fibers.is_empty());
        let fiber = report
            .fibers
            .iter()
            .find(|f| f.t == qq(5, 2))
            .expect("fiber for t = 5/2");
        assert!(fiber.x3_new_section_on_curve, "{:#?}", fiber.detail);
        assert!(fiber.x1_gram_det.is_some(), "{:#?}", fiber.detail);
    }

    #[test]
    fn double_jump_report_rejects_wrong_degrees() {
        let fam = biquadratic();
        let wrong = ShiodaFamily::build(&[q(-2), q(-1), q(0), q(1), q(2)]).unwrap();
        let _ = fam;
        // a biquadratic family with d1 = 5 cannot be built cheaply here, so
        // exercise the degree guard through a synthetic call: quintic p with
        // the same q violates the (3, 4) requirement
        let fam5 = BiquadraticFamily::build(
            &wrong.roots,
            &QPoly::from_i64(&[4, 0, 11, 0, 1]),
            None,
        );
        if let Ok(fam5) = fam5 {
            let err = double_jump_report(
                &fam5,
                &q(3),
                &q(4),
                &[],
                &HeightSettings::default(),
                1e-2,
                10,
            );
            assert!(matches!(err, Err(Error::BadBaseChange(_))));
        }
    }
}
