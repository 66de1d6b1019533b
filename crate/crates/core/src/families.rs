//! Explicit curve families over the rational t-line and their section groups.
//!
//! Two constructions are provided. The split family y² = p(x) + t², where p
//! splits over Q with distinct roots e_i, carries the visible sections
//! P_i = (e_i, t) and P'_i = (e_i, -t). The double-cover variant multiplies
//! the right-hand side by a second polynomial q with every value q(e_i) a
//! nonzero rational square a_i², giving sections R_i = (e_i, a_i t) on the
//! odd-degree model w² = (p(x) + t²)·q(x).
//!
//! Every claimed identity between section classes is checked by reduced
//! divisor arithmetic over Q(t), and the verdicts are packaged into
//! serializable certificates.

use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::factor::monic_factors;
use crate::field::Field;
use crate::jacobian::{self, MumfordDivisor};
use crate::poly::Polynomial;
use crate::ratfunc::{QPoly, RationalFunction};
use crate::rational::Rational;

/// Polynomial in x with coefficients in Q(t).
pub type TPoly = Polynomial<RationalFunction>;
/// Hyperelliptic curve over Q(t).
pub type TCurve = HyperellipticCurve<RationalFunction>;
/// Point over Q(t).
pub type TPoint = CurvePoint<RationalFunction>;
/// Reduced divisor class over Q(t).
pub type TClass = MumfordDivisor<RationalFunction>;

/// Which curve of the tower a section lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveTarget {
    /// y² = p(x) + t²
    X1,
    /// w² = (p(x) + t²)·q(x)
    X3,
}

/// A labelled section of one of the family curves.
#[derive(Clone, Debug)]
pub struct FamilySection {
    pub label: String,
    pub target: CurveTarget,
    pub point: TPoint,
}

/// One named identity checked by divisor arithmetic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationCheck {
    pub name: String,
    /// Stable identifier of the claim this check certifies.
    pub claim: String,
    pub holds: bool,
    pub detail: String,
}

/// Verdict record for a relation suite; `verdict` is "PASS" or "FAIL".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationCertificate {
    pub family: String,
    pub checks: Vec<RelationCheck>,
    pub verdict: String,
}

impl RelationCertificate {
    fn from_checks(family: String, checks: Vec<RelationCheck>) -> Self {
        let verdict = if checks.iter().all(|c| c.holds) {
            "PASS"
        } else {
            "FAIL"
        };
        RelationCertificate {
            family,
            checks,
            verdict: verdict.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }
}

/// Run one check, converting hard errors (for example a section knocked off
/// the curve) into a failing check that names the violated relation.
fn run_check(
    name: String,
    claim: &str,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> RelationCheck {
    match body() {
        Ok((holds, detail)) => RelationCheck {
            name,
            claim: claim.into(),
            holds,
            detail,
        },
        Err(e) => RelationCheck {
            name,
            claim: claim.into(),
            holds: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Lift a polynomial over Q into x-polynomials over Q(t) (constant in t).
pub fn lift_to_qt(p: &QPoly) -> TPoly {
    TPoly::new(
        p.coeffs()
            .iter()
            .map(|c| RationalFunction::from_rational(c.clone()))
            .collect(),
    )
}

/// The family y² = p(x) + t² with p split of odd degree d = 2g+1 ≥ 3.
#[derive(Clone, Debug)]
pub struct ShiodaFamily {
    /// Distinct rational roots e_1, ..., e_d of p.
    pub roots: Vec<Rational>,
    /// p(x) = Π (x − e_i), monic over Q.
    pub p: QPoly,
    /// Generic curve over Q(t).
    pub curve: TCurve,
    /// Sections ordered P_1..P_d, then P'_1..P'_d.
    pub sections: Vec<FamilySection>,
}

impl ShiodaFamily {
    pub fn build(roots: &[Rational]) -> Result<Self> {
        let d = roots.len();
        if d < 3 || d % 2 == 0 {
            return Err(Error::BadFamily(format!(
                "need an odd number of roots, at least 3; got {d}"
            )));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if roots[i] == roots[j] {
                    return Err(Error::BadFamily(format!(
                        "repeated root {}",
                        roots[i]
                    )));
                }
            }
        }
        let p = QPoly::from_roots(roots);
        let t = RationalFunction::t();
        let f = lift_to_qt(&p).add(&TPoly::constant(t.square()));
        let curve = TCurve::new(f)?;

        let mut sections = Vec::with_capacity(2 * d);
        for (sign, tag) in [(t.clone(), "P"), (t.neg(), "P'")] {
            for (i, e) in roots.iter().enumerate() {
                let point = curve
                    .point(RationalFunction::from_rational(e.clone()), sign.clone())?;
                sections.push(FamilySection {
                    label: format!("{tag}{}", i + 1),
                    target: CurveTarget::X1,
                    point,
                });
            }
        }
        Ok(ShiodaFamily {
            roots: roots.to_vec(),
            p,
            curve,
            sections,
        })
    }

    /// d = 2g + 1.
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    /// Section P_{i+1} = (e_{i+1}, t), zero-indexed.
    pub fn section(&self, i: usize) -> &FamilySection {
        &self.sections[i]
    }

    /// Section P'_{i+1} = (e_{i+1}, −t), zero-indexed.
    pub fn section_inv(&self, i: usize) -> &FamilySection {
        &self.sections[self.degree() + i]
    }

    pub fn describe(&self) -> String {
        format!("y^2 = {} + t^2  (split family, genus {})", self.p, self.genus())
    }

    /// Check every divisor-class identity satisfied by the sections:
    /// j(P'_i) = −j(P_i), Σ j(P_i) = 0, and principality of div(x − e_i)
    /// and div(y − t).
    pub fn verify_relations(&self) -> RelationCertificate {
        let curve = &self.curve;
        let d = self.degree();
        let mut checks = Vec::with_capacity(2 * d + 2);

        for i in 0..d {
            let (pi, qi) = (self.section(i), self.section_inv(i));
            checks.push(run_check(
                format!("involution.{}", pi.label),
                "sections.involution-negation",
                || {
                    let a = jacobian::embed(curve, &pi.point)?;
                    let b = jacobian::embed(curve, &qi.point)?;
                    let sum = jacobian::cantor_add(curve, &a, &b)?;
                    Ok((
                        sum.is_identity(),
                        format!("j({}) + j({}) = {}", pi.label, qi.label, sum),
                    ))
                },
            ));
        }

        checks.push(run_check(
            "sum.all-sections".into(),
            "sections.sum-relation",
            || {
                let mut acc = MumfordDivisor::identity();
                for i in 0..d {
                    let ji = jacobian::embed(curve, &self.section(i).point)?;
                    acc = jacobian::cantor_add(curve, &acc, &ji)?;
                }
                Ok((acc.is_identity(), format!("j(P_1) + ... + j(P_{d}) = {acc}")))
            },
        ));

        for i in 0..d {
            let (pi, qi) = (self.section(i), self.section_inv(i));
            checks.push(run_check(
                format!("principal.x-minus-e{}", i + 1),
                "divisors.vertical-line-principal",
                || {
                    let cls = jacobian::class_of_divisor(
                        curve,
                        &[(pi.point.clone(), 1), (qi.point.clone(), 1)],
                    )?;
                    Ok((
                        cls.is_identity(),
                        format!("class(({}) + ({}) - 2(inf)) = {cls}", pi.label, qi.label),
                    ))
                },
            ));
        }

        checks.push(run_check(
            "principal.y-minus-t".into(),
            "divisors.section-line-principal",
            || {
                let terms: Vec<(TPoint, i64)> = (0..d)
                    .map(|i| (self.section(i).point.clone(), 1))
                    .collect();
                let cls = jacobian::class_of_divisor(curve, &terms)?;
                Ok((
                    cls.is_identity(),
                    format!("class((P_1) + ... + (P_{d}) - {d}(inf)) = {cls}"),
                ))
            },
        ));

        RelationCertificate::from_checks(self.describe(), checks)
    }

    /// The polynomial in t cutting out the bad fibers, with the degree
    /// statement 2(d−1) and the reducible fiber over t = ∞.
    pub fn bad_fiber_locus(&self) -> Result<BadFiberLocus> {
        let disc = self.curve.f().discriminant()?;
        // the discriminant of a t-polynomial model is itself a polynomial in t
        let locus = disc.as_polynomial()?.clone();
        let degree = locus.deg();
        Ok(BadFiberLocus {
            expected_degree: 2 * (self.degree() - 1),
            degree,
            locus,
            reducible_fiber_at_infinity: true,
        })
    }
}

/// Where the family degenerates: roots of `locus` in t, plus t = ∞.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BadFiberLocus {
    /// Discriminant of the defining polynomial with respect to x, as a
    /// polynomial in t.
    pub locus: QPoly,
    pub degree: usize,
    /// 2(d−1) for a split family of degree d.
    pub expected_degree: usize,
    /// The fiber over t = ∞ is the reducible one.
    pub reducible_fiber_at_infinity: bool,
}

impl BadFiberLocus {
    /// True iff t0 is a smooth (good) fiber parameter.
    pub fn is_good(&self, t0: &Rational) -> bool {
        !self.locus.eval(t0).is_zero()
    }
}

/// The double-cover family w² = (p(x) + t²)·q(x) with q(e_i) = a_i² ≠ 0.
#[derive(Clone, Debug)]
pub struct BiquadraticFamily {
    /// The split family for p; its curve is the X1 layer.
    pub x1: ShiodaFamily,
    /// Second factor q over Q, separable, even degree, coprime to p.
    pub q: QPoly,
    /// Chosen square roots a_i of q(e_i), aligned with x1.roots.
    pub a: Vec<Rational>,
    /// Odd-degree model of the X3 layer over Q(t).
    pub x3_curve: TCurve,
    /// Sections ordered R_1..R_d1, then R'_1..R'_d1, all on X3.
    pub sections: Vec<FamilySection>,
}

impl BiquadraticFamily {
    /// Build from the roots of p, the polynomial q, and optional square
    /// roots a_i of the values q(e_i). When `a` is absent the nonnegative
    /// roots are taken; when present it is validated entrywise.
    pub fn build(
        p_roots: &[Rational],
        q: &QPoly,
        a: Option<&[Rational]>,
    ) -> Result<Self> {
        let x1 = ShiodaFamily::build(p_roots)?;
        let d1 = x1.degree();
        let d2 = q.deg();
        if q.degree().is_none() || d2 == 0 || d2 % 2 != 0 {
            return Err(Error::BadFamily(format!(
                "second factor must have positive even degree, got {:?}",
                q.degree()
            )));
        }
        if !q.is_squarefree() {
            return Err(Error::BadFamily(
                "second factor must be separable".into(),
            ));
        }

        // q(e_i) must be a nonzero perfect square for every root e_i
        let mut offenders = Vec::new();
        let mut chosen = Vec::with_capacity(d1);
        for e in &x1.roots {
            let val = q.eval(e);
            match val.sqrt_exact() {
                Some(r) if !r.is_zero() => chosen.push(r),
                _ => offenders.push(format!("q({e}) = {val}")),
            }
        }
        if !offenders.is_empty() {
            return Err(Error::BadFamily(format!(
                "values at roots must be nonzero rational squares; offenders: {}",
                offenders.join(", ")
            )));
        }
        let a = match a {
            None => chosen,
            Some(given) => {
                if given.len() != d1 {
                    return Err(Error::BadFamily(format!(
                        "expected {d1} square roots, got {}",
                        given.len()
                    )));
                }
                let mut bad = Vec::new();
                for (ai, e) in given.iter().zip(&x1.roots) {
                    if ai.square() != q.eval(e) {
                        bad.push(format!("a = {ai} but q({e}) = {}", q.eval(e)));
                    }
                }
                if !bad.is_empty() {
                    return Err(Error::BadFamily(format!(
                        "provided square roots do not match: {}",
                        bad.join(", ")
                    )));
                }
                given.to_vec()
            }
        };

        // odd-degree model w² = (p(x)+t²)·q(x); the curve constructor
        // enforces separability of the product over Q(t)
        let f3 = x1.curve.f().mul(&lift_to_qt(q));
        let x3_curve = TCurve::new(f3).map_err(|e| match e {
            Error::SingularCurve => {
                Error::BadFamily("p·q is not separable".into())
            }
            other => other,
        })?;

        let t = RationalFunction::t();
        let mut sections = Vec::with_capacity(2 * d1);
        for (sign, tag) in [(Rational::one(), "R"), (Rational::one().neg(), "R'")] {
            for (i, (e, ai)) in x1.roots.iter().zip(&a).enumerate() {
                let w = t.mul(&RationalFunction::from_rational(sign.mul(ai)));
                let point =
                    x3_curve.point(RationalFunction::from_rational(e.clone()), w)?;
                sections.push(FamilySection {
                    label: format!("{tag}{}", i + 1),
                    target: CurveTarget::X3,
                    point,
                });
            }
        }

        Ok(BiquadraticFamily {
            x1,
            q: q.clone(),
            a,
            x3_curve,
            sections,
        })
    }

    pub fn d1(&self) -> usize {
        self.x1.degree()
    }

    pub fn d2(&self) -> usize {
        self.q.deg()
    }

    /// Genus of the common covering curve (the fiber product layer), which
    /// is only ever used as an integer invariant: d1 + d2 − 2.
    pub fn covering_genus(&self) -> usize {
        self.d1() + self.d2() - 2
    }

    /// Genus of the odd-degree X3 model, (d1 + d2 − 1)/2.
    pub fn x3_genus(&self) -> usize {
        self.x3_curve.genus()
    }

    pub fn section(&self, i: usize) -> &FamilySection {
        &self.sections[i]
    }

    pub fn section_inv(&self, i: usize) -> &FamilySection {
        &self.sections[self.d1() + i]
    }

    pub fn describe(&self) -> String {
        format!(
            "w^2 = ({} + t^2)*({})  (double cover, genus {})",
            self.x1.p,
            self.q,
            self.x3_genus()
        )
    }

    /// The 2-torsion class cut out by a monic factor h of the defining
    /// polynomial: (h, 0) when deg h ≤ g, otherwise the class of the
    /// complementary factor f/h (made monic), which represents the same
    /// 2-torsion element.
    pub fn factor_class(&self, h: &TPoly) -> Result<TClass> {
        let g = self.x3_curve.genus();
        let f = self.x3_curve.f();
        let rep = if h.deg() <= g {
            h.monic().0
        } else {
            f.div_exact(h)?.monic().0
        };
        if rep.deg() > g {
            return Err(Error::InvalidDivisor(format!(
                "no representative of weight <= {g} for factor of degree {}",
                h.deg()
            )));
        }
        MumfordDivisor::new(&self.x3_curve, rep, TPoly::zero())
    }

    /// Check the X3 relation suite: j(R_i) + j(R'_i) = 0, doubling of each
    /// irreducible-factor 2-torsion class is trivial, and div(x − e_i) is
    /// principal.
    pub fn verify_relations(&self) -> RelationCertificate {
        let curve = &self.x3_curve;
        let d1 = self.d1();
        let mut checks = Vec::new();

        for i in 0..d1 {
            let (ri, si) = (self.section(i), self.section_inv(i));
            checks.push(run_check(
                format!("involution.{}", ri.label),
                "sections.involution-negation",
                || {
                    let a = jacobian::embed(curve, &ri.point)?;
                    let b = jacobian::embed(curve, &si.point)?;
                    let sum = jacobian::cantor_add(curve, &a, &b)?;
                    Ok((
                        sum.is_identity(),
                        format!("j({}) + j({}) = {}", ri.label, si.label, sum),
                    ))
                },
            ));
        }

        // each Q-irreducible factor h of q cuts out a 2-torsion class
        match monic_factors(&self.q) {
            Ok(factors) => {
                for h in &factors {
                    let lifted = lift_to_qt(h);
                    checks.push(run_check(
                        format!("two-torsion.factor[{h}]"),
                        "two-torsion.factor-classes",
                        || {
                            let cls = self.factor_class(&lifted)?;
                            let doubled = jacobian::scalar_mul(curve, 2, &cls)?;
                            Ok((
                                doubled.is_identity(),
                                format!("2 * {cls} = {doubled}"),
                            ))
                        },
                    ));
                }
            }
            Err(e) => checks.push(RelationCheck {
                name: "two-torsion.factorization".into(),
                claim: "two-torsion.factor-classes".into(),
                holds: false,
                detail: format!("error: {e}"),
            }),
        }

        for i in 0..d1 {
            let (ri, si) = (self.section(i), self.section_inv(i));
            checks.push(run_check(
                format!("principal.x-minus-e{}", i + 1),
                "divisors.vertical-line-principal",
                || {
                    let cls = jacobian::class_of_divisor(
                        curve,
                        &[(ri.point.clone(), 1), (si.point.clone(), 1)],
                    )?;
                    Ok((
                        cls.is_identity(),
                        format!("class(({}) + ({}) - 2(inf)) = {cls}", ri.label, si.label),
                    ))
                },
            ));
        }

        RelationCertificate::from_checks(self.describe(), checks)
    }
}

/// Wire format for family configuration files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyConfig {
    /// Roots of the split polynomial p.
    pub p_roots: Vec<Rational>,
    /// Coefficients of q, ascending; absent for a plain split family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Rational>>,
    /// Optional square roots a_i of q(e_i).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Rational>>,
}

/// A family loaded from configuration: split, or double-cover when q given.
#[derive(Clone, Debug)]
pub enum Family {
    Shioda(ShiodaFamily),
    Biquadratic(BiquadraticFamily),
}

impl FamilyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<Family> {
        match &self.q {
            None => Ok(Family::Shioda(ShiodaFamily::build(&self.p_roots)?)),
            Some(qc) => {
                let q = QPoly::new(qc.clone());
                Ok(Family::Biquadratic(BiquadraticFamily::build(
                    &self.p_roots,
                    &q,
                    self.a.as_deref(),
                )?))
            }
        }
    }
}
