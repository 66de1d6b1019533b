//! Independence certificates through 2-torsion specialization.
//!
//! Specializing the family at t = 0 sends each section P_i = (e_i, t) to the
//! Weierstrass point (e_i, 0), whose divisor class is 2-torsion. Encoding
//! those classes as 𝔽₂-vectors over the branch points and computing a rank
//! turns "the sections are independent" into finite linear algebra: if the
//! images span a rank-2g subspace and the generic fiber has no rational
//! 2-torsion, the section group is free of rank 2g.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{
    BiquadraticFamily, RelationCheck, ShiodaFamily, TPoly,
};
use crate::field::Field;
use crate::ratfunc::QPoly;
use crate::rational::Rational;
use crate::surface::{self, FamilyKind};

/// Class in J[2] of a specialized fiber, encoded over the branch points.
///
/// Bits index the finite branch points in a fixed order, with a final bit
/// for the point at infinity. Valid classes have even weight and are taken
/// modulo the all-ones vector (a set of branch points and its complement cut
/// out the same class); the stored representative always has the infinity
/// bit cleared, which picks one representative per class.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoTorsionVector {
    bits: Vec<bool>,
}

impl TwoTorsionVector {
    /// Build from raw bits over the branch points; canonicalizes.
    pub fn new(mut bits: Vec<bool>) -> Result<Self> {
        let n = bits.len();
        if n < 4 || n % 2 != 0 {
            return Err(Error::BadTwoTorsionVector(format!(
                "need an even number >= 4 of branch points, got {n}"
            )));
        }
        let weight = bits.iter().filter(|&&b| b).count();
        if weight % 2 != 0 {
            return Err(Error::BadTwoTorsionVector(format!(
                "class must have even weight, got {weight}"
            )));
        }
        if bits[n - 1] {
            for b in &mut bits {
                *b = !*b;
            }
        }
        Ok(TwoTorsionVector { bits })
    }

    /// The class of a Weierstrass point: the pair {branch point i, infinity}.
    pub fn weierstrass_pair(i: usize, branch_points: usize) -> Result<Self> {
        let mut bits = vec![false; branch_points + 1];
        if i >= branch_points {
            return Err(Error::BadTwoTorsionVector(format!(
                "branch index {i} out of range for {branch_points} points"
            )));
        }
        bits[i] = true;
        bits[branch_points] = true;
        TwoTorsionVector::new(bits)
    }

    pub fn zero(branch_points: usize) -> Result<Self> {
        TwoTorsionVector::new(vec![false; branch_points + 1])
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Group law: symmetric difference of branch-point sets.
    pub fn add(&self, other: &TwoTorsionVector) -> Result<TwoTorsionVector> {
        if self.len() != other.len() {
            return Err(Error::BadTwoTorsionVector(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        TwoTorsionVector::new(
            self.bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        )
    }

    fn mask(&self) -> u64 {
        assert!(self.len() <= 64, "branch-point count exceeds packed width");
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| if b { m | (1 << i) } else { m })
    }
}

impl fmt::Debug for TwoTorsionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set: Vec<String> = self
            .bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| {
                if i + 1 == self.bits.len() {
                    "inf".into()
                } else {
                    format!("b{i}")
                }
            })
            .collect();
        write!(f, "{{{}}}", set.join(","))
    }
}

impl fmt::Display for TwoTorsionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Rank of a set of classes, by elimination on the packed representatives.
///
/// Canonical representatives all live in the subspace with the infinity bit
/// cleared, which maps isomorphically onto the quotient modulo complement,
/// so plain XOR elimination computes the quotient-space rank.
pub fn f2_rank(vectors: &[TwoTorsionVector]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let n = first.len();
    let mut rows = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != n {
            return Err(Error::BadTwoTorsionVector(format!(
                "length mismatch: {} vs {n}",
                v.len()
            )));
        }
        rows.push(v.mask());
    }
    let mut rank = 0usize;
    for bit in 0..n {
        let pivot_bit = 1u64 << bit;
        let Some(pos) = rows.iter().position(|&r| r & pivot_bit != 0) else {
            continue;
        };
        let pivot = rows.swap_remove(pos);
        rank += 1;
        for r in &mut rows {
            if *r & pivot_bit != 0 {
                *r ^= pivot;
            }
        }
    }
    Ok(rank)
}

/// Specialize the sections P_i at t = 0 and return their 2-torsion classes.
///
/// The computation is honest rather than formal: each section's coordinates
/// are evaluated at t = 0 and the result is required to be a Weierstrass
/// point of y² = p(x) before its class vector is emitted.
pub fn specialize_to_two_torsion(fam: &ShiodaFamily) -> Result<Vec<TwoTorsionVector>> {
    let d = fam.degree();
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let section = fam.section(i);
        let (x, y) = match &section.point {
            crate::curve::CurvePoint::Affine { x, y } => (x, y),
            crate::curve::CurvePoint::Infinity => {
                return Err(Error::BadTwoTorsionVector(format!(
                    "section {} degenerates to infinity",
                    section.label
                )))
            }
        };
        let x0 = x.eval(&Rational::zero())?;
        let y0 = y.eval(&Rational::zero())?;
        if !y0.is_zero() || !fam.p.eval(&x0).is_zero() {
            return Err(Error::BadTwoTorsionVector(format!(
                "section {} does not specialize to a Weierstrass point at t = 0",
                section.label
            )));
        }
        let idx = fam
            .roots
            .iter()
            .position(|e| *e == x0)
            .expect("x0 is a root of p");
        out.push(TwoTorsionVector::weierstrass_pair(idx, d)?);
    }
    Ok(out)
}

/// Specialize the double-cover sections R_i at t = 0, inside the larger
/// 2-torsion space spanned by all branch points of w² = p(x)·q(x): the d1
/// roots of p, then d2 slots for the roots of q, then infinity.
pub fn specialize_r_to_two_torsion(
    fam: &BiquadraticFamily,
) -> Result<Vec<TwoTorsionVector>> {
    let d1 = fam.d1();
    let branch = d1 + fam.d2();
    let mut out = Vec::with_capacity(d1);
    for i in 0..d1 {
        let section = fam.section(i);
        let (x, y) = match &section.point {
            crate::curve::CurvePoint::Affine { x, y } => (x, y),
            crate::curve::CurvePoint::Infinity => {
                return Err(Error::BadTwoTorsionVector(format!(
                    "section {} degenerates to infinity",
                    section.label
                )))
            }
        };
        let x0 = x.eval(&Rational::zero())?;
        let y0 = y.eval(&Rational::zero())?;
        if !y0.is_zero() || !fam.x1.p.eval(&x0).is_zero() {
            return Err(Error::BadTwoTorsionVector(format!(
                "section {} does not specialize to a Weierstrass point at t = 0",
                section.label
            )));
        }
        let idx = fam
            .x1
            .roots
            .iter()
            .position(|e| *e == x0)
            .expect("x0 is a root of p");
        out.push(TwoTorsionVector::weierstrass_pair(idx, branch)?);
    }
    Ok(out)
}

/// Report of the 2-torsion triviality decision over Q(t).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoTorsionTriviality {
    pub trivial: bool,
    pub checks: Vec<RelationCheck>,
}

/// Decide whether y² = f(x, t), quadratic in t, has rational 2-torsion over
/// Q(t): a nonzero class would come from a nontrivial monic factor of f in
/// Q(t)[x], which (by primitivity in t) must show up either as a common
/// x-polynomial factor of the t-coefficients or as a splitting of the
/// quadratic in t, i.e. its t-discriminant being a square in Q(x).
pub fn two_torsion_trivial(f: &TPoly) -> Result<TwoTorsionTriviality> {
    // transpose: coefficients of t^k as polynomials in x
    let mut by_t: Vec<QPoly> = Vec::new();
    for (j, c) in f.coeffs().iter().enumerate() {
        let ct = c.as_polynomial()?;
        for (k, a) in ct.coeffs().iter().enumerate() {
            while by_t.len() <= k {
                by_t.push(QPoly::zero());
            }
            by_t[k] = by_t[k].add(&QPoly::monomial(a.clone(), j));
        }
    }
    if by_t.len() != 3 {
        return Err(Error::BadFamily(format!(
            "triviality test expects a model quadratic in t, got t-degree {}",
            by_t.len().saturating_sub(1)
        )));
    }
    let (c0, c1, c2) = (&by_t[0], &by_t[1], &by_t[2]);

    let mut checks = Vec::new();

    // leg 1: a factor constant in t divides every t-coefficient
    let content = c0.gcd(c1).gcd(c2);
    let content_trivial = content.deg() == 0;
    checks.push(RelationCheck {
        name: "two-torsion.no-constant-factor".into(),
        claim: "two-torsion.trivial-over-function-field".into(),
        holds: content_trivial,
        detail: if content_trivial {
            "t-coefficients are coprime in Q[x]".into()
        } else {
            format!("common factor found: {content}")
        },
    });

    // leg 2: the quadratic in t splits iff its discriminant is a square
    let disc = c1.square().sub(&c0.mul(c2).scale(&Rational::from_int(4)));
    let split = disc.sqrt_exact();
    checks.push(RelationCheck {
        name: "two-torsion.t-quadratic-irreducible".into(),
        claim: "two-torsion.trivial-over-function-field".into(),
        holds: split.is_none(),
        detail: match &split {
            None => format!("t-discriminant {disc} is not a square in Q[x]"),
            Some(root) => format!("t-quadratic splits: discriminant = ({root})^2"),
        },
    });

    Ok(TwoTorsionTriviality {
        trivial: checks.iter().all(|c| c.holds),
        checks,
    })
}

/// Certificate that the section group of a split family is free of rank 2g.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    pub family: String,
    /// Rank of the specialized section classes in J[2] at t = 0.
    pub f2_rank: usize,
    pub torsion_trivial: bool,
    /// Lower bound certified by the two legs above, when both pass.
    pub lower_bound: Option<usize>,
    /// Upper bound from the two-fibration bookkeeping.
    pub upper_bound: usize,
    /// Equal to the matching bounds when lower = upper; absent otherwise.
    pub conclusion_rank: Option<usize>,
    pub transcript: Vec<RelationCheck>,
}

/// Combine specialization, 𝔽₂ rank, and 2-torsion triviality into a rank
/// certificate for the split family, matched against the fibration upper
/// bound.
pub fn certify_generic_rank(fam: &ShiodaFamily) -> Result<IndependenceCertificate> {
    let d = fam.degree();
    let two_g = 2 * fam.genus();
    let mut transcript = Vec::new();

    let vectors = specialize_to_two_torsion(fam)?;
    transcript.push(RelationCheck {
        name: "specialization.section-classes".into(),
        claim: "specialization.onto-two-torsion".into(),
        holds: vectors.len() == d,
        detail: format!(
            "t = 0 sends sections to {:?}",
            vectors.iter().map(|v| format!("{v}")).collect::<Vec<_>>()
        ),
    });

    let rank = f2_rank(&vectors)?;
    transcript.push(RelationCheck {
        name: "f2.rank".into(),
        claim: "sections.span-full-two-torsion".into(),
        holds: rank == two_g,
        detail: format!("rank {rank} in the {two_g}-dimensional class space"),
    });

    let triviality = two_torsion_trivial(fam.curve.f())?;
    transcript.extend(triviality.checks.clone());

    let lower = (rank == two_g && triviality.trivial).then_some(two_g);
    let upper = surface::generic_rank_table(FamilyKind::Shioda { d })?.total;
    transcript.push(RelationCheck {
        name: "upper-bound.two-fibrations".into(),
        claim: "generic-rank.upper-bound".into(),
        holds: upper == two_g,
        detail: format!("fibration bookkeeping gives rank <= {upper}"),
    });

    Ok(IndependenceCertificate {
        family: fam.describe(),
        f2_rank: rank,
        torsion_trivial: triviality.trivial,
        lower_bound: lower,
        upper_bound: upper,
        conclusion_rank: lower.filter(|&l| l == upper),
        transcript,
    })
}

/// Rank table for the double-cover family, with the X3 lower bound from the
/// R-section specialization inside the enlarged 2-torsion space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BiquadraticRankCertificate {
    pub family: String,
    /// Certified rank of the base split layer.
    pub x1_rank: Option<usize>,
    /// Rank of the double-cover layer: d1.
    pub x3_rank: Option<usize>,
    /// Total modulo the constant part: 2·d1 − 1.
    pub total_rank: Option<usize>,
    /// 𝔽₂-rank of the specialized R-classes.
    pub r_vector_rank: usize,
    pub transcript: Vec<RelationCheck>,
}

pub fn certify_biquadratic_ranks(
    fam: &BiquadraticFamily,
) -> Result<BiquadraticRankCertificate> {
    let d1 = fam.d1();
    let mut transcript = Vec::new();

    // X1 leg: the split-family certificate
    let x1_cert = certify_generic_rank(&fam.x1)?;
    transcript.push(RelationCheck {
        name: "x1.generic-rank".into(),
        claim: "rank-table.base-layer".into(),
        holds: x1_cert.conclusion_rank == Some(d1 - 1),
        detail: format!(
            "split layer certificate concludes rank {:?}",
            x1_cert.conclusion_rank
        ),
    });

    // X3 leg: R-sections specialize to independent classes in the larger space
    let r_vectors = specialize_r_to_two_torsion(fam)?;
    let r_rank = f2_rank(&r_vectors)?;
    transcript.push(RelationCheck {
        name: "x3.r-vector-rank".into(),
        claim: "rank-table.cover-layer".into(),
        holds: r_rank == d1,
        detail: format!(
            "R-classes {:?} have rank {r_rank} in the {}-dimensional space",
            r_vectors.iter().map(|v| format!("{v}")).collect::<Vec<_>>(),
            d1 + fam.d2() - 1
        ),
    });

    // upper bounds from the fibration bookkeeping
    let table = surface::generic_rank_table(FamilyKind::Biquadratic {
        d1,
        d2: fam.d2(),
    })?;
    transcript.push(RelationCheck {
        name: "upper-bound.two-fibrations".into(),
        claim: "generic-rank.upper-bound".into(),
        holds: table.x1 == d1 - 1 && table.x3 == Some(d1),
        detail: format!(
            "fibration bookkeeping gives (x1, x3, total) <= ({}, {:?}, {})",
            table.x1, table.x3, table.total
        ),
    });

    let x1_ok = x1_cert.conclusion_rank == Some(d1 - 1);
    let x3_ok = r_rank == d1;
    Ok(BiquadraticRankCertificate {
        family: fam.describe(),
        x1_rank: x1_ok.then_some(d1 - 1),
        x3_rank: x3_ok.then_some(d1),
        total_rank: (x1_ok && x3_ok).then_some(2 * d1 - 1),
        r_vector_rank: r_rank,
        transcript,
    })
}

/// The forced consequence of a hypothetical relation m·j(P_a) = Σ m_i j(P_i)
/// under the Galois involution of the conic extension: the involution fixes
/// j(P_a) and negates every j(P_i), so adding the conjugated relation gives
/// 2m·j(P_a) = 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwistConclusion {
    pub m: i64,
    pub coefficients: Vec<i64>,
    /// The torsion order forced on j(P_a): 2m.
    pub forced_torsion: i64,
    pub derivation: Vec<String>,
}

pub fn galois_twist_conclusion(m: i64, coefficients: &[i64]) -> Result<TwistConclusion> {
    if m < 1 {
        return Err(Error::BadBaseChange(format!(
            "relation coefficient m must be >= 1, got {m}"
        )));
    }
    let rhs = |signs: &str| -> String {
        let terms: Vec<String> = coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{signs}{c}*j(P_{})", i + 1))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    };
    let derivation = vec![
        format!("assume  {m}*j(P_a) = {}", rhs("")),
        format!(
            "apply the involution (fixes j(P_a), negates each j(P_i)):  {m}*j(P_a) = {}",
            rhs("-")
        ),
        format!("add both:  {}*j(P_a) = 0", 2 * m),
    ];
    Ok(TwistConclusion {
        m,
        coefficients: coefficients.to_vec(),
        forced_torsion: 2 * m,
        derivation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::lift_to_qt;
    use crate::ratfunc::RationalFunction;

    fn rats(ns: &[i64]) -> Vec<Rational> {
        ns.iter().map(|&n| Rational::from_int(n)).collect()
    }

    fn g1_family() -> ShiodaFamily {
        ShiodaFamily::build(&rats(&[-1, 0, 1])).unwrap()
    }

    fn g2_family() -> ShiodaFamily {
        ShiodaFamily::build(&rats(&[-2, -1, 0, 1, 2])).unwrap()
    }

    #[test]
    fn vectors_canonicalize_and_add() {
        // {e_0, inf} stored with the infinity bit cleared by complementing
        let v = TwoTorsionVector::weierstrass_pair(0, 3).unwrap();
        assert_eq!(v.bits(), &[false, true, true, false]);
        let w = TwoTorsionVector::weierstrass_pair(1, 3).unwrap();
        // {e0,inf} + {e1,inf} = {e0,e1}
        assert_eq!(v.add(&w).unwrap().bits(), &[true, true, false, false]);
        // odd weight rejected
        assert!(TwoTorsionVector::new(vec![true, false, false, false]).is_err());
    }

    #[test]
    fn sum_of_all_shioda_vectors_vanishes() {
        let fam = g1_family();
        let vectors = specialize_to_two_torsion(&fam).unwrap();
        assert_eq!(vectors.len(), 3);
        let mut acc = TwoTorsionVector::zero(3).unwrap();
        for v in &vectors {
            acc = acc.add(v).unwrap();
        }
        assert!(acc.is_zero());
    }

    #[test]
    fn f2_ranks_of_specialized_sections() {
        assert_eq!(f2_rank(&specialize_to_two_torsion(&g1_family()).unwrap()).unwrap(), 2);
        let g2_vectors = specialize_to_two_torsion(&g2_family()).unwrap();
        assert_eq!(g2_vectors.len(), 5);
        assert_eq!(g2_vectors[0].len(), 6);
        assert_eq!(f2_rank(&g2_vectors).unwrap(), 4);
        // duplicates collapse
        let v = g2_vectors[0].clone();
        assert_eq!(f2_rank(&[v.clone(), v]).unwrap(), 1);
        assert_eq!(f2_rank(&[]).unwrap(), 0);
    }

    #[test]
    fn triviality_holds_for_split_families() {
        for fam in [g1_family(), g2_family()] {
            let t = two_torsion_trivial(fam.curve.f()).unwrap();
            assert!(t.trivial, "{:#?}", t.checks);
        }
    }

    #[test]
    fn triviality_detects_visible_factor() {
        // control: (x² + t²)(x + 1) has the constant-in-t factor x + 1
        let x2 = lift_to_qt(&QPoly::from_i64(&[0, 0, 1]));
        let t2 = TPoly::constant(RationalFunction::t().square());
        let xp1 = lift_to_qt(&QPoly::from_i64(&[1, 1]));
        let f = x2.add(&t2).mul(&xp1);
        let t = two_torsion_trivial(&f).unwrap();
        assert!(!t.trivial);
        let failing: Vec<_> = t.checks.iter().filter(|c| !c.holds).collect();
        assert!(failing[0].detail.contains("x + "), "{}", failing[0].detail);
    }

    #[test]
    fn triviality_detects_split_quadratic() {
        // y² = t² − x²: discriminant 4x² is a square, so the quadratic splits
        let f = TPoly::new(vec![
            RationalFunction::t().square(),
            RationalFunction::from_rational(Rational::zero()),
            RationalFunction::from_rational(Rational::from_int(-1)),
        ]);
        // build the triviality test directly; the model is singular as a
        // curve but the transpose logic is still exercised
        let t = two_torsion_trivial(&f).unwrap();
        assert!(!t.trivial);
    }

    #[test]
    fn generic_rank_certificates() {
        let c1 = certify_generic_rank(&g1_family()).unwrap();
        assert_eq!(c1.conclusion_rank, Some(2));
        assert_eq!(c1.f2_rank, 2);
        assert!(c1.torsion_trivial);
        assert_eq!(c1.upper_bound, 2);

        let c2 = certify_generic_rank(&g2_family()).unwrap();
        assert_eq!(c2.conclusion_rank, Some(4));

        let g3 = ShiodaFamily::build(&rats(&[0, 1, -1, 2, -2, 3, -3])).unwrap();
        let c3 = certify_generic_rank(&g3).unwrap();
        assert_eq!(c3.conclusion_rank, Some(6));
    }

    #[test]
    fn biquadratic_certificate() {
        let q = QPoly::from_i64(&[4, 0, 11, 0, 1]);
        let fam = BiquadraticFamily::build(&rats(&[-1, 0, 1]), &q, None).unwrap();
        let cert = certify_biquadratic_ranks(&fam).unwrap();
        assert_eq!(cert.x1_rank, Some(2));
        assert_eq!(cert.x3_rank, Some(3));
        assert_eq!(cert.total_rank, Some(5));
        assert_eq!(cert.r_vector_rank, 3);
        assert!(cert.transcript.iter().all(|c| c.holds), "{:#?}", cert.transcript);
    }

    #[test]
    fn r_vectors_gain_rank_in_the_larger_space() {
        // inside the small space the three pair-classes sum to zero, but
        // with the q-root slots present the sum is nonzero, so the rank is
        // d1 = 3 rather than 2
        let q = QPoly::from_i64(&[4, 0, 11, 0, 1]);
        let fam = BiquadraticFamily::build(&rats(&[-1, 0, 1]), &q, None).unwrap();
        let vectors = specialize_r_to_two_torsion(&fam).unwrap();
        assert_eq!(vectors.len(), 3);
        assert_eq!(vectors[0].len(), 8);
        let mut acc = TwoTorsionVector::zero(7).unwrap();
        for v in &vectors {
            acc = acc.add(v).unwrap();
        }
        assert!(!acc.is_zero());
        assert_eq!(f2_rank(&vectors).unwrap(), 3);
    }

    #[test]
    fn twist_conclusion_statements() {
        let c = galois_twist_conclusion(1, &[1, 1, 1]).unwrap();
        assert_eq!(c.forced_torsion, 2);
        assert!(c.derivation.last().unwrap().contains("2*j(P_a) = 0"));

        let c3 = galois_twist_conclusion(3, &[1, 1, 0]).unwrap();
        assert_eq!(c3.forced_torsion, 6);
        assert!(galois_twist_conclusion(0, &[]).is_err());
    }
}
