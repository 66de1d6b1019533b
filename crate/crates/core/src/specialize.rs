//! Specialization of the families at rational parameter values, and the
//! fiberwise rank-jump survey built on the height machinery.
//!
//! Specializing t ↦ t₀ is exact coefficient substitution; the resulting
//! fiber is validated against the bad-fiber locus and every specialized
//! section is checked on-curve. Specialization is a group homomorphism on
//! the Jacobian, which the property tests exercise directly against Cantor
//! arithmetic over Q(t).

use serde::Serialize;

use crate::conic::{conic_base_change, ConicBaseChange};
use crate::curve::{CurvePoint, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::families::{ShiodaFamily, TCurve};
use crate::field::Field;
use crate::heights::{gram_matrix, small_relation_search, HeightSettings, IntegralModel};
use crate::jacobian::MumfordDivisor;
use crate::poly::Polynomial;
use crate::ratfunc::RationalFunction;
use crate::rational::Rational;

type QPoly = Polynomial<Rational>;
type QCurve = HyperellipticCurve<Rational>;
type QPoint = CurvePoint<Rational>;

/// Which construction produced a specialized fiber.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberProvenance {
    /// Direct specialization of a split family at t = t₀.
    Family { family: String },
    /// Specialization of a conic base change at parameter s = s₀.
    ConicBaseChange {
        family: String,
        a: Rational,
        s: Rational,
    },
}

/// A specialized section, keeping its generic label.
#[derive(Clone, Debug)]
pub struct LabeledPoint {
    pub label: String,
    pub point: QPoint,
}

/// One fiber of a family over Q, with its specialized sections.
#[derive(Clone, Debug)]
pub struct SpecializedFiber {
    pub t0: Rational,
    pub curve: QCurve,
    pub points: Vec<LabeledPoint>,
    pub provenance: FiberProvenance,
}

fn eval_rf(t0: &Rational) -> impl Fn(&RationalFunction) -> Result<Rational> + '_ {
    move |rf: &RationalFunction| rf.eval(t0)
}

/// Substitute the parameter into a point over Q(t) and validate it on the
/// given fiber.
fn specialize_point(
    curve: &QCurve,
    point: &CurvePoint<RationalFunction>,
    t0: &Rational,
    label: &str,
) -> Result<LabeledPoint> {
    let spec = point.map(eval_rf(t0))?;
    if !curve.on_curve(&spec) {
        return Err(Error::Internal(format!(
            "specialized section {label} left the fiber at t0 = {t0}"
        )));
    }
    Ok(LabeledPoint {
        label: label.to_string(),
        point: spec,
    })
}

/// Substitute the parameter into a Mumford representative coefficientwise.
pub fn specialize_class(
    fiber_curve: &QCurve,
    class: &MumfordDivisor<RationalFunction>,
    t0: &Rational,
) -> Result<MumfordDivisor<Rational>> {
    let u = class.u().map_coeffs(eval_rf(t0))?;
    let v = class.v().map_coeffs(eval_rf(t0))?;
    MumfordDivisor::new(fiber_curve, u, v)
}

/// The fiber polynomial p(x) + t₀², after checking t₀ against the
/// bad-fiber locus.
fn fiber_curve(family: &ShiodaFamily, t0: &Rational) -> Result<QCurve> {
    let locus = family.bad_fiber_locus()?;
    if !locus.is_good(t0) {
        return Err(Error::BadSpecialization {
            t0: t0.to_string(),
            reason: "t0 is a root of the bad-fiber locus; the fiber is singular".into(),
        });
    }
    QCurve::new(family.p.add(&QPoly::constant(t0.square())))
}

/// Specialize the split family at t = t₀: the fiber y² = p(x) + t₀² with
/// the points P_i(t₀) = (e_i, t₀).
pub fn specialize_family(family: &ShiodaFamily, t0: &Rational) -> Result<SpecializedFiber> {
    let curve = fiber_curve(family, t0)?;
    let mut points = Vec::new();
    for i in 0..family.degree() {
        let sec = family.section(i);
        points.push(specialize_point(&curve, &sec.point, t0, &sec.label)?);
    }
    Ok(SpecializedFiber {
        t0: t0.clone(),
        curve,
        points,
        provenance: FiberProvenance::Family {
            family: family.describe(),
        },
    })
}

/// Specialize a conic base change at s = s₀: the fiber at t₀ = t(s₀) with
/// the pulled-back sections and the new section P_a = (a, v(s₀)).
pub fn specialize_base_changed(
    family: &ShiodaFamily,
    bc: &ConicBaseChange,
    s0: &Rational,
) -> Result<SpecializedFiber> {
    if bc.parametrization.excluded.contains(s0) {
        return Err(Error::BadSpecialization {
            t0: s0.to_string(),
            reason: "s = 0 is excluded by the conic parametrization".into(),
        });
    }
    if family.p.eval(&bc.a) != bc.parametrization.c {
        return Err(Error::Internal(
            "base change does not belong to the supplied family".into(),
        ));
    }
    let t0 = bc.parametrization.t_at(s0)?;
    let curve = fiber_curve(family, &t0)?;
    let mut points = Vec::new();
    for sec in &bc.pulled_back {
        points.push(specialize_point(&curve, &sec.point, s0, &sec.label)?);
    }
    points.push(specialize_point(
        &curve,
        &bc.new_section.point,
        s0,
        &bc.new_section.label,
    )?);
    Ok(SpecializedFiber {
        t0,
        curve,
        points,
        provenance: FiberProvenance::ConicBaseChange {
            family: family.describe(),
            a: bc.a.clone(),
            s: s0.clone(),
        },
    })
}

/// One surveyed fiber of the rank-jump search.
#[derive(Clone, Debug, Serialize)]
pub struct FiberRecord {
    pub s: Rational,
    pub t: Rational,
    /// Multiplicative height of t, for the density table.
    pub t_height: f64,
    pub gram_det: Option<f64>,
    pub max_entry_error: Option<f64>,
    pub relation: Option<Vec<i64>>,
    /// Both legs: determinant above eps and an empty relation search.
    pub certified: bool,
    /// 2g + 1 when certified, else the generic 2g.
    pub rank_lower_bound: usize,
    pub detail: String,
}

/// Cumulative count of certified fibers below a height cutoff, compared
/// against the T^(2/d) growth shape.
#[derive(Clone, Debug, Serialize)]
pub struct DensityRow {
    pub height_cutoff: f64,
    pub certified_count: usize,
    /// d in the exponent; the parametrized survey uses d = 2.
    pub degree: u32,
    /// certified_count / T^(2/d).
    pub ratio: f64,
}

/// Result of surveying a conic-base-changed family over a set of s-values.
#[derive(Clone, Debug, Serialize)]
pub struct RankJumpSurvey {
    pub family: String,
    pub a: Rational,
    pub generic_rank: usize,
    pub target_rank: usize,
    pub eps: f64,
    pub relation_bound: i64,
    pub settings: HeightSettings,
    pub records: Vec<FiberRecord>,
    pub certified_count: usize,
    pub density: Vec<DensityRow>,
}

/// Multiplicative height max(|num|, den) of a rational, as f64.
fn rational_height(t: &Rational) -> f64 {
    let num = t.numer().magnitude().to_string();
    let den = t.denom().magnitude().to_string();
    let parse = |s: &str| -> f64 { s.parse().unwrap_or(f64::INFINITY) };
    parse(&num).max(parse(&den))
}

/// Cumulative density table at the distinct heights of the certified fibers.
pub fn density_table(certified_heights: &[f64], degree: u32) -> Vec<DensityRow> {
    let mut heights: Vec<f64> = certified_heights.to_vec();
    heights.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    let mut seen = 0usize;
    let mut idx = 0usize;
    while idx < heights.len() {
        let cutoff = heights[idx];
        while idx < heights.len() && heights[idx] <= cutoff {
            seen += 1;
            idx += 1;
        }
        rows.push(DensityRow {
            height_cutoff: cutoff,
            certified_count: seen,
            degree,
            ratio: seen as f64 / cutoff.powf(2.0 / degree as f64),
        });
    }
    rows
}

/// For each s, specialize the conic-base-changed family, test the 2g + 1
/// candidate sections for independence (Gram determinant above eps AND an
/// empty exhaustive relation search), and record the verdicts. Fibers that
/// fail to specialize are recorded, not skipped; s = 0 is dropped. Fibers
/// are independent work items: they are scored on `threads` workers over
/// contiguous chunks and merged in input order, so the survey is identical
/// for every thread count.
pub fn rank_jump_search(
    family: &ShiodaFamily,
    a: &Rational,
    s_values: &[Rational],
    settings: &HeightSettings,
    eps: f64,
    relation_bound: i64,
    threads: usize,
) -> Result<RankJumpSurvey> {
    if family.genus() != 1 {
        return Err(Error::BadSearch(format!(
            "the survey needs a genus-1 family (height machinery restriction), got genus {}",
            family.genus()
        )));
    }
    let g = family.genus();
    let d = family.degree();
    let bc = conic_base_change(family, a)?;
    let bc = &bc;

    let live: Vec<&Rational> = s_values.iter().filter(|s| !s.is_zero()).collect();
    let threads = threads.clamp(1, live.len().max(1));
    let chunk = live.len().div_ceil(threads).max(1);
    let mut records = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for part in live.chunks(chunk) {
            handles.push(scope.spawn(move || {
                part.iter()
                    .map(|s0| survey_fiber(family, bc, s0, settings, eps, relation_bound, d, g))
                    .collect::<Vec<_>>()
            }));
        }
        for h in handles {
            records.extend(h.join().expect("survey worker panicked"));
        }
    });
    let certified_count = records.iter().filter(|r| r.certified).count();
    let heights: Vec<f64> = records
        .iter()
        .filter(|r| r.certified)
        .map(|r| r.t_height)
        .collect();
    Ok(RankJumpSurvey {
        family: family.describe(),
        a: a.clone(),
        generic_rank: 2 * g,
        target_rank: 2 * g + 1,
        eps,
        relation_bound,
        settings: *settings,
        records,
        certified_count,
        density: density_table(&heights, 2),
    })
}

#[allow(clippy::too_many_arguments)]
fn survey_fiber(
    family: &ShiodaFamily,
    bc: &ConicBaseChange,
    s0: &Rational,
    settings: &HeightSettings,
    eps: f64,
    relation_bound: i64,
    d: usize,
    g: usize,
) -> FiberRecord {
    let t_fallback = bc.parametrization.t_at(s0).unwrap_or_else(|_| Rational::zero());
    let computed = (|| -> Result<FiberRecord> {
        let fiber = specialize_base_changed(family, bc, s0)?;
        // candidates: P_1 .. P_{d-1} plus P_a — 2g + 1 points
        let mut candidates: Vec<QPoint> = fiber.points[..d - 1]
            .iter()
            .map(|lp| lp.point.clone())
            .collect();
        candidates.push(fiber.points[d].point.clone());
        let model = IntegralModel::from_curve(&fiber.curve)?;
        let moved: Result<Vec<QPoint>> = candidates.iter().map(|p| model.transport(p)).collect();
        let moved = moved?;
        let gram = gram_matrix(&model, &moved, settings)?;
        let relation = small_relation_search(&model, &moved, relation_bound)?;
        let certified = gram.det > eps && relation.is_none();
        let detail = if certified {
            format!(
                "det {:.6e} clears eps and no relation up to {relation_bound}",
                gram.det
            )
        } else {
            format!(
                "det {:.6e}, relation {:?}: fiber not certified",
                gram.det, relation
            )
        };
        Ok(FiberRecord {
            s: s0.clone(),
            t: fiber.t0.clone(),
            t_height: rational_height(&fiber.t0),
            gram_det: Some(gram.det),
            max_entry_error: Some(gram.max_entry_error),
            relation,
            certified,
            rank_lower_bound: if certified { 2 * g + 1 } else { 2 * g },
            detail,
        })
    })();
    computed.unwrap_or_else(|e| FiberRecord {
        s: s0.clone(),
        t: t_fallback.clone(),
        t_height: rational_height(&t_fallback),
        gram_det: None,
        max_entry_error: None,
        relation: None,
        certified: false,
        rank_lower_bound: 2 * g,
        detail: format!("fiber not scored: {e}"),
    })
}

/// Convenience wrapper used by tests and the harness: the first d − 1
/// specialized sections plus the new section, already transported to the
/// integral model.
pub fn candidate_points(fiber: &SpecializedFiber, model: &IntegralModel) -> Result<Vec<QPoint>> {
    let d = fiber.points.len() - 1;
    let mut out = Vec::new();
    for lp in &fiber.points[..d - 1] {
        out.push(model.transport(&lp.point)?);
    }
    out.push(model.transport(&fiber.points[d].point)?);
    Ok(out)
}

/// Expose the generic curve of a base change for callers that already
/// specialize by hand.
pub fn base_change_curve(bc: &ConicBaseChange) -> &TCurve {
    &bc.curve
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::{cantor_add, embed};
    use num_bigint::BigInt;
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

    #[test]
    fn genus_one_fiber_at_one() {
        let fam = g1_family();
        let fiber = specialize_family(&fam, &q(1)).unwrap();
        assert_eq!(fiber.curve.f(), &QPoly::from_i64(&[1, -1, 0, 1]));
        let coords: Vec<(Rational, Rational)> = fiber
            .points
            .iter()
            .map(|lp| match &lp.point {
                CurvePoint::Affine { x, y } => (x.clone(), y.clone()),
                _ => panic!("unexpected point at infinity"),
            })
            .collect();
        assert_eq!(
            coords,
            vec![(q(-1), q(1)), (q(0), q(1)), (q(1), q(1))]
        );
    }

    #[test]
    fn singular_fiber_rejected() {
        // p = x(x−3)(x−8) has the critical value p(6) = −36, so t = ±6 hits
        // the bad-fiber locus exactly
        let fam = ShiodaFamily::build(&[q(0), q(3), q(8)]).unwrap();
        let locus = fam.bad_fiber_locus().unwrap();
        assert!(!locus.is_good(&q(6)));
        assert!(matches!(
            specialize_family(&fam, &q(6)),
            Err(Error::BadSpecialization { .. })
        ));
        assert!(specialize_family(&fam, &q(5)).is_ok());
    }

    #[test]
    fn base_changed_fiber_at_two() {
        let fam = g1_family();
        let bc = conic_base_change(&fam, &q(2)).unwrap();
        let fiber = specialize_base_changed(&fam, &bc, &q(2)).unwrap();
        assert_eq!(fiber.t0, qq(1, 2));
        assert_eq!(
            fiber.curve.f(),
            &QPoly::new(vec![qq(1, 4), q(-1), q(0), q(1)])
        );
        let pa = fiber.points.last().unwrap();
        assert_eq!(pa.label, "P_a");
        match &pa.point {
            CurvePoint::Affine { x, y } => {
                assert_eq!((x.clone(), y.clone()), (q(2), qq(5, 2)));
            }
            _ => panic!("unexpected point at infinity"),
        }
        assert!(matches!(
            specialize_base_changed(&fam, &bc, &q(0)),
            Err(Error::BadSpecialization { .. })
        ));
    }

    fn good_t_values(fam: &ShiodaFamily) -> Vec<Rational> {
        let locus = fam.bad_fiber_locus().unwrap();
        (-6..=6)
            .map(Rational::from_int)
            .filter(|t| !t.is_zero() && locus.is_good(t))
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// specialize ∘ embed = specialize on Mumford coefficients.
        #[test]
        fn specialization_commutes_with_embed(idx in 0usize..5, pick in 0usize..13) {
            for fam in [g1_family(), g2_family()] {
                let d = fam.degree();
                let sec = fam.section(idx % d);
                let ts = good_t_values(&fam);
                let t0 = &ts[pick % ts.len()];
                let fiber = specialize_family(&fam, t0).unwrap();
                let generic_class = embed(&fam.curve, &sec.point).unwrap();
                let spec_of_class = specialize_class(&fiber.curve, &generic_class, t0).unwrap();
                let spec_point = sec.point.map(eval_rf(t0)).unwrap();
                let class_of_spec = embed(&fiber.curve, &spec_point).unwrap();
                prop_assert_eq!(spec_of_class, class_of_spec);
            }
        }

        /// specialize(x + y over Q(t)) = specialize(x) + specialize(y).
        #[test]
        fn specialization_is_a_homomorphism(i in 0usize..5, j in 0usize..5, pick in 0usize..13) {
            for fam in [g1_family(), g2_family()] {
                let d = fam.degree();
                let (si, sj) = (fam.section(i % d), fam.section(j % d));
                let ts = good_t_values(&fam);
                let t0 = &ts[pick % ts.len()];
                let fiber = specialize_family(&fam, t0).unwrap();
                let ci = embed(&fam.curve, &si.point).unwrap();
                let cj = embed(&fam.curve, &sj.point).unwrap();
                let generic_sum = cantor_add(&fam.curve, &ci, &cj).unwrap();
                let lhs = specialize_class(&fiber.curve, &generic_sum, t0).unwrap();
                let rhs = cantor_add(
                    &fiber.curve,
                    &specialize_class(&fiber.curve, &ci, t0).unwrap(),
                    &specialize_class(&fiber.curve, &cj, t0).unwrap(),
                ).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn generic_relation_specializes() {
        // direct leg: the generic sum relation survives specialization
        // exactly, verified by Cantor arithmetic on each fiber
        let fam = g1_family();
        for t0 in [q(1), q(4)] {
            let fiber = specialize_family(&fam, &t0).unwrap();
            let mut acc = MumfordDivisor::identity();
            for lp in &fiber.points {
                let class = embed(&fiber.curve, &lp.point).unwrap();
                acc = cantor_add(&fiber.curve, &acc, &class).unwrap();
            }
            assert!(acc.is_identity(), "sum relation failed at t0 = {t0}");
        }

        let points_at = |t0: &Rational| {
            let fiber = specialize_family(&fam, t0).unwrap();
            let model = IntegralModel::from_curve(&fiber.curve).unwrap();
            let pts: Vec<QPoint> = fiber
                .points
                .iter()
                .map(|lp| model.transport(&lp.point).unwrap())
                .collect();
            (model, pts)
        };

        // search leg: at a faithful fiber the sum relation is the first hit
        let (model4, pts4) = points_at(&q(4));
        let rel = small_relation_search(&model4, &pts4, 3).unwrap();
        assert_eq!(rel, Some(vec![1, 1, 1]));

        // at t0 = 1 the sections degenerate further (the fiber has rank 1,
        // with (−1,1) = 2·(1,1)), so a tighter relation comes first; verify
        // the returned coefficients by exact arithmetic
        let (model1, pts1) = points_at(&q(1));
        let found = small_relation_search(&model1, &pts1, 3)
            .unwrap()
            .expect("degenerate fiber carries a relation");
        let mut acc = QPoint::Infinity;
        for (n, p) in found.iter().zip(&pts1) {
            let term = crate::weierstrass::ec_scalar_mul(&model1.curve, *n, p).unwrap();
            acc = crate::weierstrass::ec_add(&model1.curve, &acc, &term).unwrap();
        }
        assert!(
            crate::heights::torsion_order(&model1, &acc).unwrap().is_some(),
            "search returned a non-relation {found:?}"
        );
    }

    #[test]
    fn survey_requires_genus_one() {
        let fam = g2_family();
        let err = rank_jump_search(
            &fam,
            &q(3),
            &[q(2), q(3)],
            &HeightSettings::default(),
            1e-2,
            10,
            1,
        );
        assert!(matches!(err, Err(Error::BadSearch(_))));
    }

    #[test]
    fn survey_smoke_on_small_range() {
        let fam = g1_family();
        let s_values: Vec<Rational> = (1..=6).map(Rational::from_int).collect();
        let survey = rank_jump_search(
            &fam,
            &q(2),
            &s_values,
            &HeightSettings::default(),
            1e-2,
            6,
            2,
        )
        .unwrap();
        assert_eq!(survey.generic_rank, 2);
        assert_eq!(survey.target_rank, 3);
        assert_eq!(survey.records.len(), 6);
        // the degenerate fiber at s = 2 (where 2·j(P2) = j(P3) on the
        // specialized curve) must not be certified
        let s2 = survey.records.iter().find(|r| r.s == q(2)).unwrap();
        assert!(!s2.certified, "{}", s2.detail);
        // at least one other fiber certifies a jump
        assert!(survey.certified_count >= 1, "{:#?}", survey.records);
        for row in &survey.density {
            assert!(row.ratio.is_finite());
        }
    }

    #[test]
    fn survey_is_thread_count_invariant() {
        let fam = g1_family();
        let s_values: Vec<Rational> = (1..=4).map(Rational::from_int).collect();
        let settings = HeightSettings {
            budget: 3,
            target_error: 1e-1,
            strict: false,
        };
        let run = |threads: usize| {
            let survey =
                rank_jump_search(&fam, &q(2), &s_values, &settings, 1e-2, 4, threads).unwrap();
            serde_json::to_string(&survey).unwrap()
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(8));
    }

    #[test]
    fn density_table_counts_cumulatively() {
        let rows = density_table(&[2.0, 2.0, 8.0, 32.0], 2);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].certified_count, 2);
        assert_eq!(rows[1].certified_count, 3);
        assert_eq!(rows[2].certified_count, 4);
        assert!((rows[0].ratio - 1.0).abs() < 1e-12);
    }
}
