//! Python bindings for the rank-jump toolkit.
//!
//! Exposes the family builders with their certificates, exact Jacobian
//! arithmetic over the rationals, canonical heights with Gram-matrix
//! independence tests, the conic and double base changes, and the fibration
//! rank bookkeeping. Rationals cross the boundary as "m/n" strings; rich
//! artifacts (certificates, surveys, reports) cross as JSON strings.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rankjump_core::conic::{
    conic_base_change, double_base_change, double_jump_report, new_section_independence,
    quadratic_pullback, search_points_on_cab_threaded,
};
use rankjump_core::counting::nontorsion_witness_by_orders;
use rankjump_core::curve::{CurvePoint, HyperellipticCurve};
use rankjump_core::error::Error;
use rankjump_core::families::{Family as CoreFamily, FamilyConfig};

use rankjump_core::heights::{
    canonical_height, gram_matrix, small_relation_search, torsion_order, HeightSettings,
    IntegralModel, QPoint,
};
use rankjump_core::jacobian::{
    cantor_add, embed, negate, preimage_degree as core_preimage_degree, scalar_mul,
    MumfordDivisor,
};
use rankjump_core::poly::Polynomial;
use rankjump_core::rational::Rational;
use rankjump_core::specialize::{rank_jump_search, specialize_family};
use rankjump_core::surface::{shioda_tate_rank as core_shioda_tate, FibrationData};
use rankjump_core::twotorsion::{certify_biquadratic_ranks, certify_generic_rank};

type QPoly = Polynomial<Rational>;
type QCurve = HyperellipticCurve<Rational>;
type QClass = MumfordDivisor<Rational>;

fn core_err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_q(text: &str) -> PyResult<Rational> {
    text.trim()
        .parse::<Rational>()
        .map_err(|e| PyValueError::new_err(format!("bad rational {text:?}: {e}")))
}

fn parse_q_list(texts: &[String]) -> PyResult<Vec<Rational>> {
    texts.iter().map(|t| parse_q(t)).collect()
}

fn json_of(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("artifact serializes")
}

fn point_strings(p: &QPoint) -> Option<(String, String)> {
    match p {
        CurvePoint::Infinity => None,
        CurvePoint::Affine { x, y } => Some((x.to_string(), y.to_string())),
    }
}

// ---------------------------------------------------------------------------
// exact Jacobian arithmetic over Q
// ---------------------------------------------------------------------------

/// A hyperelliptic curve y² = f(x) with f of odd degree over the rationals.
#[pyclass(frozen)]
struct Curve {
    inner: QCurve,
}

#[pymethods]
impl Curve {
    /// Build from the coefficients of f, ascending, as "m/n" strings.
    #[new]
    fn new(f_coeffs: Vec<String>) -> PyResult<Self> {
        let coeffs = parse_q_list(&f_coeffs)?;
        let curve = QCurve::new(QPoly::new(coeffs)).map_err(core_err)?;
        Ok(Curve { inner: curve })
    }

    fn genus(&self) -> usize {
        self.inner.genus()
    }

    fn equation(&self) -> String {
        format!("y^2 = {}", self.inner.f())
    }

    fn on_curve(&self, x: &str, y: &str) -> PyResult<bool> {
        let p = CurvePoint::affine(parse_q(x)?, parse_q(y)?);
        Ok(self.inner.on_curve(&p))
    }

    /// Divisor class (P) − (∞) of an affine point.
    fn embed(&self, x: &str, y: &str) -> PyResult<DivisorClass> {
        let p = CurvePoint::affine(parse_q(x)?, parse_q(y)?);
        let class = embed(&self.inner, &p).map_err(core_err)?;
        Ok(DivisorClass {
            curve: self.inner.clone(),
            class,
        })
    }

    fn identity(&self) -> DivisorClass {
        DivisorClass {
            curve: self.inner.clone(),
            class: MumfordDivisor::identity(),
        }
    }

    /// Validated class from Mumford coordinates (u, v), ascending coefficients.
    fn divisor(&self, u: Vec<String>, v: Vec<String>) -> PyResult<DivisorClass> {
        let u = QPoly::new(parse_q_list(&u)?);
        let v = QPoly::new(parse_q_list(&v)?);
        let class = MumfordDivisor::new(&self.inner, u, v).map_err(core_err)?;
        Ok(DivisorClass {
            curve: self.inner.clone(),
            class,
        })
    }

    fn __repr__(&self) -> String {
        self.equation()
    }
}

/// A point of the Jacobian in reduced Mumford form (u, v).
#[pyclass(frozen)]
struct DivisorClass {
    curve: QCurve,
    class: QClass,
}

impl DivisorClass {
    fn same_curve(&self, other: &DivisorClass) -> PyResult<()> {
        if self.curve.f() != other.curve.f() {
            return Err(PyValueError::new_err(
                "divisor classes live on different curves",
            ));
        }
        Ok(())
    }
}

#[pymethods]
impl DivisorClass {
    fn u(&self) -> Vec<String> {
        self.class.u().coeffs().iter().map(|c| c.to_string()).collect()
    }

    fn v(&self) -> Vec<String> {
        self.class.v().coeffs().iter().map(|c| c.to_string()).collect()
    }

    fn is_identity(&self) -> bool {
        self.class.is_identity()
    }

    fn add(&self, other: &DivisorClass) -> PyResult<DivisorClass> {
        self.same_curve(other)?;
        let class = cantor_add(&self.curve, &self.class, &other.class).map_err(core_err)?;
        Ok(DivisorClass {
            curve: self.curve.clone(),
            class,
        })
    }

    fn neg(&self) -> PyResult<DivisorClass> {
        let class = negate(&self.curve, &self.class).map_err(core_err)?;
        Ok(DivisorClass {
            curve: self.curve.clone(),
            class,
        })
    }

    fn mul(&self, n: i64) -> PyResult<DivisorClass> {
        let class = scalar_mul(&self.curve, n, &self.class).map_err(core_err)?;
        Ok(DivisorClass {
            curve: self.curve.clone(),
            class,
        })
    }

    /// Torsion sieve by exact reduced orders at the given odd primes;
    /// returns the witness record as JSON.
    fn nontorsion_witness_json(&self, primes: Vec<u64>) -> PyResult<String> {
        let w = nontorsion_witness_by_orders(&self.curve, &self.class, &primes)
            .map_err(core_err)?;
        Ok(json_of(&w))
    }

    fn __eq__(&self, other: &DivisorClass) -> bool {
        self.curve.f() == other.curve.f() && self.class == other.class
    }

    fn __repr__(&self) -> String {
        format!("{}", self.class)
    }
}

// ---------------------------------------------------------------------------
// specialized fibers: heights, Gram matrices, relation search
// ---------------------------------------------------------------------------

/// One specialized fiber of a split family, carried on its integral model.
#[pyclass(frozen)]
struct SpecializedCurve {
    model: IntegralModel,
    /// Section images transported to the integral model, with labels.
    points: Vec<(String, QPoint)>,
}

impl SpecializedCurve {
    fn parse_point(&self, x: &str, y: &str) -> PyResult<QPoint> {
        let p = CurvePoint::affine(parse_q(x)?, parse_q(y)?);
        if !self.model.curve.on_curve(&p) {
            return Err(PyValueError::new_err(format!(
                "({x}, {y}) is not on {}",
                self.equation()
            )));
        }
        Ok(p)
    }

    fn settings(budget: u32, target_error: f64) -> HeightSettings {
        HeightSettings {
            budget,
            target_error,
            strict: false,
        }
    }
}

#[pymethods]
impl SpecializedCurve {
    fn equation(&self) -> String {
        format!("y^2 = {}", self.model.curve.f())
    }

    /// Ascending coefficients of the integral-model polynomial f.
    fn f_coeffs(&self) -> Vec<String> {
        self.model.curve.f().coeffs().iter().map(|c| c.to_string()).collect()
    }

    /// Labelled integral-model images of the family sections.
    fn points(&self) -> Vec<(String, String, String)> {
        self.points
            .iter()
            .filter_map(|(label, p)| {
                point_strings(p).map(|(x, y)| (label.clone(), x, y))
            })
            .collect()
    }

    /// Canonical height with its error bound: (value, error_bound).
    #[pyo3(signature = (x, y, budget = 6, target_error = 1e-3))]
    fn canonical_height(
        &self,
        x: &str,
        y: &str,
        budget: u32,
        target_error: f64,
    ) -> PyResult<(f64, f64)> {
        let p = self.parse_point(x, y)?;
        let h = canonical_height(&self.model, &p, &Self::settings(budget, target_error))
            .map_err(core_err)?;
        Ok((h.value, h.error_bound))
    }

    /// Exact torsion order when the point is torsion (order ≤ 12).
    fn torsion_order(&self, x: &str, y: &str) -> PyResult<Option<i64>> {
        let p = self.parse_point(x, y)?;
        torsion_order(&self.model, &p).map_err(core_err)
    }

    /// Height-pairing Gram matrix report for the given points, as JSON.
    #[pyo3(signature = (points, budget = 6, target_error = 1e-3))]
    fn gram_json(
        &self,
        points: Vec<(String, String)>,
        budget: u32,
        target_error: f64,
    ) -> PyResult<String> {
        let pts = points
            .iter()
            .map(|(x, y)| self.parse_point(x, y))
            .collect::<PyResult<Vec<_>>>()?;
        let report = gram_matrix(&self.model, &pts, &Self::settings(budget, target_error))
            .map_err(core_err)?;
        Ok(json_of(&report))
    }

    /// Exhaustive small integer relation among the points, or None.
    #[pyo3(signature = (points, bound = 10))]
    fn small_relation(
        &self,
        points: Vec<(String, String)>,
        bound: i64,
    ) -> PyResult<Option<Vec<i64>>> {
        let pts = points
            .iter()
            .map(|(x, y)| self.parse_point(x, y))
            .collect::<PyResult<Vec<_>>>()?;
        small_relation_search(&self.model, &pts, bound).map_err(core_err)
    }
}

// ---------------------------------------------------------------------------
// families
// ---------------------------------------------------------------------------

/// A split family y² = p(x) + t², or its double cover when q is given.
#[pyclass(frozen)]
struct Family {
    config: FamilyConfig,
    inner: CoreFamily,
}

impl Family {
    fn split(&self) -> PyResult<&rankjump_core::families::ShiodaFamily> {
        match &self.inner {
            CoreFamily::Shioda(f) => Ok(f),
            CoreFamily::Biquadratic(_) => Err(PyValueError::new_err(
                "this operation needs a split family (no q)",
            )),
        }
    }

    fn double_cover(&self) -> PyResult<&rankjump_core::families::BiquadraticFamily> {
        match &self.inner {
            CoreFamily::Biquadratic(f) => Ok(f),
            CoreFamily::Shioda(_) => Err(PyValueError::new_err(
                "this operation needs a double-cover family (config with q)",
            )),
        }
    }
}

#[pymethods]
impl Family {
    /// Build from the roots of p and, for the double cover, the ascending
    /// coefficients of q with optional square roots a_i of q(e_i).
    #[new]
    #[pyo3(signature = (p_roots, q = None, a = None))]
    fn new(p_roots: Vec<String>, q: Option<Vec<String>>, a: Option<Vec<String>>) -> PyResult<Self> {
        let config = FamilyConfig {
            p_roots: parse_q_list(&p_roots)?,
            q: q.map(|c| parse_q_list(&c)).transpose()?,
            a: a.map(|c| parse_q_list(&c)).transpose()?,
        };
        let inner = config.build().map_err(core_err)?;
        Ok(Family { config, inner })
    }

    /// Rebuild from a configuration JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let config = FamilyConfig::from_json(text).map_err(core_err)?;
        let inner = config.build().map_err(core_err)?;
        Ok(Family { config, inner })
    }

    fn config_json(&self) -> String {
        self.config.to_json()
    }

    fn describe(&self) -> String {
        match &self.inner {
            CoreFamily::Shioda(f) => f.describe(),
            CoreFamily::Biquadratic(f) => f.describe(),
        }
    }

    fn kind(&self) -> &'static str {
        match &self.inner {
            CoreFamily::Shioda(_) => "split",
            CoreFamily::Biquadratic(_) => "double_cover",
        }
    }

    fn genus(&self) -> usize {
        match &self.inner {
            CoreFamily::Shioda(f) => f.genus(),
            CoreFamily::Biquadratic(f) => f.x3_genus(),
        }
    }

    /// True when the exact divisor-class relation suite holds.
    fn verify(&self) -> bool {
        match &self.inner {
            CoreFamily::Shioda(f) => f.verify_relations().passed(),
            CoreFamily::Biquadratic(f) => {
                f.x1.verify_relations().passed() && f.verify_relations().passed()
            }
        }
    }

    fn verify_json(&self) -> String {
        match &self.inner {
            CoreFamily::Shioda(f) => json_of(&f.verify_relations()),
            CoreFamily::Biquadratic(f) => json_of(&vec![
                f.x1.verify_relations(),
                f.verify_relations(),
            ]),
        }
    }

    /// Certified generic rank when the lower and upper bounds meet:
    /// 2g for a split family, 2d₁ − 1 for the double cover.
    fn certify(&self) -> PyResult<Option<usize>> {
        match &self.inner {
            CoreFamily::Shioda(f) => {
                Ok(certify_generic_rank(f).map_err(core_err)?.conclusion_rank)
            }
            CoreFamily::Biquadratic(f) => {
                Ok(certify_biquadratic_ranks(f).map_err(core_err)?.total_rank)
            }
        }
    }

    fn certify_json(&self) -> PyResult<String> {
        match &self.inner {
            CoreFamily::Shioda(f) => Ok(json_of(&certify_generic_rank(f).map_err(core_err)?)),
            CoreFamily::Biquadratic(f) => {
                Ok(json_of(&certify_biquadratic_ranks(f).map_err(core_err)?))
            }
        }
    }

    /// Specialize a split family at a good t, transported to the integral
    /// model used by the height machinery.
    fn specialize(&self, t: &str) -> PyResult<SpecializedCurve> {
        let fam = self.split()?;
        let fiber = specialize_family(fam, &parse_q(t)?).map_err(core_err)?;
        let model = IntegralModel::from_curve(&fiber.curve).map_err(core_err)?;
        let points = fiber
            .points
            .iter()
            .map(|lp| {
                let moved = model.transport(&lp.point).map_err(core_err)?;
                Ok((lp.label.clone(), moved))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(SpecializedCurve { model, points })
    }

    /// σ-action record certifying rank 0 over the subfield and 2g over the
    /// quadratic extension, as JSON.
    fn quadratic_pullback_json(&self) -> PyResult<String> {
        let fam = self.split()?;
        Ok(json_of(&quadratic_pullback(fam).map_err(core_err)?))
    }

    /// Conic base change through x = a: parametrization, curve over Q(s),
    /// and the pulled-back sections, as JSON.
    fn conic_base_change_json(&self, a: &str) -> PyResult<String> {
        let fam = self.split()?;
        let bc = conic_base_change(fam, &parse_q(a)?).map_err(core_err)?;
        let sections: Vec<_> = bc
            .pulled_back
            .iter()
            .chain(std::iter::once(&bc.new_section))
            .map(|s| match &s.point {
                CurvePoint::Infinity => serde_json::json!({ "label": s.label }),
                CurvePoint::Affine { x, y } => serde_json::json!({
                    "label": s.label,
                    "x": x.to_string(),
                    "y": y.to_string(),
                }),
            })
            .collect();
        Ok(serde_json::json!({
            "a": bc.a.to_string(),
            "c": bc.parametrization.c.to_string(),
            "t_of_s": bc.parametrization.t_of_s.to_string(),
            "v_of_s": bc.parametrization.v_of_s.to_string(),
            "curve": format!("y^2 = {}", bc.curve.f()),
            "sections": sections,
        })
        .to_string())
    }

    /// New-section independence certificate after the conic base change.
    #[pyo3(signature = (a, s_values, primes = vec![5, 7, 11]))]
    fn new_section_independence_json(
        &self,
        a: &str,
        s_values: Vec<String>,
        primes: Vec<u64>,
    ) -> PyResult<String> {
        let fam = self.split()?;
        let s = parse_q_list(&s_values)?;
        let cert =
            new_section_independence(fam, &parse_q(a)?, &s, &primes).map_err(core_err)?;
        Ok(json_of(&cert))
    }

    /// Rank-jump survey over the given s values, as JSON.
    #[pyo3(signature = (a, s_values, eps = 1e-2, doublings = 6, target_error = 1e-3,
                        relation_bound = 10, threads = 1))]
    #[allow(clippy::too_many_arguments)]
    fn rank_jump_survey_json(
        &self,
        a: &str,
        s_values: Vec<String>,
        eps: f64,
        doublings: u32,
        target_error: f64,
        relation_bound: i64,
        threads: usize,
    ) -> PyResult<String> {
        let fam = self.split()?;
        let s = parse_q_list(&s_values)?;
        let settings = HeightSettings {
            budget: doublings,
            target_error,
            strict: false,
        };
        let survey = rank_jump_search(fam, &parse_q(a)?, &s, &settings, eps, relation_bound, threads)
            .map_err(core_err)?;
        Ok(json_of(&survey))
    }

    /// Double extension through (a, b) with its rational-point search, as
    /// JSON: the curve record, the points found, and the hit count.
    #[pyo3(signature = (a, b, height = 200, threads = 1))]
    fn double_base_change_json(
        &self,
        a: &str,
        b: &str,
        height: i64,
        threads: usize,
    ) -> PyResult<String> {
        let fam = self.double_cover()?;
        let curve = double_base_change(fam, &parse_q(a)?, &parse_q(b)?);
        let points = search_points_on_cab_threaded(&curve, height, threads).map_err(core_err)?;
        Ok(serde_json::json!({
            "curve": serde_json::to_value(&curve).expect("curve serializes"),
            "points_found": points.len(),
            "points": serde_json::to_value(&points).expect("points serialize"),
        })
        .to_string())
    }

    /// Independence scoring of the enlarged candidate sets on both layers
    /// for each point found on the double extension, as JSON.
    #[pyo3(signature = (a, b, height = 200, threads = 1, max_points = 3))]
    fn double_jump_report_json(
        &self,
        a: &str,
        b: &str,
        height: i64,
        threads: usize,
        max_points: usize,
    ) -> PyResult<String> {
        let fam = self.double_cover()?;
        let a = parse_q(a)?;
        let b = parse_q(b)?;
        let curve = double_base_change(fam, &a, &b);
        let points = search_points_on_cab_threaded(&curve, height, threads).map_err(core_err)?;
        let cap = points.len().min(max_points.max(1));
        let report = double_jump_report(
            fam,
            &a,
            &b,
            &points[..cap],
            &HeightSettings::default(),
            1e-2,
            10,
        )
        .map_err(core_err)?;
        Ok(json_of(&report))
    }

    fn __repr__(&self) -> String {
        self.describe()
    }
}

// ---------------------------------------------------------------------------
// module-level helpers
// ---------------------------------------------------------------------------

/// Degree of the multiplication-by-n preimage of a curve in its Jacobian:
/// n^(2g).
#[pyfunction]
fn preimage_degree(n: u32, genus: u32) -> PyResult<BigInt> {
    core_preimage_degree(n, genus).map_err(core_err)
}

/// Generic rank from the fibration identity rho = r + 2 + Σ(m_v − 1) + trace.
#[pyfunction]
#[pyo3(signature = (rho, fiber_components, trace = 0))]
fn shioda_tate_rank(rho: i64, fiber_components: Vec<i64>, trace: i64) -> PyResult<i64> {
    let mut data = FibrationData::new(rho, fiber_components);
    data.trace_rank_contribution = trace;
    core_shioda_tate(&data).map_err(core_err)
}

#[pymodule]
fn rankjump_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Family>()?;
    m.add_class::<SpecializedCurve>()?;
    m.add_class::<Curve>()?;
    m.add_class::<DivisorClass>()?;
    m.add_function(wrap_pyfunction!(preimage_degree, m)?)?;
    m.add_function(wrap_pyfunction!(shioda_tate_rank, m)?)?;
    Ok(())
}
