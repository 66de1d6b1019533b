//! Rank bookkeeping on elliptic and hyperelliptic fibrations.
//!
//! The central identity relates the Néron–Severi rank ρ of a fibered surface
//! to the generic Mordell–Weil rank r and the component counts m_v of the
//! singular fibers: ρ = r + 2 + Σ(m_v − 1). Combined with a second fibration
//! of the same surface as a conic bundle (ρ = 2 + #degenerate fibers), it
//! pins down generic ranks without computing Néron–Severi lattices: the two
//! fibration legs eliminate the unknown component count at infinity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Input data for the fibration rank identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FibrationData {
    /// Néron–Severi rank of the fibered surface.
    pub rho: i64,
    /// Component counts m_v ≥ 1, one per singular fiber.
    pub fiber_components: Vec<i64>,
    /// Rank of the constant part (0 when the trace is trivial).
    pub trace_rank_contribution: i64,
}

impl FibrationData {
    pub fn new(rho: i64, fiber_components: Vec<i64>) -> Self {
        FibrationData {
            rho,
            fiber_components,
            trace_rank_contribution: 0,
        }
    }
}

/// Generic Mordell–Weil rank from ρ = r + 2 + Σ(m_v − 1), minus the constant
/// part. Errors when the data is inconsistent (negative rank).
pub fn shioda_tate_rank(data: &FibrationData) -> Result<i64> {
    if data.rho < 2 {
        return Err(Error::BadFibration(format!(
            "Neron-Severi rank must be at least 2, got {}",
            data.rho
        )));
    }
    let mut correction = 0i64;
    for (i, &m) in data.fiber_components.iter().enumerate() {
        if m < 1 {
            return Err(Error::BadFibration(format!(
                "fiber {i} has component count {m} < 1"
            )));
        }
        correction += m - 1;
    }
    let r = data.rho - 2 - correction - data.trace_rank_contribution;
    if r < 0 {
        return Err(Error::BadFibration(format!(
            "inconsistent data: rho = {}, corrections = {}, trace = {} give negative rank {r}",
            data.rho, correction, data.trace_rank_contribution
        )));
    }
    Ok(r)
}

/// Néron–Severi rank of a conic bundle: 2 plus the number of degenerate
/// fibers, counted with their split components.
pub fn conic_bundle_rho(degenerate_fibers: i64, reducible_splittings: i64) -> Result<i64> {
    if degenerate_fibers < 0 || reducible_splittings < 0 {
        return Err(Error::BadFibration("fiber counts must be nonnegative".into()));
    }
    Ok(2 + degenerate_fibers + reducible_splittings)
}

/// Which family a rank table describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// y² = p(x) + t² with deg p = d.
    Shioda { d: usize },
    /// Double cover with deg p = d1, deg q = d2.
    Biquadratic { d1: usize, d2: usize },
}

/// Expected generic ranks, the upper-bound leg of the certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericRankTable {
    pub kind: FamilyKind,
    /// Rank over Q(t) of the base layer (the split family).
    pub x1: usize,
    /// Rank over Q(t) of the double-cover layer, when present.
    pub x3: Option<usize>,
    /// Total rank modulo the constant part.
    pub total: usize,
}

/// Closed-form generic ranks via the two-fibration elimination.
///
/// For the split family of degree d the surface is also a conic bundle over
/// the x-line whose degenerate-fiber count gives ρ − m_∞ = d, and the
/// fibration identity then yields r = d − 1 = 2g. For the double cover,
/// the same argument on each layer gives (d₁ − 1, d₁), total 2d₁ − 1.
pub fn generic_rank_table(kind: FamilyKind) -> Result<GenericRankTable> {
    match kind {
        FamilyKind::Shioda { d } => {
            if d < 3 || d % 2 == 0 {
                return Err(Error::BadFibration(format!(
                    "split family needs odd degree >= 3, got {d}"
                )));
            }
            Ok(GenericRankTable {
                kind,
                x1: d - 1,
                x3: None,
                total: d - 1,
            })
        }
        FamilyKind::Biquadratic { d1, d2 } => {
            if d1 < 3 || d1 % 2 == 0 {
                return Err(Error::BadFibration(format!(
                    "first factor needs odd degree >= 3, got {d1}"
                )));
            }
            if d2 == 0 || d2 % 2 != 0 {
                return Err(Error::BadFibration(format!(
                    "second factor needs positive even degree, got {d2}"
                )));
            }
            Ok(GenericRankTable {
                kind,
                x1: d1 - 1,
                x3: Some(d1),
                total: 2 * d1 - 1,
            })
        }
    }
}
