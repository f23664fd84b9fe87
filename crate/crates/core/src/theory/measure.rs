//! The ν-level correlation measure as twice the sum of term areas.

use rayon::prelude::*;
use serde::Serialize;

use super::quadtree::{term_area_with, AreaEstimate, QuadLimits};
use super::terms::{enumerate_terms_with, TermLimits};
use crate::error::{Error, Result};
use crate::spacing::BoxRegion;
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureResult {
    pub nu: usize,
    #[serde(rename = "box")]
    pub region: BoxRegion,
    pub value: f64,
    pub error_bound: f64,
    pub term_count: usize,
    pub tol: f64,
}

impl MeasureResult {
    pub fn lower(&self) -> f64 {
        self.value - self.error_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error_bound
    }
}

pub fn nu_level_measure(nu: usize, region: &BoxRegion, tol: f64) -> Result<MeasureResult> {
    nu_level_measure_with(
        nu,
        region,
        tol,
        TermLimits::default(),
        QuadLimits::default(),
    )
}

/// Limiting ν-level measure of a box in the positive orthant, with
/// |value − truth| ≤ error_bound ≤ tol. Λ is taken as the box's largest
/// upper bound; each enumerated term gets bracket width tol / term count,
/// and term areas are summed in lexicographic (A, B) order.
pub fn nu_level_measure_with(
    nu: usize,
    region: &BoxRegion,
    tol: f64,
    term_limits: TermLimits,
    quad_limits: QuadLimits,
) -> Result<MeasureResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let lambda = region
        .intervals()
        .iter()
        .map(|&(_, hi)| hi)
        .fold(f64::NEG_INFINITY, f64::max);
    let terms = enumerate_terms_with(nu, lambda, region, term_limits)?;
    if terms.is_empty() {
        return Ok(MeasureResult {
            nu,
            region: region.clone(),
            value: 0.0,
            error_bound: 0.0,
            term_count: 0,
            tol,
        });
    }

    let per_term = tol / terms.len() as f64;
    let areas: Vec<AreaEstimate> = terms
        .par_iter()
        .map(|t| term_area_with(t, region, per_term, quad_limits))
        .collect::<Result<_>>()?;

    let value: CompensatedSum = areas.iter().map(AreaEstimate::value).collect();
    let error: CompensatedSum = areas.iter().map(AreaEstimate::error_bound).collect();
    Ok(MeasureResult {
        nu,
        region: region.clone(),
        value: 2.0 * value.value(),
        error_bound: 2.0 * error.value(),
        term_count: terms.len(),
        tol,
    })
}
