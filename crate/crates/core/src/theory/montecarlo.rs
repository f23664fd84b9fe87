//! Plain Monte-Carlo estimates of term areas, as a cross-check for the
//! certified quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::maps::{map_t_ab, map_t_forward};
use super::terms::{enumerate_terms_with, CorrelationTerm, RegionOmega, TermLimits};
use crate::error::{Error, Result};
use crate::spacing::BoxRegion;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Whether `(x, y) ∈ Ω_{A,B,Λ}` and `Φ_{A,B}(x, y)` lies in the box.
pub fn point_in_term_region(term: &CorrelationTerm, region: &BoxRegion, x: f64, y: f64) -> bool {
    let omega_ok = 0.0 <= x
        && x <= y
        && y <= 1.0
        && y >= term.y_min()
        && term.a().iter().zip(term.b()).all(|(&a, &b)| {
            let lin = f64::from(a) * y - f64::from(b) * x;
            0.0 < lin && lin <= 1.0
        });
    omega_ok
        && map_t_ab(term, x, y)
            .map(|u| region.contains(&map_t_forward(&u)))
            .unwrap_or(false)
}

const CHUNK: u64 = 1 << 16;

/// Uniform sampling over the bounding box of the restricted region. Chunks
/// use independent ChaCha streams, so the estimate depends only on `seed`.
pub fn monte_carlo_term_area(
    term: &CorrelationTerm,
    region: &BoxRegion,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput(
            "Monte-Carlo needs at least one sample".into(),
        ));
    }
    let Some((x0, x1, y0, y1)) = RegionOmega::restricted(term, region).bounding_box() else {
        return Ok(MonteCarloEstimate {
            value: 0.0,
            std_error: 0.0,
            samples,
        });
    };
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(samples - c * CHUNK);
            (0..n)
                .filter(|_| {
                    let x = rng.gen_range(x0..=x1);
                    let y = rng.gen_range(y0..=y1);
                    point_in_term_region(term, region, x, y)
                })
                .count() as u64
        })
        .sum();
    let area = (x1 - x0) * (y1 - y0);
    let p = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        value: area * p,
        std_error: area * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

/// Monte-Carlo counterpart of the ν-level measure: twice the sum of sampled
/// term areas, `samples_per_term` points each.
pub fn monte_carlo_measure(
    nu: usize,
    region: &BoxRegion,
    samples_per_term: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let lambda = region
        .intervals()
        .iter()
        .map(|&(_, hi)| hi)
        .fold(f64::NEG_INFINITY, f64::max);
    let terms = enumerate_terms_with(nu, lambda, region, TermLimits::default())?;
    let mut value = 0.0;
    let mut var = 0.0;
    for (i, t) in terms.iter().enumerate() {
        let est = monte_carlo_term_area(t, region, samples_per_term, seed.wrapping_add(i as u64))?;
        value += est.value;
        var += est.std_error * est.std_error;
    }
    Ok(MonteCarloEstimate {
        value: 2.0 * value,
        std_error: 2.0 * var.sqrt(),
        samples: samples_per_term * terms.len() as u64,
    })
}
