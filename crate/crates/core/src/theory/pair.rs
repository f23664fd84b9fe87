//! The pair correlation density
//! g₂(λ) = 6/(π²λ²) · Σ_{1 ≤ k < π²λ/3} φ(k) log(π²λ/(3k)),
//! together with the GUE and Poisson reference curves.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{threshold, PI_SQ};
use crate::error::{Error, Result};
use crate::numtheory::SieveTables;
use crate::summation::CompensatedSum;

/// Number of totient terms active at `lambda`: the largest k with 3k/π² < λ.
fn active_terms(lambda: f64) -> usize {
    let mut k = (lambda * PI_SQ / 3.0).ceil().max(0.0) as usize;
    while k > 0 && threshold(k) >= lambda {
        k -= 1;
    }
    while threshold(k + 1) < lambda {
        k += 1;
    }
    k
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "λ must be positive and finite, got {lambda}"
        )))
    }
}

/// g₂(λ). A term k enters only when λ strictly exceeds 3k/π², so the value
/// is exactly 0 on (0, 3/π²].
pub fn g2(tables: &SieveTables, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let k_max = active_terms(lambda);
    tables.require(k_max, "g2")?;
    if k_max == 0 {
        return Ok(0.0);
    }
    let sum: CompensatedSum = (1..=k_max)
        .map(|k| f64::from(tables.phi(k)) * (lambda / threshold(k)).ln())
        .collect();
    Ok(6.0 / (PI_SQ * lambda * lambda) * sum.value())
}

/// ∫_a^b g₂(λ) dλ in closed form, using the antiderivative
/// −(log(λ/t_k) + 1)/λ of log(λ/t_k)/λ² on each active piece.
pub fn g2_integral(tables: &SieveTables, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && a < b && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integration bounds must satisfy 0 ≤ a < b, got ({a}, {b})"
        )));
    }
    let k_max = active_terms(b);
    tables.require(k_max, "g2 integral")?;
    let antiderivative = |lambda: f64, t: f64| -(((lambda / t).ln() + 1.0) / lambda);
    let sum: CompensatedSum = (1..=k_max)
        .map(|k| {
            let t = threshold(k);
            let lo = a.max(t);
            f64::from(tables.phi(k)) * (antiderivative(b, t) - antiderivative(lo, t))
        })
        .collect();
    Ok(6.0 / PI_SQ * sum.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceModel {
    Gue,
    Poisson,
}

/// Reference pair correlation: GUE `1 − (sin πλ / πλ)²`, Poisson `1`.
pub fn g_reference(model: ReferenceModel, lambda: f64) -> f64 {
    match model {
        ReferenceModel::Poisson => 1.0,
        ReferenceModel::Gue => {
            let s = (PI * lambda).sin() / (PI * lambda);
            1.0 - s * s
        }
    }
}

/// S(x) = Σ_{1 ≤ q < x} φ(q) log(x/q). Its main term is 3x²/(2π²).
pub fn weighted_totient_log_sum(tables: &SieveTables, x: f64) -> Result<f64> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::InvalidInput(format!("x must exceed 1, got {x}")));
    }
    let q_max = x.ceil() as usize - 1;
    tables.require(q_max, "weighted totient sum")?;
    Ok((1..=q_max)
        .map(|q| f64::from(tables.phi(q)) * (x / q as f64).ln())
        .collect::<CompensatedSum>()
        .value())
}

/// `(λ, λ·|g₂(λ) − 1|)` for each requested λ.
pub fn g2_asymptotic_diagnostic(tables: &SieveTables, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
    lambdas
        .iter()
        .map(|&l| Ok((l, l * (g2(tables, l)? - 1.0).abs())))
        .collect()
}
