//! The maps T_{A,B}(x, y) = (3/π²)·(B_j / (y(A_j y − B_j x)))_j and the linear
//! change of coordinates T (consecutive differences) with its inverse.

use super::terms::CorrelationTerm;
use super::THREE_OVER_PI_SQ;
use crate::error::{Error, Result};

/// T_{A,B}(x, y). Fails when `y ≤ 0` or some `A_j y − B_j x ≤ 0`.
pub fn map_t_ab(term: &CorrelationTerm, x: f64, y: f64) -> Result<Vec<f64>> {
    if !(y > 0.0) {
        return Err(Error::InvalidInput(format!("T_AB needs y > 0, got {y}")));
    }
    term.a()
        .iter()
        .zip(term.b())
        .map(|(&a, &b)| {
            let lin = f64::from(a) * y - f64::from(b) * x;
            if lin > 0.0 {
                Ok(THREE_OVER_PI_SQ * f64::from(b) / (y * lin))
            } else {
                Err(Error::InvalidInput(format!(
                    "T_AB is singular at ({x}, {y}) for (A, B) = ({a}, {b})"
                )))
            }
        })
        .collect()
}

/// T(u) = (u_1 − u_2, …, u_{m−1} − u_m, u_m).
pub fn map_t_forward(u: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = u.windows(2).map(|w| w[0] - w[1]).collect();
    if let Some(&last) = u.last() {
        v.push(last);
    }
    v
}

/// T⁻¹(v) = suffix sums of `v`.
pub fn map_t_inverse(v: &[f64]) -> Vec<f64> {
    let mut u = vec![0.0; v.len()];
    let mut acc = 0.0;
    for (dst, &x) in u.iter_mut().zip(v).rev() {
        acc += x;
        *dst = acc;
    }
    u
}
