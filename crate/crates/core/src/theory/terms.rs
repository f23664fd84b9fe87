//! Coprime index pairs (A, B) of the ν-level area sum and their planar
//! regions Ω_{A,B,Λ} = {0 ≤ x ≤ y ≤ 1, y ≥ 1/c_Λ, 0 < A_j y − B_j x ≤ 1}.

use serde::Serialize;

use super::{c_lambda, THREE_OVER_PI_SQ};
use crate::error::{Error, Result};
use crate::spacing::BoxRegion;

/// Default ceiling on Λ (the term count grows like c_Λ^{4(ν−1)}).
pub const DEFAULT_MAX_LAMBDA: f64 = 64.0;
/// Default ceiling on the number of enumerated terms.
pub const DEFAULT_MAX_TERMS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermLimits {
    pub max_lambda: f64,
    pub max_terms: usize,
}

impl Default for TermLimits {
    fn default() -> Self {
        TermLimits {
            max_lambda: DEFAULT_MAX_LAMBDA,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Per-axis bound ⌈ν·c_Λ²⌉ on A_j and B_j.
pub fn index_bound(nu: usize, lambda: f64) -> u64 {
    let c = c_lambda(lambda);
    (nu as f64 * c * c).ceil() as u64
}

/// One term of the area sum: coprime pairs (A_j, B_j) for j = 1..ν−1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTerm {
    a: Vec<u32>,
    b: Vec<u32>,
    lambda: f64,
}

impl CorrelationTerm {
    pub fn new(a: Vec<u32>, b: Vec<u32>, lambda: f64) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "A and B must have the same positive length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "Λ must be positive, got {lambda}"
            )));
        }
        let bound = index_bound(a.len() + 1, lambda);
        for (&aj, &bj) in a.iter().zip(&b) {
            if aj == 0 || bj == 0 {
                return Err(Error::InvalidInput("A_j and B_j must be at least 1".into()));
            }
            if gcd(aj, bj) != 1 {
                return Err(Error::InvalidInput(format!("gcd({aj}, {bj}) ≠ 1")));
            }
            if u64::from(aj.max(bj)) > bound {
                return Err(Error::InvalidInput(format!(
                    "index {} exceeds ⌈ν c_Λ²⌉ = {bound}",
                    aj.max(bj)
                )));
            }
        }
        Ok(CorrelationTerm { a, b, lambda })
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nu(&self) -> usize {
        self.a.len() + 1
    }

    /// Lower limit 1/c_Λ = 3/(π²Λ) on y.
    pub fn y_min(&self) -> f64 {
        1.0 / c_lambda(self.lambda)
    }
}

/// `a·x + b·y ≤ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct HalfPlane {
    a: f64,
    b: f64,
    c: f64,
}

impl HalfPlane {
    #[inline]
    fn slack(&self, p: (f64, f64)) -> f64 {
        self.c - (self.a * p.0 + self.b * p.1)
    }
}

fn clip(poly: Vec<(f64, f64)>, h: HalfPlane) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (sp, sq) = (h.slack(p), h.slack(q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

fn shoelace(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p.0 * q.1 - q.0 * p.1
        })
        .sum();
    0.5 * twice.abs()
}

/// Half-planes cutting out the closure of Ω for the given index pairs.
fn omega_half_planes(a: &[u32], b: &[u32], y_min: f64) -> Vec<HalfPlane> {
    let mut hs = vec![
        HalfPlane {
            a: -1.0,
            b: 0.0,
            c: 0.0,
        }, // x ≥ 0
        HalfPlane {
            a: 1.0,
            b: -1.0,
            c: 0.0,
        }, // x ≤ y
        HalfPlane {
            a: 0.0,
            b: 1.0,
            c: 1.0,
        }, // y ≤ 1
        HalfPlane {
            a: 0.0,
            b: -1.0,
            c: -y_min,
        }, // y ≥ 1/c_Λ
    ];
    for (&aj, &bj) in a.iter().zip(b) {
        let (aj, bj) = (f64::from(aj), f64::from(bj));
        hs.push(HalfPlane {
            a: bj,
            b: -aj,
            c: 0.0,
        }); // A y − B x ≥ 0
        hs.push(HalfPlane {
            a: -bj,
            b: aj,
            c: 1.0,
        }); // A y − B x ≤ 1
    }
    hs
}

/// Necessary linear conditions for T_{A,B}(x, y) ∈ T⁻¹(box): component j is
/// below `u_max_j`, and since `y ≤ 1` and `A_j y − B_j x ≤ 1` that forces both
/// `A_j y − B_j x` and `y` above `(3/π²) B_j / u_max_j`.
fn box_half_planes(a: &[u32], b: &[u32], u_max: &[f64]) -> Vec<HalfPlane> {
    let mut hs = Vec::with_capacity(2 * a.len());
    for ((&aj, &bj), &um) in a.iter().zip(b).zip(u_max) {
        let kappa = THREE_OVER_PI_SQ * f64::from(bj) / um;
        let (aj, bj) = (f64::from(aj), f64::from(bj));
        hs.push(HalfPlane {
            a: bj,
            b: -aj,
            c: -kappa,
        });
        hs.push(HalfPlane {
            a: 0.0,
            b: -1.0,
            c: -kappa,
        });
    }
    hs
}

fn polygon(half_planes: &[HalfPlane]) -> Vec<(f64, f64)> {
    let mut poly = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    for &h in half_planes {
        poly = clip(poly, h);
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    poly
}

/// Upper corner of T⁻¹(box): suffix sums of the upper bounds.
pub(crate) fn u_max(region: &BoxRegion) -> Vec<f64> {
    let his: Vec<f64> = region.intervals().iter().map(|&(_, hi)| hi).collect();
    super::map_t_inverse(&his)
}

/// Ω_{A,B,Λ} as a convex polygon (its closure), optionally cut down by the
/// necessary conditions implied by a box.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionOmega {
    term: CorrelationTerm,
    vertices: Vec<(f64, f64)>,
}

impl RegionOmega {
    pub fn new(term: &CorrelationTerm) -> Self {
        let hs = omega_half_planes(term.a(), term.b(), term.y_min());
        RegionOmega {
            term: term.clone(),
            vertices: polygon(&hs),
        }
    }

    /// Ω intersected with the linear hull of Φ_{A,B}⁻¹(box). Contains every
    /// point of Ω mapped into the box.
    pub fn restricted(term: &CorrelationTerm, region: &BoxRegion) -> Self {
        let mut hs = omega_half_planes(term.a(), term.b(), term.y_min());
        hs.extend(box_half_planes(term.a(), term.b(), &u_max(region)));
        RegionOmega {
            term: term.clone(),
            vertices: polygon(&hs),
        }
    }

    pub fn term(&self) -> &CorrelationTerm {
        &self.term
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn is_empty(&self) -> bool {
        !(self.area() > 0.0)
    }

    /// `(x_lo, x_hi, y_lo, y_hi)`, or `None` when empty.
    pub fn bounding_box(&self) -> Option<(f64, f64, f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let mut bb = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in &self.vertices {
            bb.0 = bb.0.min(x);
            bb.1 = bb.1.max(x);
            bb.2 = bb.2.min(y);
            bb.3 = bb.3.max(y);
        }
        Some(bb)
    }

    /// Membership in Ω itself (with its exact open/closed sides).
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let t = &self.term;
        0.0 <= x
            && x <= y
            && y <= 1.0
            && y >= t.y_min()
            && t.a().iter().zip(t.b()).all(|(&a, &b)| {
                let lin = f64::from(a) * y - f64::from(b) * x;
                0.0 < lin && lin <= 1.0
            })
    }
}

/// Terms with possibly nonzero area, under default limits.
pub fn enumerate_terms(nu: usize, lambda: f64, region: &BoxRegion) -> Result<Vec<CorrelationTerm>> {
    enumerate_terms_with(nu, lambda, region, TermLimits::default())
}

/// Every coprime (A, B) with entries up to ⌈ν c_Λ²⌉ that survives pruning,
/// in lexicographic order of (A, B). Pruning drops a term when
/// (3/π²) B_j ≥ max_j T⁻¹(box) (component j of T_{A,B} is at least
/// (3/π²) B_j on Ω) or when the polygon of necessary linear conditions is empty.
pub fn enumerate_terms_with(
    nu: usize,
    lambda: f64,
    region: &BoxRegion,
    limits: TermLimits,
) -> Result<Vec<CorrelationTerm>> {
    if nu < 2 || region.nu() != nu {
        return Err(Error::InvalidInput(format!(
            "ν = {nu} does not match a box with {} axes",
            region.dim()
        )));
    }
    if !region.in_positive_orthant() {
        return Err(Error::InvalidInput(
            "the area formula needs a box in the positive orthant".into(),
        ));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "Λ must be positive, got {lambda}"
        )));
    }
    if lambda > limits.max_lambda {
        return Err(Error::Sizing(format!(
            "Λ = {lambda} exceeds the configured maximum {}",
            limits.max_lambda
        )));
    }
    if let Some(&(_, hi)) = region.intervals().iter().find(|&&(_, hi)| hi > lambda) {
        return Err(Error::InvalidInput(format!(
            "box reaches {hi}, outside (0, Λ) with Λ = {lambda}"
        )));
    }

    let bound = index_bound(nu, lambda).min(u64::from(u32::MAX)) as u32;
    let y_min = 1.0 / c_lambda(lambda);
    let umax = u_max(region);

    // Candidates axis by axis, each checked against its own linear conditions.
    let mut per_axis: Vec<Vec<(u32, u32)>> = Vec::with_capacity(nu - 1);
    for &um in &umax {
        let mut cands = Vec::new();
        for b in 1..=bound {
            if THREE_OVER_PI_SQ * f64::from(b) >= um {
                break;
            }
            for a in 1..=bound {
                if gcd(a, b) != 1 {
                    continue;
                }
                let mut hs = omega_half_planes(&[a], &[b], y_min);
                hs.extend(box_half_planes(&[a], &[b], &[um]));
                if shoelace(&polygon(&hs)) > 0.0 {
                    cands.push((a, b));
                }
            }
        }
        per_axis.push(cands);
    }

    let mut terms = Vec::new();
    let mut index = vec![0usize; nu - 1];
    if per_axis.iter().any(|c| c.is_empty()) {
        return Ok(terms);
    }
    loop {
        let a: Vec<u32> = index.iter().zip(&per_axis).map(|(&i, c)| c[i].0).collect();
        let b: Vec<u32> = index.iter().zip(&per_axis).map(|(&i, c)| c[i].1).collect();
        let keep = nu == 2 || {
            let mut hs = omega_half_planes(&a, &b, y_min);
            hs.extend(box_half_planes(&a, &b, &umax));
            shoelace(&polygon(&hs)) > 0.0
        };
        if keep {
            if terms.len() == limits.max_terms {
                return Err(Error::Sizing(format!(
                    "more than {} candidate terms; lower Λ or the box size",
                    limits.max_terms
                )));
            }
            terms.push(CorrelationTerm { a, b, lambda });
        }
        let mut k = nu - 2;
        loop {
            index[k] += 1;
            if index[k] < per_axis[k].len() {
                break;
            }
            index[k] = 0;
            if k == 0 {
                terms.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
                return Ok(terms);
            }
            k -= 1;
        }
    }
}
