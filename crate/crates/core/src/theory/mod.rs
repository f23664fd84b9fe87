//! Limiting correlation formulas for Farey fractions.
//!
//! [`pair`] evaluates the closed-form pair correlation density g₂ and its
//! reference curves; [`measure`] evaluates the general ν-level correlation
//! measure as a finite sum of planar areas, each computed by certified
//! quadtree subdivision in [`quadtree`].

pub mod maps;
pub mod measure;
pub mod montecarlo;
pub mod pair;
pub mod quadtree;
pub mod terms;

pub use maps::{map_t_ab, map_t_forward, map_t_inverse};
pub use measure::{nu_level_measure, nu_level_measure_with, MeasureResult};
pub use pair::{
    g2, g2_asymptotic_diagnostic, g2_integral, g_reference, weighted_totient_log_sum,
    ReferenceModel,
};
pub use quadtree::{term_area, term_area_with, AreaEstimate, QuadLimits};
pub use terms::{enumerate_terms, enumerate_terms_with, CorrelationTerm, RegionOmega, TermLimits};

/// π².
pub const PI_SQ: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// 3/π² = 1/(2ζ(2)), the repulsion radius of the Farey pair correlation.
pub const THREE_OVER_PI_SQ: f64 = 3.0 / PI_SQ;

/// `3k/π²`, where the k-th totient term of g₂ switches on.
#[inline]
pub fn threshold(k: usize) -> f64 {
    3.0 * k as f64 / PI_SQ
}

/// c_Λ = π²Λ/3.
#[inline]
pub fn c_lambda(lambda: f64) -> f64 {
    PI_SQ * lambda / 3.0
}
