//! Empirical ν-level correlation measures of finite point sets on R/Z.
//!
//! A tuple `(x_1, …, x_ν)` of distinct points is counted when every difference
//! `x_j − x_{j+1}` lies in `(1/N)·[lo_j, hi_j) + Z`. The difference is first
//! reduced mod 1 to the representative in (−1/2, 1/2] and scaled by N; for
//! boxes within (−N/2, N/2) that representative is the only candidate,
//! otherwise the integer shift landing at or above `lo_j` is tested.
//! The windowed counter only inspects points whose circular distance to the
//! previous tuple element can satisfy the axis constraint, then applies
//! exactly the same membership predicate as a brute-force scan, so the two
//! agree as integers.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack added to candidate windows so rounding never drops a candidate.
const WINDOW_SLACK: f64 = 1e-12;

/// Axis-aligned box in R^{ν−1}; each axis is the half-open interval `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct BoxRegion {
    intervals: Vec<(f64, f64)>,
}

impl BoxRegion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidInput("box needs at least one axis".into()));
        }
        for (j, &(lo, hi)) in intervals.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidInput(format!("axis {j}: non-finite bound")));
            }
            if lo >= hi {
                return Err(Error::InvalidInput(format!(
                    "axis {j}: lower bound {lo} is not below upper bound {hi}"
                )));
            }
        }
        Ok(BoxRegion { intervals })
    }

    /// `∏ [−λ_j, λ_j)`.
    pub fn symmetric(lambdas: &[f64]) -> Result<Self> {
        if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "symmetric box half-widths must be positive, got {l}"
            )));
        }
        BoxRegion::new(lambdas.iter().map(|&l| (-l, l)).collect())
    }

    /// Parses `lo:hi,lo:hi,…`.
    pub fn parse(text: &str) -> Result<Self> {
        let intervals = text
            .split(',')
            .map(|axis| {
                let (lo, hi) = axis.trim().split_once(':').ok_or_else(|| {
                    Error::InvalidInput(format!("box axis `{axis}` is not of the form lo:hi"))
                })?;
                let parse = |s: &str| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidInput(format!("box bound `{s}` is not a number"))
                    })
                };
                Ok((parse(lo)?, parse(hi)?))
            })
            .collect::<Result<Vec<_>>>()?;
        BoxRegion::new(intervals)
    }

    /// Correlation level ν (axes + 1).
    pub fn nu(&self) -> usize {
        self.intervals.len() + 1
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// True when every axis lies in [0, ∞), i.e. the box sits in the closed
    /// positive orthant. The theoretical evaluator requires this.
    pub fn in_positive_orthant(&self) -> bool {
        self.intervals.iter().all(|&(lo, _)| lo >= 0.0)
    }

    /// Largest absolute coordinate over the box.
    pub fn max_abs(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| lo.abs().max(hi.abs()))
            .fold(0.0, f64::max)
    }

    /// Image under tuple reversal: axes reversed and negated.
    pub fn reversed_negated(&self) -> Self {
        BoxRegion {
            intervals: self
                .intervals
                .iter()
                .rev()
                .map(|&(lo, hi)| (-hi, -lo))
                .collect(),
        }
    }

    #[inline]
    pub fn contains(&self, v: &[f64]) -> bool {
        v.len() == self.intervals.len()
            && self
                .intervals
                .iter()
                .zip(v)
                .all(|(&(lo, hi), &x)| lo <= x && x < hi)
    }

    pub fn volume(&self) -> f64 {
        self.intervals.iter().map(|&(lo, hi)| hi - lo).product()
    }
}

impl TryFrom<Vec<(f64, f64)>> for BoxRegion {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        BoxRegion::new(v)
    }
}

impl From<BoxRegion> for Vec<(f64, f64)> {
    fn from(b: BoxRegion) -> Self {
        b.intervals
    }
}

impl fmt::Display for BoxRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, (lo, hi)) in self.intervals.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{lo}:{hi}")?;
        }
        Ok(())
    }
}

/// Strictly increasing points of [0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !(0.0..1.0).contains(*p)) {
            return Err(Error::InvalidInput(format!("point {p} is outside [0, 1)")));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            let what = if w[0] == w[1] {
                "duplicate"
            } else {
                "unsorted"
            };
            return Err(Error::InvalidInput(format!(
                "{what} points: {} followed by {}",
                w[0], w[1]
            )));
        }
        Ok(PointSet { points })
    }

    /// The Farey fractions of order `order` placed on R/Z.
    pub fn farey(order: u32) -> Self {
        PointSet {
            points: crate::farey::unit_points(order),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Scaled circular difference `N·d`, with `d ≡ x − y (mod 1)` taken in (−1/2, 1/2].
#[inline]
pub fn scaled_difference(x: f64, y: f64, n: f64) -> f64 {
    let mut d = x - y;
    if d > 0.5 {
        d -= 1.0;
    } else if d <= -0.5 {
        d += 1.0;
    }
    d * n
}

/// Raw tuple count for one box, normalized by the point count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub nu: usize,
    #[serde(rename = "box")]
    pub region: BoxRegion,
    pub n: usize,
    pub tuple_count: u64,
    pub value: f64,
}

/// One bin `[lo, hi)` of the pair-correlation histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    pub density: f64,
}

impl HistogramBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairHistogram {
    pub n: usize,
    pub lambda_max: f64,
    pub bins: Vec<HistogramBin>,
}

impl PairHistogram {
    /// `(bin_center, density)` pairs.
    pub fn densities(&self) -> Vec<(f64, f64)> {
        self.bins.iter().map(|b| (b.center(), b.density)).collect()
    }

    pub fn width(&self) -> f64 {
        self.lambda_max / self.bins.len() as f64
    }
}

/// Whether `s + k·n ∈ [lo, hi)` for some integer `k`, where `s` is a
/// [`scaled_difference`]. Tests the smallest representative `≥ lo`.
#[inline]
pub fn axis_contains(s: f64, lo: f64, hi: f64, n: f64) -> bool {
    let at = |k: f64| s + k * n;
    let mut k = ((lo - s) / n).ceil();
    if at(k) < lo {
        k += 1.0;
    } else if at(k - 1.0) >= lo {
        k -= 1.0;
    }
    at(k) < hi
}

/// Index ranges of the sorted points lying in `[a, b]` taken mod 1.
fn circular_window(points: &[f64], a: f64, b: f64) -> (Range<usize>, Range<usize>) {
    let len = points.len();
    if b - a >= 1.0 {
        return (0..len, 0..0);
    }
    let shift = a.floor();
    let (a, b) = (a - shift, b - shift);
    let first = points.partition_point(|&p| p < a);
    if b < 1.0 {
        let last = points.partition_point(|&p| p <= b);
        (first..last.max(first), 0..0)
    } else {
        let last = points.partition_point(|&p| p <= b - 1.0);
        (first..len, 0..last.min(first))
    }
}

struct TupleCounter<'a> {
    points: &'a [f64],
    scale: f64,
    axes: &'a [(f64, f64)],
}

impl TupleCounter<'_> {
    fn count_from(&self, chain: &mut Vec<usize>) -> u64 {
        let depth = chain.len() - 1;
        if depth == self.axes.len() {
            return 1;
        }
        let (lo, hi) = self.axes[depth];
        let x = self.points[*chain.last().unwrap()];
        let (r1, r2) = circular_window(
            self.points,
            x - hi / self.scale - WINDOW_SLACK,
            x - lo / self.scale + WINDOW_SLACK,
        );
        let mut total = 0;
        for j in r1.chain(r2) {
            let s = scaled_difference(x, self.points[j], self.scale);
            if axis_contains(s, lo, hi, self.scale) && !chain.contains(&j) {
                chain.push(j);
                total += self.count_from(chain);
                chain.pop();
            }
        }
        total
    }
}

/// ν-level correlation count of `points` over `region`, divided by N.
pub fn empirical_correlation(
    points: &PointSet,
    nu: usize,
    region: &BoxRegion,
) -> Result<CorrelationEstimate> {
    if nu < 2 {
        return Err(Error::InvalidInput(format!(
            "ν must be at least 2, got {nu}"
        )));
    }
    if region.nu() != nu {
        return Err(Error::InvalidInput(format!(
            "box has {} axes but ν = {nu} needs {}",
            region.dim(),
            nu - 1
        )));
    }
    let n = points.len();
    if n < nu {
        return Err(Error::InvalidInput(format!(
            "need at least ν = {nu} points, got {n}"
        )));
    }

    let counter = TupleCounter {
        points: points.as_slice(),
        scale: n as f64,
        axes: region.intervals(),
    };
    let tuple_count: u64 = (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(nu),
            |chain, i| {
                chain.clear();
                chain.push(i);
                counter.count_from(chain)
            },
        )
        .sum();

    Ok(CorrelationEstimate {
        nu,
        region: region.clone(),
        n,
        tuple_count,
        value: tuple_count as f64 / n as f64,
    })
}

/// `2^{−ν+1} · R^{(ν)}(∏ [−λ_j, λ_j))`.
pub fn symmetric_correlation(points: &PointSet, nu: usize, lambdas: &[f64]) -> Result<f64> {
    let region = BoxRegion::symmetric(lambdas)?;
    let est = empirical_correlation(points, nu, &region)?;
    Ok(est.value * 0.5f64.powi(nu as i32 - 1))
}

/// Lower edge of bin `i` out of `bins` over `[0, lambda_max)`.
#[inline]
fn bin_edge(lambda_max: f64, bins: usize, i: usize) -> f64 {
    if i >= bins {
        lambda_max
    } else {
        lambda_max * i as f64 / bins as f64
    }
}

/// Pair-correlation density over `bins` equal bins of `[0, lambda_max)`,
/// filled in one windowed pass. Bin counts equal the per-bin
/// [`empirical_correlation`] counts exactly.
pub fn pair_correlation_histogram(
    points: &PointSet,
    lambda_max: f64,
    bins: usize,
) -> Result<PairHistogram> {
    if bins == 0 {
        return Err(Error::InvalidInput("bin count must be at least 1".into()));
    }
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 points, got {n}"
        )));
    }
    if lambda_max >= n as f64 {
        return Err(Error::InvalidInput(format!(
            "lambda_max {lambda_max} must be below the point count {n}"
        )));
    }

    let pts = points.as_slice();
    let scale = n as f64;
    let width = lambda_max / bins as f64;
    let locate = |s: f64| -> usize {
        let mut k = ((s / width) as usize).min(bins - 1);
        while k > 0 && s < bin_edge(lambda_max, bins, k) {
            k -= 1;
        }
        while s >= bin_edge(lambda_max, bins, k + 1) {
            k += 1;
        }
        k
    };

    let counts = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; bins],
            |mut acc, i| {
                let x = pts[i];
                let (r1, r2) =
                    circular_window(pts, x - lambda_max / scale - WINDOW_SLACK, x + WINDOW_SLACK);
                for j in r1.chain(r2) {
                    if j == i {
                        continue;
                    }
                    let mut s = scaled_difference(x, pts[j], scale);
                    if s < 0.0 {
                        s += scale;
                    }
                    if s < lambda_max {
                        acc[locate(s)] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: bin_edge(lambda_max, bins, i),
            hi: bin_edge(lambda_max, bins, i + 1),
            count,
            density: count as f64 / scale / width,
        })
        .collect();

    Ok(PairHistogram {
        n,
        lambda_max,
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(points: &[f64], region: &BoxRegion) -> u64 {
        let n = points.len();
        let nu = region.nu();
        let mut idx = vec![0usize; nu];
        let mut total = 0;
        loop {
            let distinct = (0..nu).all(|a| (a + 1..nu).all(|b| idx[a] != idx[b]));
            if distinct {
                let hit = idx
                    .windows(2)
                    .zip(region.intervals())
                    .all(|(w, &(lo, hi))| {
                        let s = scaled_difference(points[w[0]], points[w[1]], n as f64);
                        (-8..=8).any(|k| {
                            let t = s + f64::from(k) * n as f64;
                            lo <= t && t < hi
                        })
                    });
                if hit {
                    total += 1;
                }
            }
            let mut k = 0;
            loop {
                if k == nu {
                    return total;
                }
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn two_points_wrap() {
        let pts = PointSet::new(vec![0.25, 0.75]).unwrap();
        let b = BoxRegion::new(vec![(-1.2, 1.2)]).unwrap();
        let est = empirical_correlation(&pts, 2, &b).unwrap();
        assert_eq!(est.tuple_count, 2);
        assert_eq!(est.value, 1.0);
        assert_eq!(symmetric_correlation(&pts, 2, &[1.2]).unwrap(), 0.5);
    }

    #[test]
    fn shifted_representatives_below_the_difference() {
        // N = 3: s = −0.75 misses [−4.25, −2.5) but s − 3 = −3.75 hits it.
        assert!(axis_contains(-0.75, -4.25, -2.5, 3.0));
        assert!(!axis_contains(-0.75, -1.0, -0.75, 3.0));
        assert!(axis_contains(0.5, -2.6, -2.4, 3.0));
        let pts = PointSet::new(vec![0.0, 0.25]).unwrap();
        let b = BoxRegion::new(vec![(-4.25, -2.5)]).unwrap();
        assert_eq!(empirical_correlation(&pts, 2, &b).unwrap().tuple_count, 1);
    }

    #[test]
    fn below_minimal_gap_is_empty() {
        let pts = PointSet::farey(40);
        let n = pts.len() as f64;
        // consecutive Farey gaps are at least 1/Q²
        let eps = 0.99 * n / (40.0 * 40.0);
        let b = BoxRegion::new(vec![(1e-9, eps)]).unwrap();
        assert_eq!(empirical_correlation(&pts, 2, &b).unwrap().tuple_count, 0);
        assert_eq!(symmetric_correlation(&pts, 2, &[eps]).unwrap(), 0.0);
        let h = pair_correlation_histogram(&pts, eps, 5).unwrap();
        assert!(h.bins.iter().all(|b| b.density == 0.0));
    }

    #[test]
    fn farey_triples_match_brute_force() {
        let pts = PointSet::farey(50);
        let b = BoxRegion::new(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let est = empirical_correlation(&pts, 3, &b).unwrap();
        assert_eq!(est.tuple_count, brute(pts.as_slice(), &b));
        assert!(est.tuple_count > 0);
    }

    #[test]
    fn input_validation() {
        assert!(PointSet::new(vec![0.5, 0.25]).is_err());
        assert!(PointSet::new(vec![0.25, 0.25]).is_err());
        assert!(PointSet::new(vec![0.25, 1.0]).is_err());
        assert!(BoxRegion::new(vec![(1.0, 1.0)]).is_err());
        assert!(BoxRegion::new(vec![]).is_err());
        let pts = PointSet::new(vec![0.1, 0.2, 0.3]).unwrap();
        let b = BoxRegion::new(vec![(0.0, 1.0)]).unwrap();
        assert!(empirical_correlation(&pts, 3, &b).is_err());
        assert!(pair_correlation_histogram(&pts, 3.0, 2).is_err());
        assert!(pair_correlation_histogram(&pts, 1.0, 0).is_err());
        assert!(pair_correlation_histogram(&pts, -1.0, 3).is_err());
    }

    #[test]
    fn box_parse_and_display() {
        let b = BoxRegion::parse("0.4:1, -2:0.5").unwrap();
        assert_eq!(b.intervals(), &[(0.4, 1.0), (-2.0, 0.5)]);
        assert_eq!(b.to_string(), "0.4:1,-2:0.5");
        assert!(!b.in_positive_orthant());
        assert!(BoxRegion::parse("1").is_err());
        assert!(BoxRegion::parse("a:b").is_err());
    }

    #[test]
    fn histogram_matches_per_bin_counts() {
        let pts = PointSet::farey(120);
        let h = pair_correlation_histogram(&pts, 3.0, 12).unwrap();
        let mut total = 0;
        for bin in &h.bins {
            let b = BoxRegion::new(vec![(bin.lo, bin.hi)]).unwrap();
            assert_eq!(
                empirical_correlation(&pts, 2, &b).unwrap().tuple_count,
                bin.count
            );
            total += bin.count;
        }
        let whole = BoxRegion::new(vec![(0.0, 3.0)]).unwrap();
        assert_eq!(
            empirical_correlation(&pts, 2, &whole).unwrap().tuple_count,
            total
        );
    }

    fn point_set_strategy(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::btree_set(0u32..(1 << 20), 4..max_n).prop_map(|s| {
            s.into_iter()
                .map(|k| k as f64 / (1u64 << 20) as f64)
                .collect()
        })
    }

    fn box_strategy(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-1.5f64..1.5, 0.05f64..1.5), dim)
            .prop_map(|v| v.into_iter().map(|(lo, w)| (lo, lo + w)).collect())
    }

    fn wide_box_strategy(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-12.0f64..12.0, 0.05f64..8.0), dim)
            .prop_map(|v| v.into_iter().map(|(lo, w)| (lo, lo + w)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn windowed_equals_brute_force(
            pts in point_set_strategy(30),
            axes in (1usize..=3).prop_flat_map(wide_box_strategy),
        ) {
            let set = PointSet::new(pts).unwrap();
            let region = BoxRegion::new(axes).unwrap();
            let est = empirical_correlation(&set, region.nu(), &region).unwrap();
            prop_assert_eq!(est.tuple_count, brute(set.as_slice(), &region));
        }

        #[test]
        fn reversal_symmetry(
            pts in point_set_strategy(40),
            axes in (1usize..=3).prop_flat_map(box_strategy),
        ) {
            let set = PointSet::new(pts).unwrap();
            let region = BoxRegion::new(axes).unwrap();
            prop_assume!(region.max_abs() < set.len() as f64 / 2.0);
            let a = empirical_correlation(&set, region.nu(), &region).unwrap();
            let b = empirical_correlation(&set, region.nu(), &region.reversed_negated()).unwrap();
            prop_assert_eq!(a.tuple_count, b.tuple_count);
        }

        #[test]
        fn rotation_invariance(
            pts in point_set_strategy(40),
            shift in 0u32..(1 << 20),
            axes in (1usize..=2).prop_flat_map(box_strategy),
        ) {
            let set = PointSet::new(pts.clone()).unwrap();
            let region = BoxRegion::new(axes).unwrap();
            prop_assume!(region.max_abs() < set.len() as f64 / 2.0);
            let c = shift as f64 / (1u64 << 20) as f64;
            let mut rotated: Vec<f64> = pts.iter().map(|p| (p + c) % 1.0).collect();
            rotated.sort_by(f64::total_cmp);
            let rotated = PointSet::new(rotated).unwrap();
            let a = empirical_correlation(&set, region.nu(), &region).unwrap();
            let b = empirical_correlation(&rotated, region.nu(), &region).unwrap();
            prop_assert_eq!(a.tuple_count, b.tuple_count);
        }

        #[test]
        fn additivity_of_split_boxes(
            pts in point_set_strategy(40),
            lo in -1.5f64..0.0,
            split in 0.0f64..1.0,
            hi in 0.1f64..1.5,
        ) {
            let set = PointSet::new(pts).unwrap();
            let m = lo + split * (hi - lo);
            prop_assume!(lo < m && m < hi && hi < set.len() as f64 / 2.0);
            let count = |a: f64, b: f64| {
                let r = BoxRegion::new(vec![(a, b), (-0.7, 0.9)]).unwrap();
                empirical_correlation(&set, 3, &r).unwrap().tuple_count
            };
            prop_assert_eq!(count(lo, m) + count(m, hi), count(lo, hi));
        }
    }
}
