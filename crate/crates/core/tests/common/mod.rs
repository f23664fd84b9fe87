//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn phi_naive(n: u64) -> u64 {
    (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64
}

/// Number of reduced fractions a/q in (0, 1] with q ≤ order.
pub fn farey_count_naive(order: u64) -> u64 {
    (1..=order)
        .map(|q| (1..=q).filter(|&a| gcd(a, q) == 1).count() as u64)
        .sum()
}

/// g₂(λ) = 6/(π²λ²) Σ_{k < π²λ/3} φ(k) log(π²λ/(3k)).
pub fn g2_oracle(lambda: f64) -> f64 {
    let c = PI * PI * lambda / 3.0;
    if c <= 1.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut k = 1u64;
    while (k as f64) < c {
        sum += phi_naive(k) as f64 * (c / k as f64).ln();
        k += 1;
    }
    6.0 / (PI * PI * lambda * lambda) * sum
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, eps, 50)
}

/// Count of ordered tuples of distinct indices (i_1, …, i_ν) with
/// N·(x_{i_j} − x_{i_{j+1}}) reduced mod N lying in [lo_j, hi_j) + N·Z.
pub fn brute_force_count(points: &[f64], intervals: &[(f64, f64)]) -> u64 {
    let n = points.len();
    let nf = n as f64;
    let nu = intervals.len() + 1;
    let reach = intervals
        .iter()
        .map(|&(lo, hi)| lo.abs().max(hi.abs()))
        .fold(0.0, f64::max);
    let shifts = (reach / nf).ceil() as i64 + 1;
    let hit = |x: f64, y: f64, lo: f64, hi: f64| {
        let mut d = x - y;
        if d > 0.5 {
            d -= 1.0;
        } else if d <= -0.5 {
            d += 1.0;
        }
        let s = d * nf;
        (-shifts..=shifts).any(|m| {
            let t = s + m as f64 * nf;
            lo <= t && t < hi
        })
    };
    let mut total = 0;
    let mut tuple = Vec::with_capacity(nu);
    fn walk(
        tuple: &mut Vec<usize>,
        n: usize,
        nu: usize,
        ok: &dyn Fn(&[usize]) -> bool,
        total: &mut u64,
    ) {
        if tuple.len() == nu {
            if ok(tuple) {
                *total += 1;
            }
            return;
        }
        for i in 0..n {
            if !tuple.contains(&i) {
                tuple.push(i);
                walk(tuple, n, nu, ok, total);
                tuple.pop();
            }
        }
    }
    let ok = |t: &[usize]| {
        t.windows(2)
            .zip(intervals)
            .all(|(w, &(lo, hi))| hit(points[w[0]], points[w[1]], lo, hi))
    };
    walk(&mut tuple, n, nu, &ok, &mut total);
    total
}

/// Sorted distinct points k/1024 in [0, 1), so every difference is exact.
pub fn dyadic_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut ks: Vec<u32> = Vec::with_capacity(n);
    while ks.len() < n {
        let k = rng.gen_range(0..1024);
        if !ks.contains(&k) {
            ks.push(k);
        }
    }
    ks.sort_unstable();
    ks.into_iter().map(|k| k as f64 / 1024.0).collect()
}

/// Whether (x, y) lies in Ω_{A,B,Λ} and the consecutive differences of
/// (3/π²)·B_j / (y(A_j y − B_j x)) fall in the half-open box.
pub fn in_term_region(
    a: &[u32],
    b: &[u32],
    lambda: f64,
    intervals: &[(f64, f64)],
    x: f64,
    y: f64,
) -> bool {
    if !(0.0 <= x && x <= y && y <= 1.0 && y >= 3.0 / (PI * PI * lambda)) {
        return false;
    }
    let mut u = Vec::with_capacity(a.len());
    for (&aj, &bj) in a.iter().zip(b) {
        let lin = aj as f64 * y - bj as f64 * x;
        if !(lin > 0.0 && lin <= 1.0) {
            return false;
        }
        u.push(3.0 / (PI * PI) * bj as f64 / (y * lin));
    }
    (0..u.len()).all(|j| {
        let v = if j + 1 < u.len() {
            u[j] - u[j + 1]
        } else {
            u[j]
        };
        intervals[j].0 <= v && v < intervals[j].1
    })
}

/// Hit-or-miss estimate of the term area over [0, 1]², with its standard error.
pub fn mc_term_area(
    a: &[u32],
    b: &[u32],
    lambda: f64,
    intervals: &[(f64, f64)],
    samples: u64,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x: f64 = rng.gen();
        let y: f64 = rng.gen();
        if in_term_region(a, b, lambda, intervals, x, y) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}
