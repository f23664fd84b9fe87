//! The Farey sequence F_Q ∩ (0, 1], generated by the next-term recurrence.

use crate::error::{Error, Result};

/// Largest order materialized by [`farey_sequence`] by default (≈ 3·10⁷ fractions).
pub const DEFAULT_MAX_ORDER: u32 = 10_000;

/// Reduced fraction `a/q` with `1 ≤ a ≤ q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FareyFraction {
    pub a: u32,
    pub q: u32,
}

impl FareyFraction {
    pub fn value(self) -> f64 {
        f64::from(self.a) / f64::from(self.q)
    }

    /// Position on the circle R/Z, in [0, 1). Maps 1/1 to 0.
    pub fn unit_point(self) -> f64 {
        if self.a == self.q {
            0.0
        } else {
            self.value()
        }
    }
}

impl std::fmt::Display for FareyFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// Streaming generator of F_Q ∩ (0, 1] in ascending order.
#[derive(Debug, Clone)]
pub struct FareyIter {
    order: u64,
    // Two most recent terms a/b < c/d; `c/d` is yielded next.
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

impl FareyIter {
    /// Panics if `order` is 0.
    pub fn new(order: u32) -> Self {
        assert!(order >= 1, "Farey order must be at least 1");
        FareyIter {
            order: u64::from(order),
            a: 0,
            b: 1,
            c: 1,
            d: u64::from(order),
        }
    }
}

impl Iterator for FareyIter {
    type Item = FareyFraction;

    fn next(&mut self) -> Option<FareyFraction> {
        if self.c > self.d {
            return None;
        }
        let out = FareyFraction {
            a: self.c as u32,
            q: self.d as u32,
        };
        if self.c == self.d {
            // 1/1 is the last term; park the state past it.
            self.c = 2;
            self.d = 1;
        } else {
            let k = (self.order + self.b) / self.d;
            let (nc, nd) = (k * self.c - self.a, k * self.d - self.b);
            self.a = self.c;
            self.b = self.d;
            self.c = nc;
            self.d = nd;
        }
        Some(out)
    }
}

/// Materialized, ordered F_Q ∩ (0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareySequence {
    order: u32,
    items: Vec<FareyFraction>,
}

impl FareySequence {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn items(&self) -> &[FareyFraction] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FareyFraction> {
        self.items.iter()
    }

    /// The fractions as ascending points of [0, 1); 1/1 becomes 0 and leads.
    pub fn unit_points(&self) -> Vec<f64> {
        unit_points(self.order)
    }
}

/// F_Q ∩ (0, 1] with the default order ceiling.
pub fn farey_sequence(order: u32) -> Result<FareySequence> {
    farey_sequence_with_max(order, DEFAULT_MAX_ORDER)
}

pub fn farey_sequence_with_max(order: u32, max_order: u32) -> Result<FareySequence> {
    check_order(order, max_order)?;
    let expected = 3.0 * f64::from(order).powi(2) / std::f64::consts::PI.powi(2);
    let mut items = Vec::with_capacity(expected as usize + 4 * order as usize);
    items.extend(FareyIter::new(order));
    Ok(FareySequence { order, items })
}

/// Ascending points of [0, 1) for F_Q, produced straight from the iterator.
pub fn unit_points(order: u32) -> Vec<f64> {
    let mut pts: Vec<f64> = Vec::new();
    pts.push(0.0);
    pts.extend(
        FareyIter::new(order)
            .filter(|f| f.a != f.q)
            .map(FareyFraction::value),
    );
    pts
}

pub(crate) fn check_order(order: u32, max_order: u32) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidInput("Farey order must be at least 1".into()));
    }
    if order > max_order {
        return Err(Error::Sizing(format!(
            "Farey order {order} exceeds the configured maximum {max_order}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    fn brute_force(order: u32) -> Vec<FareyFraction> {
        let mut v: Vec<FareyFraction> = (1..=order)
            .flat_map(|q| (1..=q).map(move |a| FareyFraction { a, q }))
            .filter(|f| gcd(f.a, f.q) == 1)
            .collect();
        v.sort_by(|x, y| (u64::from(x.a) * u64::from(y.q)).cmp(&(u64::from(y.a) * u64::from(x.q))));
        v
    }

    fn f(a: u32, q: u32) -> FareyFraction {
        FareyFraction { a, q }
    }

    #[test]
    fn smallest_orders() {
        assert_eq!(farey_sequence(1).unwrap().items(), &[f(1, 1)]);
        let want = [
            f(1, 5),
            f(1, 4),
            f(1, 3),
            f(2, 5),
            f(1, 2),
            f(3, 5),
            f(2, 3),
            f(3, 4),
            f(4, 5),
            f(1, 1),
        ];
        assert_eq!(brute_force(5), want);
        assert_eq!(farey_sequence(5).unwrap().items(), &want);
    }

    #[test]
    fn unimodular_spot_check() {
        let seq = farey_sequence(7).unwrap();
        let i = seq.iter().position(|&x| x == f(2, 7)).unwrap();
        assert_eq!(seq.items()[i + 1], f(1, 3));
        assert_eq!(1 * 7 - 2 * 3, 1);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(matches!(farey_sequence(0), Err(Error::InvalidInput(_))));
        assert!(matches!(
            farey_sequence_with_max(11, 10),
            Err(Error::Sizing(_))
        ));
    }

    #[test]
    fn matches_brute_force_and_invariants() {
        let tables = crate::numtheory::build_sieves(500).unwrap();
        for order in 1..=500u32 {
            let seq = farey_sequence(order).unwrap();
            if order <= 120 || order % 37 == 0 || order == 500 {
                assert_eq!(seq.items(), brute_force(order).as_slice(), "Q = {order}");
            }
            assert_eq!(seq.len() as u64, tables.phi_cumulative(order as usize));
            assert_eq!(seq.items()[0], f(1, order));
            assert_eq!(*seq.items().last().unwrap(), f(1, 1));
            let q2 = u64::from(order) * u64::from(order);
            for w in seq.items().windows(2) {
                let (x, y) = (w[0], w[1]);
                let det = i64::from(y.a) * i64::from(x.q) - i64::from(x.a) * i64::from(y.q);
                assert_eq!(det, 1, "unimodularity at {x}, {y}");
                // gap = 1/(q q') ≥ 1/Q²
                assert!(u64::from(x.q) * u64::from(y.q) <= q2);
            }
        }
    }

    #[test]
    fn reflection_permutes_interior() {
        for order in [2u32, 3, 10, 57, 200] {
            let seq = farey_sequence(order).unwrap();
            let interior: HashSet<(u32, u32)> = seq
                .iter()
                .filter(|x| x.a < x.q)
                .map(|x| (x.a, x.q))
                .collect();
            let reflected: HashSet<(u32, u32)> =
                interior.iter().map(|&(a, q)| (q - a, q)).collect();
            assert_eq!(interior, reflected);
        }
    }

    #[test]
    fn unit_points_are_sorted_in_unit_interval() {
        let pts = unit_points(50);
        assert_eq!(pts[0], 0.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(*pts.last().unwrap() < 1.0);
        assert_eq!(pts.len(), farey_sequence(50).unwrap().len());
    }
}
