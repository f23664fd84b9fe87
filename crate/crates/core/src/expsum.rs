//! Farey exponential sums `Σ_{γ ∈ F_Q} e(rγ)` and the Möbius divisor identity
//! `Σ_{γ ∈ F_Q} e(rγ) = Σ_{d | r} d·M(Q/d)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::farey::{FareyFraction, FareySequence};
use crate::numtheory::SieveTables;
use crate::summation::CompensatedSum;

/// Direct evaluation with compensated accumulation, in sequence order.
///
/// The phase `rγ mod 1` is reduced exactly in integers before the
/// trigonometric call, so large `r` loses no accuracy.
pub fn farey_exponential_sum_direct(seq: &FareySequence, r: i64) -> Complex64 {
    exponential_sum_over(seq.iter().copied(), r)
}

/// Same as [`farey_exponential_sum_direct`] over any stream of fractions.
pub fn exponential_sum_over<I>(fractions: I, r: i64) -> Complex64
where
    I: IntoIterator<Item = FareyFraction>,
{
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for f in fractions {
        let q = i128::from(f.q);
        let residue = (i128::from(r) * i128::from(f.a)).rem_euclid(q);
        let angle = TAU * (residue as f64 / f.q as f64);
        let (s, c) = angle.sin_cos();
        re.add(c);
        im.add(s);
    }
    Complex64::new(re.value(), im.value())
}

/// Divisor-sum side: `Σ_{d | |r|, d ≤ Q} d·M(⌊Q/d⌋)`, exact.
pub fn farey_exponential_sum_identity(tables: &SieveTables, order: usize, r: i64) -> Result<i64> {
    if r == 0 {
        return Err(Error::InvalidInput(
            "r = 0 is not accepted; the sum is the Farey cardinality".into(),
        ));
    }
    if order == 0 {
        return Err(Error::InvalidInput("Farey order must be at least 1".into()));
    }
    tables.require(order, "exponential-sum identity")?;
    let r = r.unsigned_abs();
    let term = |d: u64| -> i64 {
        if d <= order as u64 {
            d as i64 * tables.mertens(order / d as usize)
        } else {
            0
        }
    };
    let mut total = 0i64;
    let mut d = 1u64;
    while d * d <= r {
        if r % d == 0 {
            total += term(d);
            if d != r / d {
                total += term(r / d);
            }
        }
        d += 1;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::farey_sequence;
    use crate::numtheory::build_sieves;

    #[test]
    fn direct_examples() {
        let s3 = farey_sequence(3).unwrap();
        let v = farey_exponential_sum_direct(&s3, 1);
        assert!((v.re + 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        let z = farey_exponential_sum_direct(&s3, 0);
        assert_eq!(z, Complex64::new(4.0, 0.0));
        let s1 = farey_sequence(1).unwrap();
        let one = farey_exponential_sum_direct(&s1, 7);
        assert!((one.re - 1.0).abs() < 1e-15 && one.im.abs() < 1e-15);
    }

    #[test]
    fn identity_examples() {
        let t = build_sieves(20).unwrap();
        assert_eq!(
            farey_exponential_sum_identity(&t, 3, 1).unwrap(),
            t.mertens(3)
        );
        assert_eq!(farey_exponential_sum_identity(&t, 3, 1).unwrap(), -1);
        for r in [1, 5, -9, 1000] {
            assert_eq!(farey_exponential_sum_identity(&t, 1, r).unwrap(), 1);
        }
        // 1·M(10) + 2·M(5) + 3·M(3) + 6·M(1) = −1 − 4 − 3 + 6
        assert_eq!((t.mertens(10), t.mertens(5), t.mertens(3)), (-1, -2, -1));
        assert_eq!(farey_exponential_sum_identity(&t, 10, 6).unwrap(), -2);
        let direct = farey_exponential_sum_direct(&farey_sequence(10).unwrap(), 6);
        assert!((direct.re + 2.0).abs() < 1e-12);
    }

    #[test]
    fn square_divisor_counted_once() {
        let t = build_sieves(20).unwrap();
        // divisors of 4: 1, 2, 4
        let want = t.mertens(20) + 2 * t.mertens(10) + 4 * t.mertens(5);
        assert_eq!(farey_exponential_sum_identity(&t, 20, 4).unwrap(), want);
        let direct = farey_exponential_sum_direct(&farey_sequence(20).unwrap(), 4);
        assert!((direct.re - want as f64).abs() < 1e-10);
    }

    #[test]
    fn identity_errors() {
        let t = build_sieves(10).unwrap();
        assert!(matches!(
            farey_exponential_sum_identity(&t, 5, 0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            farey_exponential_sum_identity(&t, 11, 1),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn zero_frequency_divisor_sum_is_cardinality() {
        // d | 0 for every d ≤ Q
        let t = build_sieves(300).unwrap();
        for q in 1..=300usize {
            let s: i64 = (1..=q).map(|d| d as i64 * t.mertens(q / d)).sum();
            assert_eq!(s as u64, t.phi_cumulative(q), "Q = {q}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for q in [5u32, 31, 120] {
            let seq = farey_sequence(q).unwrap();
            let n = seq.len() as f64;
            for r in 1..40 {
                let a = farey_exponential_sum_direct(&seq, r);
                let b = farey_exponential_sum_direct(&seq, -r);
                assert!((a - b).norm() <= 1e-9, "Q = {q}, r = {r}");
                assert!(a.im.abs() <= 1e-9 * n);
            }
        }
    }
}
