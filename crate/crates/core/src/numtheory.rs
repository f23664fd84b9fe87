//! Sieved arithmetic functions: Euler's totient, the Möbius function, the
//! Mertens function and the totient summatory function.
//!
//! Memory model: for a limit `L` the tables hold `L + 1` entries each of
//! `u32` (φ), `i8` (μ), `i64` (M) and `u64` (Σφ), about 21 bytes per index,
//! plus the prime list used during construction. All values are exact.

use crate::error::{Error, Result};

/// Default ceiling on the sieve limit.
pub const DEFAULT_MAX_LIMIT: usize = 100_000_000;

/// Precomputed φ, μ, M and Σφ for `1 ≤ n ≤ limit`. Index 0 holds zeros.
#[derive(Debug, Clone)]
pub struct SieveTables {
    limit: usize,
    phi: Vec<u32>,
    mu: Vec<i8>,
    mertens: Vec<i64>,
    phi_cumulative: Vec<u64>,
}

/// Builds the tables up to `limit` under the default ceiling.
pub fn build_sieves(limit: usize) -> Result<SieveTables> {
    build_sieves_with_max(limit, DEFAULT_MAX_LIMIT)
}

/// Builds the tables with an explicit ceiling on `limit`.
pub fn build_sieves_with_max(limit: usize, max_limit: usize) -> Result<SieveTables> {
    if limit == 0 {
        return Err(Error::Sizing("sieve limit must be at least 1".into()));
    }
    if limit > max_limit {
        return Err(Error::Sizing(format!(
            "sieve limit {limit} exceeds the configured maximum {max_limit}"
        )));
    }

    // Linear sieve: every composite is struck exactly once by its least prime factor.
    let mut phi = vec![0u32; limit + 1];
    let mut mu = vec![0i8; limit + 1];
    let mut is_composite = vec![false; limit + 1];
    let mut primes: Vec<u32> = Vec::new();
    phi[1] = 1;
    mu[1] = 1;
    for i in 2..=limit {
        if !is_composite[i] {
            primes.push(i as u32);
            phi[i] = (i - 1) as u32;
            mu[i] = -1;
        }
        for &p in &primes {
            let p = p as usize;
            let m = i * p;
            if m > limit {
                break;
            }
            is_composite[m] = true;
            if i % p == 0 {
                phi[m] = phi[i] * p as u32;
                mu[m] = 0;
                break;
            }
            phi[m] = phi[i] * (p as u32 - 1);
            mu[m] = -mu[i];
        }
    }
    drop(is_composite);

    let mut mertens = vec![0i64; limit + 1];
    let mut phi_cumulative = vec![0u64; limit + 1];
    for n in 1..=limit {
        mertens[n] = mertens[n - 1] + i64::from(mu[n]);
        phi_cumulative[n] = phi_cumulative[n - 1] + u64::from(phi[n]);
    }

    Ok(SieveTables {
        limit,
        phi,
        mu,
        mertens,
        phi_cumulative,
    })
}

impl SieveTables {
    pub fn limit(&self) -> usize {
        self.limit
    }

    /// φ(n); panics when `n` is 0 or above the limit.
    pub fn phi(&self, n: usize) -> u32 {
        self.check(n);
        self.phi[n]
    }

    pub fn mu(&self, n: usize) -> i8 {
        self.check(n);
        self.mu[n]
    }

    /// M(n) = Σ_{k≤n} μ(k). `mertens(0)` is 0.
    pub fn mertens(&self, n: usize) -> i64 {
        assert!(
            n <= self.limit,
            "index {n} above sieve limit {}",
            self.limit
        );
        self.mertens[n]
    }

    /// Σ_{k≤n} φ(k). `phi_cumulative(0)` is 0.
    pub fn phi_cumulative(&self, n: usize) -> u64 {
        assert!(
            n <= self.limit,
            "index {n} above sieve limit {}",
            self.limit
        );
        self.phi_cumulative[n]
    }

    /// φ values, indexed from 0 (entry 0 is 0).
    pub fn phi_table(&self) -> &[u32] {
        &self.phi
    }

    pub fn mu_table(&self) -> &[i8] {
        &self.mu
    }

    pub fn mertens_table(&self) -> &[i64] {
        &self.mertens
    }

    pub fn phi_cumulative_table(&self) -> &[u64] {
        &self.phi_cumulative
    }

    fn check(&self, n: usize) {
        assert!(
            (1..=self.limit).contains(&n),
            "index {n} outside sieve range 1..={}",
            self.limit
        );
    }

    pub(crate) fn require(&self, n: usize, what: &str) -> Result<()> {
        if n > self.limit {
            Err(Error::OutOfRange(format!(
                "{what} needs sieve values up to {n}, tables stop at {}",
                self.limit
            )))
        } else {
            Ok(())
        }
    }
}

/// Number of Farey fractions of order `q_order` in (0, 1], N_Q = Σ_{k≤Q} φ(k).
pub fn farey_cardinality(tables: &SieveTables, q_order: usize) -> Result<u64> {
    if q_order == 0 {
        return Err(Error::InvalidInput("Farey order must be at least 1".into()));
    }
    tables.require(q_order, "Farey cardinality")?;
    Ok(tables.phi_cumulative[q_order])
}
