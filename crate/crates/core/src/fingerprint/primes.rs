//! Prime universes: the first `r` primes.
//!
//! Small universes are listed outright. Large ones (the binary-search
//! comparator at `k = 4096` needs `r` in the hundreds of millions) go
//! through a process-wide segmented sieve that stores only a running
//! prime count per segment, so the `i`-th prime is found by re-sieving a
//! single segment.

use std::sync::{OnceLock, RwLock};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest `r` accepted by [`first_r_primes`] (the list is materialised).
pub const MAX_LISTED_PRIMES: u64 = 10_000_000;

/// Largest universe accepted by [`nth_prime`]; keeps `p < 2^33`.
pub const MAX_UNIVERSE: u64 = 200_000_000;

const SMALL_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

/// Upper bound on the `r`-th prime: a lookup for `r < 6`, otherwise
/// `r (ln r + ln ln r)`.
pub fn sieve_bound(r: u64) -> u64 {
    if r == 0 {
        return 1;
    }
    if r < 6 {
        return SMALL_PRIMES[r as usize - 1];
    }
    let x = r as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64
}

/// Primes `<= limit`, plain sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// The first `r` primes in increasing order.
pub fn first_r_primes(r: u64) -> Result<Vec<u64>> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    if r > MAX_LISTED_PRIMES {
        return Err(Error::PrimeCap {
            requested: r,
            cap: MAX_LISTED_PRIMES,
        });
    }
    let mut primes = primes_up_to(sieve_bound(r));
    debug_assert!(primes.len() as u64 >= r);
    primes.truncate(r as usize);
    Ok(primes)
}

/// The `i`-th prime, 1-indexed (`nth_prime(1) == 2`).
pub fn nth_prime(i: u64) -> Result<u64> {
    if i == 0 {
        return Err(Error::InvalidParameter("prime index is 1-based".into()));
    }
    if i > MAX_UNIVERSE {
        return Err(Error::PrimeCap {
            requested: i,
            cap: MAX_UNIVERSE,
        });
    }
    Ok(index().nth(i))
}

// Numbers covered per segment; even so the odd-only layout lines up.
const SEGMENT: u64 = 1 << 20;
const EXTEND_BATCH: usize = 64;

struct PrimeIndex {
    base: Vec<u64>,
    // cumulative[s] = number of primes below (s + 1) * SEGMENT
    cumulative: RwLock<Vec<u64>>,
}

fn index() -> &'static PrimeIndex {
    static INDEX: OnceLock<PrimeIndex> = OnceLock::new();
    INDEX.get_or_init(|| {
        // sqrt of the MAX_UNIVERSE-th prime (~4.2e9) is below 2^17.
        let base = primes_up_to(1 << 17);
        PrimeIndex {
            base,
            cumulative: RwLock::new(Vec::new()),
        }
    })
}

impl PrimeIndex {
    /// Odd-only sieve of `[lo, lo + SEGMENT)`; entry `k` is `lo + 2k + 1`.
    fn sieve_segment(&self, lo: u64) -> Vec<bool> {
        let hi = lo + SEGMENT;
        let mut is_prime = vec![true; (SEGMENT / 2) as usize];
        for &q in self.base.iter().skip(1) {
            if q * q >= hi {
                break;
            }
            let mut start = (q * q).max(lo.div_ceil(q) * q);
            if start % 2 == 0 {
                start += q;
            }
            let mut k = ((start - lo - 1) / 2) as usize;
            while k < is_prime.len() {
                is_prime[k] = false;
                k += q as usize;
            }
        }
        if lo == 0 {
            is_prime[0] = false; // 1
        }
        is_prime
    }

    fn segment_count(&self, s: usize) -> u64 {
        let lo = s as u64 * SEGMENT;
        let odd = self.sieve_segment(lo).iter().filter(|&&p| p).count() as u64;
        odd + u64::from(s == 0)
    }

    fn ensure(&self, i: u64) {
        loop {
            let (len, total) = {
                let c = self.cumulative.read().expect("prime index poisoned");
                (c.len(), c.last().copied().unwrap_or(0))
            };
            if total >= i {
                return;
            }
            let counts: Vec<u64> = (len..len + EXTEND_BATCH)
                .into_par_iter()
                .map(|s| self.segment_count(s))
                .collect();
            let mut c = self.cumulative.write().expect("prime index poisoned");
            if c.len() != len {
                continue; // another thread extended first
            }
            let mut acc = total;
            for n in counts {
                acc += n;
                c.push(acc);
            }
        }
    }

    fn nth(&self, i: u64) -> u64 {
        self.ensure(i);
        let (s, before) = {
            let c = self.cumulative.read().expect("prime index poisoned");
            let s = c.partition_point(|&x| x < i);
            (s, if s == 0 { 0 } else { c[s - 1] })
        };
        let lo = s as u64 * SEGMENT;
        let mut remaining = i - before;
        if s == 0 {
            if remaining == 1 {
                return 2;
            }
            remaining -= 1;
        }
        for (k, &p) in self.sieve_segment(lo).iter().enumerate() {
            if p {
                remaining -= 1;
                if remaining == 0 {
                    return lo + 2 * k as u64 + 1;
                }
            }
        }
        unreachable!("segment count disagrees with its sieve")
    }
}
