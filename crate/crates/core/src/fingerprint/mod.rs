//! Rolling-hash fingerprints.
//!
//! `h_p(u) = (sum_i u_i * 2^(i-1)) mod p` for a prime `p` drawn uniformly
//! from the first `r` primes, where `r = ceil(delta * max_len / epsilon)`
//! sizes the universe so that `delta` comparisons of strings of length at
//! most `max_len` jointly err with probability at most `epsilon`.

pub mod primes;

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::ceil_log2;
use crate::strings::BitString;

pub use primes::{first_r_primes, nth_prime};

/// Default error budget.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// A chosen modulus together with the universe it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct HashParams {
    p: u64,
    epsilon: f64,
    delta: u64,
    r: u64,
    max_len: usize,
    largest_prime: u64,
}

impl HashParams {
    /// Explicit parameters; `p` must be one of the first `r` primes.
    pub fn new(p: u64, r: u64, epsilon: f64, delta: u64, max_len: usize) -> Result<Self> {
        validate_budget(delta, max_len, epsilon)?;
        let largest_prime = nth_prime(r)?;
        if p > largest_prime || !is_prime(p) {
            return Err(Error::InvalidParameter(format!(
                "{p} is not among the first {r} primes"
            )));
        }
        Ok(HashParams {
            p,
            epsilon,
            delta,
            r,
            max_len,
            largest_prime,
        })
    }

    /// The smallest universe that contains `p`; handy for fixed-prime tests.
    pub fn with_prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        // smallest r with p_r >= p
        let (mut lo, mut hi) = (1u64, p);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if nth_prime(mid)? >= p {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        HashParams::new(p, lo, 0.5, 1, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// `p_r`, the largest prime the universe could have produced.
    pub fn largest_prime(&self) -> u64 {
        self.largest_prime
    }

    /// Bits of a hash of the chosen prime, `ceil(log2 p)`.
    pub fn hash_width(&self) -> usize {
        ceil_log2(self.p)
    }

    /// Qubits allocated per hash register: wide enough for any prime of the
    /// universe, so layouts depend only on `(delta, max_len, epsilon)`.
    pub fn register_width(&self) -> usize {
        ceil_log2(self.largest_prime)
    }
}

fn validate_budget(delta: u64, max_len: usize, epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if delta == 0 || max_len == 0 {
        return Err(Error::InvalidParameter(
            "delta and max_len must be positive".into(),
        ));
    }
    Ok(())
}

/// `r = ceil(delta * max_len / epsilon)`, robust to representation error in
/// `epsilon` (`4 / 0.1` is not exactly 40 in binary floating point).
pub fn universe_size(delta: u64, max_len: usize, epsilon: f64) -> Result<u64> {
    validate_budget(delta, max_len, epsilon)?;
    let x = delta as f64 * max_len as f64 / epsilon;
    let nearest = x.round();
    let r = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    Ok(r as u64)
}

/// Draws `p` uniformly from the first `ceil(delta * max_len / epsilon)` primes.
pub fn choose_prime<R: Rng + ?Sized>(
    rng: &mut R,
    delta: u64,
    max_len: usize,
    epsilon: f64,
) -> Result<HashParams> {
    let r = universe_size(delta, max_len, epsilon)?;
    let largest_prime = nth_prime(r)?;
    let p = nth_prime(rng.gen_range(1..=r))?;
    Ok(HashParams {
        p,
        epsilon,
        delta,
        r,
        max_len,
        largest_prime,
    })
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    (2u64..)
        .take_while(|d| d.saturating_mul(*d) <= n)
        .all(|d| !n.is_multiple_of(d))
}

/// A residue `h_p(u)` together with its bit width `ceil(log2 p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashValue {
    residue: u64,
    width: usize,
}

impl HashValue {
    pub fn new(residue: u64, p: u64) -> Self {
        assert!(residue < p, "residue {residue} not reduced mod {p}");
        HashValue {
            residue,
            width: ceil_log2(p),
        }
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Least-significant bit first, exactly `width` bits.
    pub fn bits(&self) -> Vec<u8> {
        (0..self.width).map(|j| ((self.residue >> j) & 1) as u8).collect()
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// `h_p(u)`, accumulating powers of two modulo `p`.
pub fn rolling_hash(u: &[u8], p: u64) -> HashValue {
    let mut acc = 0u64;
    let mut pow = 1 % p;
    for &bit in u {
        if bit == 1 {
            acc = (acc + pow) % p;
        }
        pow = mul_mod(pow, 2, p);
    }
    HashValue::new(acc, p)
}

/// `[h_p(u[1,0]), h_p(u[1,1]), .., h_p(u[1,|u|])]` in one left-to-right pass.
pub fn prefix_hashes(u: &[u8], p: u64) -> Vec<HashValue> {
    let mut out = Vec::with_capacity(u.len() + 1);
    let mut acc = 0u64;
    let mut pow = 1 % p;
    out.push(HashValue::new(0, p));
    for &bit in u {
        acc = (acc + pow * u64::from(bit)) % p;
        pow = mul_mod(pow, 2, p);
        out.push(HashValue::new(acc, p));
    }
    out
}

/// Hash-pair comparisons performed by the binary search for `k = min(|u|, |v|)`,
/// `ceil(log2 (k + 1))`.
pub fn bsearch_comparisons(k: usize) -> usize {
    ceil_log2(k as u64 + 1)
}

/// Outcome of [`compare_by_hash_bsearch_classical`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashComparison {
    pub ordering: Ordering,
    /// Longest common prefix as located by the hashes.
    pub lcp: usize,
    pub comparisons: usize,
}

/// Largest `x` in `0..=hi` with `equal(x)`, for a predicate that holds on a
/// prefix of the range and `equal(0)`. Always evaluates `equal` exactly
/// `ceil(log2 (hi + 1))` times.
pub(crate) fn branchless_upper_search(hi: usize, mut equal: impl FnMut(usize) -> bool) -> usize {
    try_branchless_upper_search(hi, |x| Ok::<_, std::convert::Infallible>(equal(x)))
        .unwrap_or_else(|never| match never {})
}

/// Largest `x` in `[0, hi]` with `equal(x)` for a monotone `equal` that
/// holds at 0, using exactly `ceil(log2(hi + 1))` probes, none at 0.
pub(crate) fn try_branchless_upper_search<E>(
    hi: usize,
    mut equal: impl FnMut(usize) -> Result<bool, E>,
) -> Result<usize, E> {
    let steps = ceil_log2(hi as u64 + 1);
    let mut x = 0;
    for s in (0..steps).rev() {
        let candidate = (x + (1 << s)).min(hi);
        if equal(candidate)? {
            x = candidate;
        }
    }
    Ok(x)
}

/// Lexicographic comparison through prefix hashes: binary search for the
/// longest prefix on which the hashes agree, then the three-case rule.
pub fn compare_by_hash_bsearch_classical(
    u: &BitString,
    v: &BitString,
    params: &HashParams,
) -> HashComparison {
    let p = params.p();
    let hu = prefix_hashes(u.bits(), p);
    let hv = prefix_hashes(v.bits(), p);
    let k = u.len().min(v.len());
    let mut comparisons = 0;
    let lcp = branchless_upper_search(k, |x| {
        comparisons += 1;
        hu[x] == hv[x]
    });
    let t = lcp + 1;
    let ordering = match (u.symbol(t), v.symbol(t)) {
        (Some(a), Some(b)) => a.cmp(&b),
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    HashComparison {
        ordering,
        lcp,
        comparisons,
    }
}
