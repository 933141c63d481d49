//! Seeded, order-preserving parallel trials.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// One round of the SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master`; distinct trials get decorrelated
/// seeds and the map is a pure function of its inputs.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial))
}

/// Runs `f(trial, seed)` for every trial, in parallel, returning results in
/// trial order. `jobs` bounds the worker count; `None` uses the global pool.
pub fn run_trials<T, F>(master: u64, trials: u64, jobs: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let work = || {
        (0..trials)
            .into_par_iter()
            .map(|t| f(t, trial_seed(master, t)))
            .collect()
    };
    match jobs {
        None => Ok(work()),
        Some(0) => Err(Error::InvalidParameter("--jobs must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

/// Fraction of `true` values.
pub fn rate(hits: impl IntoIterator<Item = bool>) -> f64 {
    let (mut n, mut k) = (0usize, 0usize);
    for h in hits {
        n += 1;
        k += usize::from(h);
    }
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}
