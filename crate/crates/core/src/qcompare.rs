//! Quantum lexicographic comparison of binary strings.
//!
//! Both comparators locate the first index `a0 < k = min(|u|, |v|)` where
//! the strings differ and then read `u_{a0}`; when no such index exists the
//! lengths decide. [`compare_grover`] finds `a0` as the minimum of the pairs
//! `(1 - [u_a != v_a], a)`; [`compare_bsearch`] binary-searches prefix-hash
//! equality.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fingerprint::{choose_prime, prefix_hashes, try_branchless_upper_search, HashParams};
use crate::grover::{
    durr_hoyer_copies, durr_hoyer_min, durr_hoyer_phase_limit, schedule_copies, votes_for,
    RunContext, Threshold, VOTE_COUNTER_QUBITS,
};
use crate::math::{ceil_log2, majority_failure};
use crate::qmatch::{FailureCache, InnerEqualityTest};
use crate::resources::{CostKind, ResourceLedger};
use crate::sim::{Binding, CopySpec, CopyState, StateFactory};
use crate::strings::BitString;

/// Ancillas of the Grover comparator: the kickback and the comparison flag.
pub const GROVER_COMPARE_ANCILLAS: usize = 2;

/// Ancillas of the binary-search comparator beyond the inner position
/// register: inner kickback, verdict and the vote counter.
pub const BSEARCH_COMPARE_ANCILLAS: usize = 2 + VOTE_COUNTER_QUBITS;

/// `1` iff `(q, i) < (q', i')` lexicographically.
pub fn comp_pairs(q: u64, i: u64, q2: u64, i2: u64) -> bool {
    q < q2 || (q == q2 && i < i2)
}

/// Reads the data bound to index `i`, charging `ceil(log2 k)` access units
/// for the index-swap trick.
pub fn access_element(state: &mut CopyState, i: usize, ctx: &mut RunContext) -> Result<Vec<u64>> {
    let data = state.access(i)?;
    ctx.ledger
        .charge(CostKind::Access, state.index_width() as u64);
    ctx.record("access", state);
    Ok(data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareResult {
    pub verdict: i8,
    /// 1-indexed first differing position located, or `None` when the
    /// strings were found equal on the first `k` symbols.
    pub a0: Option<usize>,
    pub phases: usize,
    /// Hash-pair comparisons in the binary-search phases.
    pub comparisons: usize,
    /// Extra comparison of the full `k`-prefixes (binary search only).
    pub terminal_checks: usize,
    /// Outer Grover iterations (Grover comparator only).
    pub iterations: u64,
    pub copies_used: usize,
    pub qubits: u64,
    /// Inner equality tests that reported equal on unequal hashes.
    pub inner_failures: usize,
    /// Some queried prefix pair had equal hashes but unequal strings.
    pub collision: bool,
    pub ledger: ResourceLedger,
}

fn common_length(u: &BitString, v: &BitString) -> Result<usize> {
    let k = u.len().min(v.len());
    if k == 0 {
        return Err(Error::InvalidParameter(
            "comparison needs two non-empty strings".into(),
        ));
    }
    Ok(k)
}

fn length_verdict(u: &BitString, v: &BitString) -> i8 {
    match u.len().cmp(&v.len()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

fn padded_bits(s: &BitString, k: usize, padded: usize) -> Vec<u64> {
    let mut out: Vec<u64> = s.bits()[..k].iter().map(|&b| u64::from(b)).collect();
    out.resize(padded, 0);
    out
}

/// `(w + 2)(1 + phases * copies_per_phase) + phases (w + 1) + 2`: the state
/// read at the end, the per-phase search copies, the per-phase
/// `(flag, index)` records and the ancillas.
pub fn qubit_count_compare_grover(k: usize) -> u64 {
    let w = ceil_log2(k as u64);
    let phases = durr_hoyer_phase_limit(k);
    let per_phase = schedule_copies(w);
    ((w + 2) * (1 + phases * per_phase) + phases * (w + 1) + GROVER_COMPARE_ANCILLAS) as u64
}

/// Dürr-Høyer over `(1 - [u_a != v_a], a)` starting from the sentinel
/// `(1, k)`.
pub fn compare_grover(u: &BitString, v: &BitString, ctx: &mut RunContext) -> Result<CompareResult> {
    let k = common_length(u, v)?;
    let w = ceil_log2(k as u64);
    let padded = 1usize << w;
    let spec = CopySpec::new(
        k,
        vec![
            Binding::new("u", 1, padded_bits(u, k, padded)),
            Binding::new("v", 1, padded_bits(v, k, padded)),
        ],
    )?;
    let mut xi = spec.prepare(ctx.backend)?;
    let mut factory = StateFactory::new(spec, ctx.backend, durr_hoyer_copies(k));
    let key = |a: usize, data: &[u64]| (u64::from(data[0] == data[1]), a as u64);
    let min = durr_hoyer_min(&mut factory, &key, Threshold::Sentinel((1, k as u64)), ctx)?;

    let (verdict, a0) = match (min.key.0, min.index) {
        (0, Some(a)) => {
            let data = access_element(&mut xi, a, ctx)?;
            (if data[0] < data[1] { -1 } else { 1 }, Some(a + 1))
        }
        _ => (length_verdict(u, v), None),
    };
    let qubits = qubit_count_compare_grover(k);
    ctx.ledger.set_qubits(qubits);
    Ok(CompareResult {
        verdict,
        a0,
        phases: min.phases,
        comparisons: 0,
        terminal_checks: 0,
        iterations: min.iterations,
        copies_used: min.copies_used,
        qubits,
        inner_failures: 0,
        collision: false,
        ledger: ctx.ledger.clone(),
    })
}

/// Hash parameters for the binary-search comparator: `delta = k` prefix
/// comparisons of length at most `k`.
pub fn compare_params<R: Rng + ?Sized>(
    u: &BitString,
    v: &BitString,
    epsilon: f64,
    rng: &mut R,
) -> Result<HashParams> {
    let k = common_length(u, v)?;
    choose_prime(rng, k as u64, k, epsilon)
}

/// `(w + 1)(w + 2W) + (w + 1) + ceil(log2 W) + ancillas` for `w = ceil(log2 k)`
/// and `W` hash qubits: `w + 1` prefix-hash copies, the symbol state, the
/// inner position register and the ancillas.
pub fn qubit_count_compare_bsearch_width(k: usize, hash_width: usize) -> u64 {
    let w = ceil_log2(k as u64);
    ((w + 1) * (w + 2 * hash_width)
        + (w + 1)
        + ceil_log2(hash_width.max(1) as u64)
        + BSEARCH_COMPARE_ANCILLAS) as u64
}

/// Prefix-hash equality tests, one fresh copy per test.
struct PrefixProbe<'a> {
    u: &'a [u8],
    v: &'a [u8],
    factory: StateFactory,
    test: InnerEqualityTest,
    votes: usize,
    cache: FailureCache,
    inner_failures: usize,
    collision: bool,
}

impl PrefixProbe<'_> {
    /// Reported hash equality of the length-`x` prefixes, `1 <= x <= k`.
    fn equal(&mut self, x: usize, ctx: &mut RunContext) -> Result<bool> {
        ctx.ledger.begin_phase(format!("prefix {x}"));
        let mut copy = self.factory.next_copy()?;
        ctx.record("prepare", &copy);
        let data = access_element(&mut copy, x - 1, ctx)?;
        let (a, b) = (data[0], data[1]);
        let votes = self.votes as u64;
        ctx.ledger.charge(CostKind::OracleQuery, votes);
        ctx.ledger
            .charge(CostKind::HashEval, votes * self.test.evaluation_cost());
        ctx.ledger
            .charge(CostKind::InnerGroverIterations, votes * self.test.iterations());
        if a == b {
            self.collision |= self.u[..x] != self.v[..x];
            return Ok(true);
        }
        let e = majority_failure(self.votes, self.cache.get(&self.test, a, b, ctx)?);
        let reported_equal = ctx.rng.gen::<f64>() < e;
        self.inner_failures += usize::from(reported_equal);
        Ok(reported_equal)
    }
}

/// Binary search for the first prefix whose hashes differ, one prefix-hash
/// copy per comparison.
///
/// The phases search `x in [0, k-1]` with exactly `ceil(log2 k)`
/// comparisons; when the search ends at `k - 1` a terminal comparison of
/// the full `k`-prefixes separates "first difference at `k`" from "equal on
/// the first `k` symbols".
pub fn compare_bsearch(
    u: &BitString,
    v: &BitString,
    params: &HashParams,
    ctx: &mut RunContext,
) -> Result<CompareResult> {
    let k = common_length(u, v)?;
    let w = ceil_log2(k as u64);
    let padded = 1usize << w;
    let p = params.p();
    let hash_width = params.register_width();
    let table = |s: &BitString| {
        let mut t: Vec<u64> = prefix_hashes(&s.bits()[..k], p)[1..]
            .iter()
            .map(|h| h.residue())
            .collect();
        t.resize(padded, 0);
        t
    };
    let prefix_spec = CopySpec::new(
        k,
        vec![
            Binding::new("hu", hash_width, table(u)),
            Binding::new("hv", hash_width, table(v)),
        ],
    )?;
    let symbol_spec = CopySpec::new(k, vec![Binding::new("u", 1, padded_bits(u, k, padded))])?;
    let test = InnerEqualityTest::new(hash_width);
    let mut probe = PrefixProbe {
        u: u.bits(),
        v: v.bits(),
        factory: StateFactory::new(prefix_spec, ctx.backend, w + 1),
        votes: votes_for(test.worst_failure(), w.max(1) as u64),
        test,
        cache: FailureCache::default(),
        inner_failures: 0,
        collision: false,
    };

    let mut comparisons = 0;
    let x = try_branchless_upper_search(k - 1, |x| {
        comparisons += 1;
        probe.equal(x, ctx)
    })?;
    debug_assert_eq!(comparisons, w);
    let mut terminal_checks = 0;
    let a0 = if x == k - 1 {
        terminal_checks = 1;
        if probe.equal(k, ctx)? {
            None
        } else {
            Some(k - 1)
        }
    } else {
        Some(x)
    };

    let verdict = match a0 {
        Some(a) => {
            let mut phi = symbol_spec.prepare(ctx.backend)?;
            let symbol = access_element(&mut phi, a, ctx)?[0];
            if symbol == 0 {
                -1
            } else {
                1
            }
        }
        None => length_verdict(u, v),
    };
    let qubits = qubit_count_compare_bsearch_width(k, hash_width);
    ctx.ledger.set_qubits(qubits);
    Ok(CompareResult {
        verdict,
        a0: a0.map(|a| a + 1),
        phases: comparisons + terminal_checks,
        comparisons,
        terminal_checks,
        iterations: 0,
        copies_used: probe.factory.used(),
        qubits,
        inner_failures: probe.inner_failures,
        collision: probe.collision,
        ledger: ctx.ledger.clone(),
    })
}
