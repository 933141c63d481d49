//! Quantum string matching over a superposition of window hashes.
//!
//! The search state is `sum_a |a> |h_p(s[a+1, a+m])>`; the pattern hash
//! `h_p(w)` stays classical. The oracle `f(a) = [h_p(window a) = h_p(w)]` is
//! itself a Grover search over the bit positions where the two hashes
//! differ, so it errs (one-sidedly, reporting "equal") with a probability
//! that depends on how many bits differ.

use std::collections::HashMap;

use rand::Rng;

use crate::error::Result;
use crate::fingerprint::{choose_prime, prefix_hashes, HashParams};
use crate::grover::{
    bbht_search, grover_run, optimal_iterations, schedule_copies, OracleSpec, RunContext,
    VOTE_COUNTER_QUBITS,
};
use crate::math::ceil_log2;
use crate::resources::ResourceLedger;
use crate::sim::{Backend, Binding, CopySpec, CopyState, StateFactory};
use crate::strings::MatchInstance;

/// Ancillas beyond the registers: outer kickback, inner kickback, inner
/// verdict and the vote counter.
pub const MATCH_ANCILLAS: usize = 3 + VOTE_COUNTER_QUBITS;

/// Equality test of two `bits`-bit values by Grover search for a position
/// where they differ.
///
/// Schedule over a `w`-qubit position register: one zero-iteration probe,
/// then `2^j` iterations for `j = 0..=floor(w/2)`, each followed by
/// measurement and a classical check of the measured position. The test
/// reports "unequal" as soon as one check succeeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerEqualityTest {
    bits: usize,
    index_width: usize,
    schedule: Vec<u64>,
}

impl InnerEqualityTest {
    pub fn new(bits: usize) -> Self {
        let bits = bits.max(1);
        let index_width = ceil_log2(bits as u64);
        let mut schedule = vec![0];
        schedule.extend((0..=index_width / 2).map(|j| 1u64 << j));
        InnerEqualityTest {
            bits,
            index_width,
            schedule,
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn index_width(&self) -> usize {
        self.index_width
    }

    pub fn schedule(&self) -> &[u64] {
        &self.schedule
    }

    /// Inner Grover iterations per evaluation.
    pub fn iterations(&self) -> u64 {
        self.schedule.iter().sum()
    }

    /// Gate units per evaluation: each iteration is a query plus a
    /// diffusion over the position register, each repetition one check.
    pub fn evaluation_cost(&self) -> u64 {
        let w = self.index_width as u64;
        self.schedule.iter().map(|k| k * (w + 1)).sum::<u64>() + self.schedule.len() as u64
    }

    /// Position register bound to the bits of `a` and `b`.
    pub fn copy_spec(&self, a: u64, b: u64) -> CopySpec {
        let padded = 1usize << self.index_width;
        let bit = |x: u64, j: usize| if j < self.bits { x >> j & 1 } else { 0 };
        CopySpec::new(
            self.bits,
            vec![
                Binding::new("x", 1, (0..padded).map(|j| bit(a, j)).collect()),
                Binding::new("y", 1, (0..padded).map(|j| bit(b, j)).collect()),
            ],
        )
        .expect("inner bindings cover the padded domain")
    }

    fn oracle(&self) -> OracleSpec<'static> {
        OracleSpec::new(self.bits, |_, data| data[0] != data[1])
    }

    /// Closed-form probability that every repetition misses when `t` of the
    /// positions differ.
    pub fn failure_for_popcount(&self, t: usize) -> f64 {
        if t == 0 {
            return 0.0;
        }
        let padded = (1u64 << self.index_width) as f64;
        let theta = (t as f64 / padded).sqrt().asin();
        self.schedule
            .iter()
            .map(|&k| 1.0 - ((2 * k + 1) as f64 * theta).sin().powi(2))
            .product()
    }

    /// Largest failure probability over all nonzero popcounts.
    pub fn worst_failure(&self) -> f64 {
        (1..=self.bits)
            .map(|t| self.failure_for_popcount(t))
            .fold(0.0, f64::max)
    }

    /// Failure probability of the test on `(a, b)`, read from the final
    /// amplitudes of each repetition simulated in `ctx.backend`.
    pub fn failure_probability(&self, a: u64, b: u64, ctx: &mut RunContext) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        let spec = self.copy_spec(a, b);
        let oracle = self.oracle();
        let mut failure = 1.0;
        for &k in &self.schedule {
            let mut state = spec.prepare(ctx.backend)?;
            ctx.record("inner prepare", &state);
            self.iterate(&mut state, &oracle, k, ctx)?;
            let probs = state.index_probabilities();
            let hit: f64 = (0..spec.domain())
                .filter(|&j| oracle.evaluate(j, &spec.data(j)))
                .map(|j| probs[j])
                .sum();
            failure *= (1.0 - hit).clamp(0.0, 1.0);
        }
        Ok(failure)
    }

    fn iterate(
        &self,
        state: &mut CopyState,
        oracle: &OracleSpec,
        iterations: u64,
        ctx: &mut RunContext,
    ) -> Result<()> {
        let marked = |a: usize, data: &[u64]| oracle.evaluate(a, data);
        for _ in 0..iterations {
            state.phase_oracle(&marked)?;
            state.diffusion();
            ctx.record("inner iteration", state);
        }
        Ok(())
    }

    /// One sampled execution; `true` when a differing position was found.
    /// Costs are not charged here: callers account for the evaluation.
    pub fn sample(&self, a: u64, b: u64, ctx: &mut RunContext) -> Result<bool> {
        let spec = self.copy_spec(a, b);
        let oracle = self.oracle();
        for &k in &self.schedule {
            let mut state = spec.prepare(ctx.backend)?;
            self.iterate(&mut state, &oracle, k, ctx)?;
            let j = state.measure_index(&mut ctx.rng);
            if oracle.evaluate(j, &spec.data(j)) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Memoised inner failure probabilities keyed by popcount of `a xor b`.
#[derive(Debug, Default)]
pub(crate) struct FailureCache {
    by_popcount: HashMap<u32, f64>,
}

impl FailureCache {
    pub(crate) fn get(
        &mut self,
        test: &InnerEqualityTest,
        a: u64,
        b: u64,
        ctx: &mut RunContext,
    ) -> Result<f64> {
        let t = (a ^ b).count_ones();
        if let Some(&e) = self.by_popcount.get(&t) {
            return Ok(e);
        }
        let e = test.failure_probability(a, b, ctx)?;
        self.by_popcount.insert(t, e);
        Ok(e)
    }
}

/// Everything needed to prepare copies of the matching state.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchStateSpec {
    params: HashParams,
    n: usize,
    m: usize,
    windows: usize,
    index_width: usize,
    hash_width: usize,
    target: u64,
    window_hashes: Vec<u64>,
}

impl MatchStateSpec {
    pub fn new(inst: &MatchInstance, params: &HashParams) -> Result<Self> {
        let p = params.p();
        let windows = inst.window_count();
        let index_width = ceil_log2(windows as u64);
        let hash_width = params.register_width();
        let target = crate::fingerprint::rolling_hash(inst.pattern().bits(), p).residue();
        let text = inst.text().bits();
        let mut window_hashes: Vec<u64> = if p == 2 {
            // 2 = 0 mod 2, so only the first bit of a window survives
            text[..windows].iter().map(|&b| u64::from(b)).collect()
        } else {
            let prefix = prefix_hashes(text, p);
            let inv = inverse_pow2(windows, p);
            (0..windows)
                .map(|a| {
                    // h(s[a+1, a+m]) = (H(a+m) - H(a)) / 2^a mod p
                    let diff = (prefix[a + inst.m()].residue() + p - prefix[a].residue()) % p;
                    mul_mod(diff, inv[a], p)
                })
                .collect()
        };
        window_hashes.resize(1 << index_width, target ^ 1);
        Ok(MatchStateSpec {
            params: params.clone(),
            n: inst.n(),
            m: inst.m(),
            windows,
            index_width,
            hash_width,
            target,
            window_hashes,
        })
    }

    pub fn params(&self) -> &HashParams {
        &self.params
    }

    /// `N = n - m + 1`.
    pub fn windows(&self) -> usize {
        self.windows
    }

    pub fn index_width(&self) -> usize {
        self.index_width
    }

    /// Qubits per hash register.
    pub fn hash_width(&self) -> usize {
        self.hash_width
    }

    /// `h_p(w)`.
    pub fn target(&self) -> u64 {
        self.target
    }

    /// Hash bound to padding indices; differs from the target.
    pub fn sentinel(&self) -> u64 {
        self.target ^ 1
    }

    /// Bound hash of every padded index.
    pub fn window_hashes(&self) -> &[u64] {
        &self.window_hashes
    }

    /// Copies provisioned for the doubling schedule.
    pub fn copies(&self) -> usize {
        schedule_copies(self.index_width)
    }

    pub fn copy_spec(&self) -> CopySpec {
        CopySpec::new(
            self.windows,
            vec![Binding::new("hash", self.hash_width, self.window_hashes.clone())],
        )
        .expect("window table covers the padded domain")
    }

    pub fn inner_test(&self) -> InnerEqualityTest {
        InnerEqualityTest::new(self.hash_width)
    }

    /// Qubits for `copies` copies of the search state.
    pub fn qubits_for(&self, copies: usize) -> u64 {
        match_qubits(self.index_width, self.hash_width, copies)
    }
}

/// `W + copies (w + W) + ceil(log2 W) + MATCH_ANCILLAS`.
pub(crate) fn match_qubits(index_width: usize, hash_width: usize, copies: usize) -> u64 {
    (hash_width
        + copies * (index_width + hash_width)
        + ceil_log2(hash_width.max(1) as u64)
        + MATCH_ANCILLAS) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// `2^{-a} mod p` for `a < count`, `p` odd.
fn inverse_pow2(count: usize, p: u64) -> Vec<u64> {
    let half = p.div_ceil(2);
    let mut out = Vec::with_capacity(count);
    let mut x = 1;
    for _ in 0..count {
        out.push(x);
        x = mul_mod(x, half, p);
    }
    out
}

/// Hash parameters for matching: `delta = N` comparisons of strings of
/// length `m`.
pub fn match_params<R: Rng + ?Sized>(
    inst: &MatchInstance,
    epsilon: f64,
    rng: &mut R,
) -> Result<HashParams> {
    choose_prime(rng, inst.window_count() as u64, inst.m(), epsilon)
}

/// State description and factory for `copies` fresh copies.
pub fn prepare_match_state(
    inst: &MatchInstance,
    params: &HashParams,
    backend: Backend,
) -> Result<(MatchStateSpec, StateFactory)> {
    let spec = MatchStateSpec::new(inst, params)?;
    let factory = StateFactory::new(spec.copy_spec(), backend, spec.copies());
    Ok((spec, factory))
}

/// One sampled evaluation of `f(i)`; padding indices evaluate to `false`.
pub fn equality_oracle_f(spec: &MatchStateSpec, i: usize, ctx: &mut RunContext) -> Result<bool> {
    if i >= spec.windows() {
        return Ok(false);
    }
    let unequal = spec
        .inner_test()
        .sample(spec.target(), spec.window_hashes()[i], ctx)?;
    Ok(!unequal)
}

/// Per-index single-evaluation error of `f`.
fn oracle_errors(spec: &MatchStateSpec, ctx: &mut RunContext) -> Result<Vec<f64>> {
    let test = spec.inner_test();
    let mut cache = FailureCache::default();
    let mut errors = vec![0.0; spec.window_hashes().len()];
    for (i, &h) in spec.window_hashes().iter().enumerate().take(spec.windows()) {
        if h != spec.target() {
            errors[i] = cache.get(&test, spec.target(), h, ctx)?;
        }
    }
    Ok(errors)
}

fn match_oracle<'a>(spec: &'a MatchStateSpec, errors: Vec<f64>) -> Result<OracleSpec<'a>> {
    let test = spec.inner_test();
    let target = spec.target();
    OracleSpec::new(spec.windows(), move |_, data| data[0] == target)
        .with_cost(test.evaluation_cost(), test.iterations())
        .with_errors(errors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// 1-indexed occurrence, present only when classically verified.
    pub position: Option<usize>,
    /// 1-indexed window measured last (before verification), if real.
    pub measured: Option<usize>,
    pub hash_verified: bool,
    pub exactly_verified: bool,
    pub copies_used: usize,
    pub qubits: u64,
    pub ledger: ResourceLedger,
}

impl MatchResult {
    pub fn gate_units(&self) -> u64 {
        self.ledger.gate_units_total()
    }

    pub fn inner_iterations(&self) -> u64 {
        self.ledger.totals().inner_grover_iterations
    }
}

fn finish(
    inst: &MatchInstance,
    spec: &MatchStateSpec,
    measured: usize,
    hash_verified: bool,
    copies_used: usize,
    qubits: u64,
    ctx: &mut RunContext,
) -> MatchResult {
    let measured = (measured < spec.windows()).then_some(measured + 1);
    let exactly_verified = hash_verified && measured.is_some_and(|d| inst.occurs_at(d));
    ctx.ledger.set_qubits(qubits);
    MatchResult {
        position: if exactly_verified { measured } else { None },
        measured,
        hash_verified,
        exactly_verified,
        copies_used,
        qubits,
        ledger: ctx.ledger.clone(),
    }
}

/// Single Grover run tuned for exactly one occurrence.
pub fn match_unique(
    inst: &MatchInstance,
    params: &HashParams,
    ctx: &mut RunContext,
) -> Result<MatchResult> {
    let spec = MatchStateSpec::new(inst, params)?;
    let mut factory = StateFactory::new(spec.copy_spec(), ctx.backend, 1);
    let errors = oracle_errors(&spec, ctx)?;
    let oracle = match_oracle(&spec, errors)?;
    let iterations = optimal_iterations(1 << spec.index_width(), 1)?;
    let mut state = factory.next_copy()?;
    let run = grover_run(&mut state, &oracle, iterations, ctx)?;
    let qubits = spec.qubits_for(1);
    Ok(finish(inst, &spec, run.found_index, run.predicate_value, 1, qubits, ctx))
}

/// Doubling schedule for any number of occurrences.
pub fn match_search(
    inst: &MatchInstance,
    params: &HashParams,
    ctx: &mut RunContext,
) -> Result<MatchResult> {
    let (spec, mut factory) = prepare_match_state(inst, params, ctx.backend)?;
    let errors = oracle_errors(&spec, ctx)?;
    let oracle = match_oracle(&spec, errors)?;
    let search = bbht_search(&mut factory, &oracle, ctx)?;
    let measured = *search.measurements.last().expect("at least one repetition");
    let qubits = spec.qubits_for(spec.copies());
    Ok(finish(
        inst,
        &spec,
        measured,
        search.found.is_some(),
        factory.used(),
        qubits,
        ctx,
    ))
}
