//! Grover search primitives over [`CopyState`]s.
//!
//! Bounded-error oracles are simulated as stochastic trajectories: on each
//! query, the predicate at index `i` is flipped with the probability that a
//! majority of `rho` independent evaluations is wrong there. With exact
//! oracles no randomness is drawn and `rho = 1`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{ceil_log2, majority_failure};
use crate::resources::{CostKind, ResourceLedger};
use crate::sim::{Backend, Binding, CopySpec, CopyState, DenseState, StateFactory};

/// Upper bound on majority votes per query; the vote counter has
/// `ceil(log2(MAX_VOTES + 1))` qubits.
pub const MAX_VOTES: usize = 31;

/// Qubits of the majority-vote counter.
pub const VOTE_COUNTER_QUBITS: usize = 5;

/// Index-register amplitudes after one algorithm step.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub label: String,
    pub amplitudes: Vec<Complex64>,
    /// Norm of the state outside the bound manifold (dense backend only).
    pub residual: f64,
}

/// Per-run mutable context: backend choice, randomness, costs, and an
/// optional step trace.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub backend: Backend,
    pub rng: ChaCha8Rng,
    pub ledger: ResourceLedger,
    pub trace: Option<Vec<Snapshot>>,
    /// Last dense state measured, kept when `capture_dense` is set.
    pub captured: Option<DenseState>,
    pub capture_dense: bool,
}

impl RunContext {
    pub fn new(backend: Backend, seed: u64) -> Self {
        RunContext {
            backend,
            rng: ChaCha8Rng::seed_from_u64(seed),
            ledger: ResourceLedger::new(),
            trace: None,
            captured: None,
            capture_dense: false,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn with_capture(mut self) -> Self {
        self.capture_dense = true;
        self
    }

    pub fn record(&mut self, label: &str, state: &CopyState) {
        if let Some(trace) = &mut self.trace {
            let (amplitudes, residual) = state.snapshot();
            trace.push(Snapshot {
                label: label.to_string(),
                amplitudes,
                residual,
            });
        }
    }

    fn capture(&mut self, state: &CopyState) {
        if self.capture_dense {
            if let Some(d) = state.as_dense() {
                self.captured = Some(d.clone());
            }
        }
    }
}

type Predicate<'a> = Box<dyn Fn(usize, &[u64]) -> bool + Sync + 'a>;

/// Ordering key of an index and its bound data.
pub type KeyFn<'a> = dyn Fn(usize, &[u64]) -> (u64, u64) + Sync + 'a;

/// A search predicate over `(index, bound data)` with its cost and error
/// model. Indices at or beyond `domain` are never marked.
pub struct OracleSpec<'a> {
    domain: usize,
    predicate: Predicate<'a>,
    evaluation_cost: u64,
    inner_iterations: u64,
    errors: Vec<f64>,
}

impl<'a> OracleSpec<'a> {
    /// An exact oracle with zero evaluation cost beyond the query itself.
    pub fn new(domain: usize, predicate: impl Fn(usize, &[u64]) -> bool + Sync + 'a) -> Self {
        OracleSpec {
            domain,
            predicate: Box::new(predicate),
            evaluation_cost: 0,
            inner_iterations: 0,
            errors: Vec::new(),
        }
    }

    /// Gate units per evaluation and inner Grover iterations per evaluation.
    pub fn with_cost(mut self, evaluation_cost: u64, inner_iterations: u64) -> Self {
        self.evaluation_cost = evaluation_cost;
        self.inner_iterations = inner_iterations;
        self
    }

    /// Per-index probability that one evaluation is wrong.
    pub fn with_errors(mut self, errors: Vec<f64>) -> Result<Self> {
        if let Some(e) = errors.iter().find(|e| !(0.0..0.5).contains(*e)) {
            return Err(Error::InvalidParameter(format!(
                "oracle error probability {e} is outside [0, 1/2)"
            )));
        }
        self.errors = errors;
        Ok(self)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn evaluation_cost(&self) -> u64 {
        self.evaluation_cost
    }

    pub fn inner_iterations(&self) -> u64 {
        self.inner_iterations
    }

    /// Worst-case single-evaluation error.
    pub fn error_prob(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    /// Exact predicate value; padding indices are unmarked.
    pub fn evaluate(&self, a: usize, data: &[u64]) -> bool {
        a < self.domain && (self.predicate)(a, data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverOutcome {
    pub found_index: usize,
    /// Exact predicate at the measured index.
    pub predicate_value: bool,
    pub iterations_used: u64,
    pub votes: usize,
}

/// `floor(pi/4 sqrt(M/t))`, at least 1.
pub fn optimal_iterations(m: usize, t: usize) -> Result<u64> {
    if t == 0 {
        return Err(Error::InvalidParameter(
            "no targets: use the doubling schedule".into(),
        ));
    }
    if t > m {
        return Err(Error::InvalidParameter(format!("{t} targets in a domain of {m}")));
    }
    let k = (std::f64::consts::FRAC_PI_4 * (m as f64 / t as f64).sqrt()).floor() as u64;
    Ok(k.max(1))
}

/// Smallest odd vote count whose majority error is at most
/// `1 / (10 * iterations)`, capped at [`MAX_VOTES`].
pub fn votes_for(error: f64, iterations: u64) -> usize {
    if error <= 0.0 {
        return 1;
    }
    let budget = 1.0 / (10.0 * iterations.max(1) as f64);
    (1..=MAX_VOTES)
        .step_by(2)
        .find(|&v| majority_failure(v, error) <= budget)
        .unwrap_or(MAX_VOTES)
}

/// Repetitions of the doubling schedule on a `w`-qubit index:
/// `2^j` iterations for `j = 0..=ceil(w/2)`.
pub fn bbht_repetitions(w: usize) -> usize {
    w.div_ceil(2) + 1
}

/// Copies of the search state provisioned for one doubling schedule:
/// `w` copies, raised where the schedule itself is longer (`w <= 2`).
pub fn schedule_copies(w: usize) -> usize {
    w.max(bbht_repetitions(w)).max(1)
}

/// Applies `iterations` rounds of (oracle, diffusion) without measuring.
pub fn amplify(
    state: &mut CopyState,
    oracle: &OracleSpec,
    iterations: u64,
    votes: usize,
    ctx: &mut RunContext,
) -> Result<()> {
    let padded = state.padded();
    let flip_prob: Vec<f64> = if oracle.errors.is_empty() {
        Vec::new()
    } else {
        (0..padded)
            .map(|i| oracle.errors.get(i).map_or(0.0, |&e| majority_failure(votes, e)))
            .collect()
    };
    let w = state.index_width() as u64;
    let mut flips = vec![false; if flip_prob.is_empty() { 0 } else { padded }];
    for _ in 0..iterations {
        for (flip, &e) in flips.iter_mut().zip(&flip_prob) {
            *flip = e > 0.0 && ctx.rng.gen::<f64>() < e;
        }
        let marked = |a: usize, data: &[u64]| {
            oracle.evaluate(a, data) ^ flips.get(a).copied().unwrap_or(false)
        };
        state.phase_oracle(&marked)?;
        ctx.record("oracle", state);
        state.diffusion();
        ctx.record("diffusion", state);

        let votes = votes as u64;
        let ledger = &mut ctx.ledger;
        ledger.charge(CostKind::GroverIterations, 1);
        ledger.charge(CostKind::Diffusion, w);
        ledger.charge(CostKind::OracleQuery, votes);
        ledger.charge(CostKind::HashEval, votes * oracle.evaluation_cost);
        ledger.charge(CostKind::InnerGroverIterations, votes * oracle.inner_iterations);
    }
    Ok(())
}

/// Measures the index and evaluates the exact predicate there, reading the
/// bound data back from the collapsed state.
fn measure_and_verify(
    state: &mut CopyState,
    oracle: &OracleSpec,
    iterations: u64,
    votes: usize,
    ctx: &mut RunContext,
) -> Result<GroverOutcome> {
    let found_index = state.measure_index(&mut ctx.rng);
    ctx.record("measure", state);
    ctx.capture(state);
    let data = state.access(found_index)?;
    Ok(GroverOutcome {
        found_index,
        predicate_value: oracle.evaluate(found_index, &data),
        iterations_used: iterations,
        votes,
    })
}

/// Fixed-iteration Grover followed by measurement. Vote count follows
/// [`votes_for`] (1 for exact oracles).
pub fn grover_run(
    state: &mut CopyState,
    oracle: &OracleSpec,
    iterations: u64,
    ctx: &mut RunContext,
) -> Result<GroverOutcome> {
    bounded_error_search(state, oracle, iterations, None, ctx)
}

/// Grover with a majority-voted oracle; `votes` overrides the automatic
/// choice and must be odd.
pub fn bounded_error_search(
    state: &mut CopyState,
    oracle: &OracleSpec,
    iterations: u64,
    votes: Option<usize>,
    ctx: &mut RunContext,
) -> Result<GroverOutcome> {
    let votes = match votes {
        Some(v) if v % 2 == 0 || v == 0 => {
            return Err(Error::InvalidParameter(format!("vote count {v} must be odd")))
        }
        Some(v) => v,
        None => votes_for(oracle.error_prob(), iterations),
    };
    ctx.record("prepare", state);
    amplify(state, oracle, iterations, votes, ctx)?;
    measure_and_verify(state, oracle, iterations, votes, ctx)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// First verified index, if any repetition produced one.
    pub found: Option<usize>,
    /// Measured index of every repetition, in order.
    pub measurements: Vec<usize>,
    pub repetitions: usize,
    pub iterations: u64,
}

/// The doubling schedule: one fresh copy per repetition, stopping at the
/// first verified outcome.
pub fn bbht_search(
    factory: &mut StateFactory,
    oracle: &OracleSpec,
    ctx: &mut RunContext,
) -> Result<SearchOutcome> {
    let w = factory.spec().index_width();
    let mut out = SearchOutcome {
        found: None,
        measurements: Vec::new(),
        repetitions: 0,
        iterations: 0,
    };
    for j in 0..bbht_repetitions(w) {
        let mut state = factory.next_copy()?;
        let iterations = 1u64 << j;
        let run = grover_run(&mut state, oracle, iterations, ctx)?;
        out.repetitions += 1;
        out.iterations += iterations;
        out.measurements.push(run.found_index);
        if run.predicate_value {
            out.found = Some(run.found_index);
            break;
        }
    }
    Ok(out)
}

/// Starting threshold for minimum finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// A uniformly random index of the domain.
    Random,
    /// A key no real index is assumed to reach; the result index stays
    /// `None` until some phase finds an element below it.
    Sentinel((u64, u64)),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimumOutcome {
    pub index: Option<usize>,
    pub key: (u64, u64),
    /// Phases run, including a final one that found nothing.
    pub phases: usize,
    pub iterations: u64,
    pub copies_used: usize,
    /// `(key, index)` held after each phase.
    pub history: Vec<((u64, u64), Option<usize>)>,
}

/// Phase cutoff: three times `max(1, ceil(log2 M))`.
pub fn durr_hoyer_phase_limit(m: usize) -> usize {
    3 * ceil_log2(m as u64).max(1)
}

/// Copies a full minimum search may consume.
pub fn durr_hoyer_copies(m: usize) -> usize {
    durr_hoyer_phase_limit(m) * schedule_copies(ceil_log2(m as u64))
}

/// Minimum of `key` over `[0, M)` by threshold descent. Keys are compared
/// lexicographically; callers put the index in the second component to
/// break ties.
pub fn durr_hoyer_min(
    factory: &mut StateFactory,
    key: &KeyFn,
    start: Threshold,
    ctx: &mut RunContext,
) -> Result<MinimumOutcome> {
    let m = factory.spec().domain();
    let (mut best_key, mut best) = match start {
        Threshold::Random => {
            let y = ctx.rng.gen_range(0..m);
            (key(y, &factory.spec().data(y)), Some(y))
        }
        Threshold::Sentinel(k) => (k, None),
    };
    let mut out = MinimumOutcome {
        index: best,
        key: best_key,
        phases: 0,
        iterations: 0,
        copies_used: 0,
        history: Vec::new(),
    };
    let used_before = factory.used();
    for phase in 0..durr_hoyer_phase_limit(m) {
        ctx.ledger.begin_phase(format!("phase {phase}"));
        let threshold = best_key;
        let oracle = OracleSpec::new(m, move |a, data| key(a, data) < threshold);
        let search = bbht_search(factory, &oracle, ctx)?;
        out.phases += 1;
        out.iterations += search.iterations;
        match search.found {
            Some(j) => {
                best = Some(j);
                best_key = key(j, &factory.spec().data(j));
                out.history.push((best_key, best));
            }
            None => {
                out.history.push((best_key, best));
                break;
            }
        }
    }
    out.index = best;
    out.key = best_key;
    out.copies_used = factory.used() - used_before;
    Ok(out)
}

/// Index of the minimum of `values` (ties to the smaller index).
pub fn min_find(values: &[u64], ctx: &mut RunContext) -> Result<MinimumOutcome> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("no values to minimise".into()));
    }
    let w = ceil_log2(values.len() as u64);
    let width = ceil_log2(values.iter().max().copied().unwrap_or(0) + 2).max(1);
    let mut table = values.to_vec();
    table.resize(1 << w, 0);
    let spec = CopySpec::new(values.len(), vec![Binding::new("value", width, table)])?;
    let mut factory = StateFactory::new(spec, ctx.backend, durr_hoyer_copies(values.len()));
    durr_hoyer_min(&mut factory, &|a, data| (data[0], a as u64), Threshold::Random, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_probability(m: usize, t: usize, j: u64) -> f64 {
        let theta = ((t as f64) / (m as f64)).sqrt().asin();
        ((2 * j + 1) as f64 * theta).sin().powi(2)
    }

    fn success_after(m: usize, targets: &[usize], j: u64, backend: Backend) -> f64 {
        let spec = CopySpec::new(m, vec![]).unwrap();
        let mut state = spec.prepare(backend).unwrap();
        let oracle = OracleSpec::new(m, |a, _| targets.contains(&a));
        let mut ctx = RunContext::new(backend, 0);
        amplify(&mut state, &oracle, j, 1, &mut ctx).unwrap();
        let probs = state.index_probabilities();
        targets.iter().map(|&t| probs[t]).sum()
    }

    #[test]
    fn optimal_iterations_examples() {
        assert_eq!(optimal_iterations(4, 1).unwrap(), 1);
        assert_eq!(optimal_iterations(1, 1).unwrap(), 1);
        assert_eq!(optimal_iterations(1024, 1).unwrap(), 25);
        assert!(optimal_iterations(4, 0).is_err());
        assert!(optimal_iterations(4, 5).is_err());
    }

    #[test]
    fn amplitude_success_matches_closed_form() {
        assert!((success_after(4, &[2], 1, Backend::Dense) - 1.0).abs() < 1e-9);
        let p = success_after(16, &[9], 3, Backend::Dense);
        assert!((p - exact_probability(16, 1, 3)).abs() < 1e-9);
        for m in [4, 8, 16] {
            for t in 1..=4.min(m) {
                let targets: Vec<usize> = (0..t).map(|i| (i * 5 + 1) % m).collect();
                for j in 0..=10 {
                    let want = exact_probability(m, t, j);
                    for backend in [Backend::Dense, Backend::Structured] {
                        let got = success_after(m, &targets, j, backend);
                        assert!((got - want).abs() < 1e-9, "M={m} t={t} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn zero_iterations_is_uniform() {
        let spec = CopySpec::new(8, vec![]).unwrap();
        let state = spec.prepare(Backend::Dense).unwrap();
        assert!(state.index_probabilities().iter().all(|p| (p - 0.125).abs() < 1e-12));
    }

    #[test]
    fn votes_for_budget() {
        assert_eq!(votes_for(0.0, 100), 1);
        assert_eq!(votes_for(0.01, 1), 1);
        for (e, iters) in [(0.1, 1u64), (0.1, 8), (0.25, 64), (0.135, 1000)] {
            let v = votes_for(e, iters);
            assert!(v % 2 == 1);
            assert!(majority_failure(v, e) <= 1.0 / (10.0 * iters as f64));
            assert!(v == 1 || majority_failure(v - 2, e) > 1.0 / (10.0 * iters as f64));
        }
        // unreachable budgets saturate at the counter capacity
        assert_eq!(votes_for(0.45, 1_000_000), MAX_VOTES);
    }

    #[test]
    fn schedule_shapes() {
        assert_eq!(schedule_copies(0), 1);
        assert_eq!(schedule_copies(1), 2);
        assert_eq!(schedule_copies(2), 2);
        assert_eq!(schedule_copies(3), 3);
        assert_eq!(schedule_copies(10), 10);
        for w in 0..20 {
            assert!(bbht_repetitions(w) <= schedule_copies(w));
        }
    }

    fn bbht_trials(m: usize, targets: &[usize], trials: u64) -> (usize, Vec<Option<usize>>) {
        let spec = CopySpec::new(m, vec![]).unwrap();
        let w = spec.index_width();
        let mut found = Vec::new();
        let mut hits = 0;
        for seed in 0..trials {
            let mut ctx = RunContext::new(Backend::Structured, seed);
            let mut factory = StateFactory::new(spec.clone(), Backend::Structured, schedule_copies(w));
            let oracle = OracleSpec::new(m, |a, _| targets.contains(&a));
            let out = bbht_search(&mut factory, &oracle, &mut ctx).unwrap();
            hits += usize::from(out.found.is_some());
            found.push(out.found);
        }
        (hits, found)
    }

    #[test]
    fn bbht_examples() {
        let (hits, found) = bbht_trials(8, &[5], 2000);
        assert!(hits as f64 / 2000.0 >= 0.5, "{hits}");
        assert!(found.iter().flatten().all(|&f| f == 5));

        let (hits, _) = bbht_trials(8, &[], 200);
        assert_eq!(hits, 0);

        let (_, found) = bbht_trials(8, &[1, 4, 6], 500);
        assert!(found.iter().flatten().all(|f| [1, 4, 6].contains(f)));
    }

    #[test]
    fn padding_is_never_verified() {
        // domain 5 padded to 8; a predicate that would accept everything
        let (hits, found) = {
            let spec = CopySpec::new(5, vec![]).unwrap();
            let mut hits = 0;
            let mut found = Vec::new();
            for seed in 0..300 {
                let mut ctx = RunContext::new(Backend::Structured, seed);
                let mut factory = StateFactory::new(spec.clone(), Backend::Structured, 3);
                let oracle = OracleSpec::new(5, |_, _| true);
                let out = bbht_search(&mut factory, &oracle, &mut ctx).unwrap();
                hits += usize::from(out.found.is_some());
                found.extend(out.found);
            }
            (hits, found)
        };
        assert!(hits > 0);
        assert!(found.iter().all(|&f| f < 5));
    }

    #[test]
    fn exhausted_factory_is_an_error() {
        let spec = CopySpec::new(64, vec![]).unwrap();
        let mut factory = StateFactory::new(spec, Backend::Structured, 1);
        let oracle = OracleSpec::new(64, |_, _| false);
        let mut ctx = RunContext::new(Backend::Structured, 1);
        assert!(matches!(
            bbht_search(&mut factory, &oracle, &mut ctx),
            Err(Error::StateExhausted(1))
        ));
    }

    #[test]
    fn exact_oracle_consumes_no_extra_randomness() {
        let spec = CopySpec::new(16, vec![]).unwrap();
        let oracle = OracleSpec::new(16, |a, _| a == 3);
        let noisy = OracleSpec::new(16, |a, _| a == 3).with_errors(vec![0.0; 16]).unwrap();
        let run = |o: &OracleSpec| {
            let mut ctx = RunContext::new(Backend::Structured, 11);
            let mut s = spec.prepare(Backend::Structured).unwrap();
            let out = bounded_error_search(&mut s, o, 3, None, &mut ctx).unwrap();
            (out, ctx.rng.gen::<u64>())
        };
        assert_eq!(run(&oracle), run(&noisy));
        let mut ctx = RunContext::new(Backend::Structured, 11);
        let mut s = spec.prepare(Backend::Structured).unwrap();
        assert_eq!(grover_run(&mut s, &oracle, 3, &mut ctx).unwrap(), run(&oracle).0);
    }

    #[test]
    fn bounded_error_close_to_exact() {
        let spec = CopySpec::new(8, vec![]).unwrap();
        let exact = exact_probability(8, 1, 2);
        let noisy = OracleSpec::new(8, |a, _| a == 6).with_errors(vec![0.1; 8]).unwrap();
        let trials = 2000;
        let mut hits = 0;
        for seed in 0..trials {
            let mut ctx = RunContext::new(Backend::Structured, seed);
            let mut s = spec.prepare(Backend::Structured).unwrap();
            let out = bounded_error_search(&mut s, &noisy, 2, Some(5), &mut ctx).unwrap();
            hits += usize::from(out.predicate_value);
        }
        let rate = hits as f64 / trials as f64;
        assert!((rate - exact).abs() <= 0.1, "{rate} vs {exact}");
    }

    #[test]
    fn ledger_scales_with_votes() {
        let spec = CopySpec::new(8, vec![]).unwrap();
        let oracle = OracleSpec::new(8, |a, _| a == 6)
            .with_cost(7, 2)
            .with_errors(vec![0.1; 8])
            .unwrap();
        let mut ctx = RunContext::new(Backend::Structured, 1);
        let mut s = spec.prepare(Backend::Structured).unwrap();
        bounded_error_search(&mut s, &oracle, 2, Some(5), &mut ctx).unwrap();
        let t = ctx.ledger.totals();
        assert_eq!(t.oracle_queries, 10);
        assert_eq!(t.hash_eval_units, 70);
        assert_eq!(t.inner_grover_iterations, 20);
        assert_eq!(t.diffusion_units, 6);
        assert_eq!(t.grover_iterations, 2);
        assert!(bounded_error_search(&mut s, &oracle, 1, Some(4), &mut ctx).is_err());
    }

    fn min_rate(values: &[u64], trials: u64) -> f64 {
        let want = (0..values.len()).min_by_key(|&i| (values[i], i)).unwrap();
        let hits = (0..trials)
            .filter(|&seed| {
                let mut ctx = RunContext::new(Backend::Structured, seed);
                min_find(values, &mut ctx).unwrap().index == Some(want)
            })
            .count();
        hits as f64 / trials as f64
    }

    #[test]
    fn durr_hoyer_examples() {
        assert!(min_rate(&[3, 1, 2], 1000) >= 0.5);
        assert!(min_rate(&[0, 1, 2, 3, 4, 5, 6, 7], 1000) >= 0.5);
    }

    #[test]
    fn durr_hoyer_equal_keys() {
        for seed in 0..50 {
            let mut ctx = RunContext::new(Backend::Structured, seed);
            let out = min_find(&[4, 4, 4, 4, 4], &mut ctx).unwrap();
            assert!(out.index.is_some());
            // tie-break on index: improvements only ever move to smaller indices
            let idx: Vec<usize> = out.history.iter().filter_map(|h| h.1).collect();
            assert!(idx.windows(2).all(|w| w[1] <= w[0]));
            assert!(out.phases <= durr_hoyer_phase_limit(5));
        }
    }

    #[test]
    fn durr_hoyer_keys_never_increase() {
        for seed in 0..100 {
            let mut ctx = RunContext::new(Backend::Structured, seed);
            let out = min_find(&[9, 3, 7, 1, 8, 2, 6, 5, 4, 0, 11], &mut ctx).unwrap();
            assert!(out.history.windows(2).all(|w| w[1].0 <= w[0].0));
            assert!(out.copies_used <= durr_hoyer_copies(11));
        }
    }
}
