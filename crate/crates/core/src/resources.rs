//! Qubit and gate-unit accounting, closed-form qubit counts, and the
//! scaling sweep harness.
//!
//! Cost model, in abstract gate units:
//! * a diffusion over a `q`-qubit index register costs `q`;
//! * an oracle query costs one unit plus its evaluation cost (both scaled by
//!   the number of majority votes);
//! * an element access over a `q`-qubit index costs `q`.
//!
//! State preparation is not charged.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fingerprint::{nth_prime, universe_size};
use crate::grover::{schedule_copies, RunContext};
use crate::math::{ceil_log2, fit_through_origin, log_log_slope};
use crate::montecarlo::run_trials;
use crate::qcompare::{compare_bsearch, compare_grover, compare_params, qubit_count_compare_bsearch_width};
use crate::qmatch::{match_params, match_qubits, match_search};
use crate::sim::Backend;
use crate::strings::{compare_classical, naive_match_all, verdict, BitString, MatchInstance};

pub use crate::qcompare::qubit_count_compare_grover;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostKind {
    Diffusion,
    OracleQuery,
    InnerGroverIterations,
    Access,
    HashEval,
    /// Outer Grover iterations; informational, not part of the gate total.
    GroverIterations,
}

impl CostKind {
    pub const ALL: [CostKind; 6] = [
        CostKind::Diffusion,
        CostKind::OracleQuery,
        CostKind::InnerGroverIterations,
        CostKind::Access,
        CostKind::HashEval,
        CostKind::GroverIterations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostKind::Diffusion => "diffusion",
            CostKind::OracleQuery => "oracle_query",
            CostKind::InnerGroverIterations => "inner_grover_iterations",
            CostKind::Access => "access",
            CostKind::HashEval => "hash_eval",
            CostKind::GroverIterations => "grover_iterations",
        }
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownCostKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Counters {
    pub diffusion_units: u64,
    pub oracle_queries: u64,
    pub inner_grover_iterations: u64,
    pub access_units: u64,
    pub hash_eval_units: u64,
    pub grover_iterations: u64,
}

impl Counters {
    fn slot(&mut self, kind: CostKind) -> &mut u64 {
        match kind {
            CostKind::Diffusion => &mut self.diffusion_units,
            CostKind::OracleQuery => &mut self.oracle_queries,
            CostKind::InnerGroverIterations => &mut self.inner_grover_iterations,
            CostKind::Access => &mut self.access_units,
            CostKind::HashEval => &mut self.hash_eval_units,
            CostKind::GroverIterations => &mut self.grover_iterations,
        }
    }

    pub fn get(&self, kind: CostKind) -> u64 {
        let mut copy = *self;
        *copy.slot(kind)
    }

    pub fn gate_units_total(&self) -> u64 {
        self.diffusion_units + self.oracle_queries + self.access_units + self.hash_eval_units
    }

    pub fn add(&mut self, other: &Counters) {
        for kind in CostKind::ALL {
            *self.slot(kind) += other.get(kind);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCost {
    pub label: String,
    pub counters: Counters,
}

/// Costs of one algorithm run. Counters only ever grow.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResourceLedger {
    qubits: u64,
    totals: Counters,
    phases: Vec<PhaseCost>,
}

impl ResourceLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn qubits(&self) -> u64 {
        self.qubits
    }

    pub fn set_qubits(&mut self, qubits: u64) {
        self.qubits = qubits;
    }

    pub fn totals(&self) -> &Counters {
        &self.totals
    }

    pub fn phases(&self) -> &[PhaseCost] {
        &self.phases
    }

    pub fn gate_units_total(&self) -> u64 {
        self.totals.gate_units_total()
    }

    /// Later charges are also attributed to a phase named `label`.
    pub fn begin_phase(&mut self, label: impl Into<String>) {
        self.phases.push(PhaseCost {
            label: label.into(),
            counters: Counters::default(),
        });
    }

    pub fn charge(&mut self, kind: CostKind, amount: u64) {
        *self.totals.slot(kind) += amount;
        if let Some(phase) = self.phases.last_mut() {
            *phase.counters.slot(kind) += amount;
        }
    }

    /// `charge` by counter name.
    pub fn charge_named(&mut self, kind: &str, amount: u64) -> Result<()> {
        self.charge(kind.parse()?, amount);
        Ok(())
    }
}

/// Bit-exact header of the sweep CSV.
pub const CSV_HEADER: &str = "algo,n,m,k,epsilon,seed,trials,success_rate,qubits,diffusion_units,oracle_queries,inner_grover_iterations,access_units,hash_eval_units,gate_units_total";

/// Matching qubits for `match_search` on an `n`-bit text and `m`-bit
/// pattern; hash registers are sized for the largest prime of the universe
/// `delta = N`, `max_len = m`.
pub fn qubit_count_match(n: usize, m: usize, epsilon: f64) -> Result<u64> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("need 1 <= m <= n, got m={m} n={n}")));
    }
    let windows = n - m + 1;
    let r = universe_size(windows as u64, m, epsilon)?;
    let hash_width = ceil_log2(nth_prime(r)?);
    let w = ceil_log2(windows as u64);
    Ok(match_qubits(w, hash_width, schedule_copies(w)))
}

/// Binary-search comparator qubits for common length `k`.
pub fn qubit_count_compare_bsearch(k: usize, epsilon: f64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let r = universe_size(k as u64, k, epsilon)?;
    let hash_width = ceil_log2(nth_prime(r)?);
    Ok(qubit_count_compare_bsearch_width(k, hash_width))
}

/// A random text of length `n` containing the random `m`-bit pattern at
/// exactly `occurrences` positions.
pub fn planted_match_instance<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    occurrences: usize,
    rng: &mut R,
) -> Result<MatchInstance> {
    if m == 0 || m > n || occurrences * m > n {
        return Err(Error::InvalidParameter(format!(
            "cannot plant {occurrences} disjoint copies of length {m} in {n} bits"
        )));
    }
    for _ in 0..10_000 {
        let pattern: Vec<u8> = (0..m).map(|_| rng.gen_range(0..=1)).collect();
        // text avoiding the pattern: a bit completing an occurrence is flipped
        let mut text: Vec<u8> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut b = rng.gen_range(0..=1u8);
            if text.len() + 1 >= m {
                let tail = &text[text.len() + 1 - m..];
                if tail == &pattern[..m - 1] && b == pattern[m - 1] {
                    b ^= 1;
                }
            }
            text.push(b);
        }
        let mut starts: Vec<usize> = Vec::new();
        let mut attempts = 0;
        while starts.len() < occurrences && attempts < 1000 {
            attempts += 1;
            let d = rng.gen_range(0..=n - m);
            if starts.iter().all(|&s| d + m <= s || s + m <= d) {
                starts.push(d);
            }
        }
        for &d in &starts {
            text[d..d + m].copy_from_slice(&pattern);
        }
        let inst = MatchInstance::new(BitString::new(text)?, BitString::new(pattern)?)?;
        if naive_match_all(&inst).len() == occurrences {
            return Ok(inst);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no instance with {occurrences} occurrences found for n={n} m={m}"
    )))
}

/// `u` random of length `k`; `v` equal to `u` up to a random position,
/// flipped there, random afterwards.
pub fn random_compare_pair<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (BitString, BitString) {
    let u: Vec<u8> = (0..k).map(|_| rng.gen_range(0..=1)).collect();
    let mut v = u.clone();
    let pos = rng.gen_range(0..k);
    v[pos] ^= 1;
    for b in v.iter_mut().skip(pos + 1) {
        *b = rng.gen_range(0..=1);
    }
    (
        BitString::new(u).expect("binary"),
        BitString::new(v).expect("binary"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAlgo {
    Match,
    CompareGrover,
    CompareBsearch,
}

impl SweepAlgo {
    pub fn name(self) -> &'static str {
        match self {
            SweepAlgo::Match => "match",
            SweepAlgo::CompareGrover => "compare_grover",
            SweepAlgo::CompareBsearch => "compare_bsearch",
        }
    }
}

impl FromStr for SweepAlgo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "match" => Ok(SweepAlgo::Match),
            "compare_grover" | "compare-grover" | "grover" => Ok(SweepAlgo::CompareGrover),
            "compare_bsearch" | "compare-bsearch" | "bsearch" => Ok(SweepAlgo::CompareBsearch),
            other => Err(Error::InvalidParameter(format!("unknown sweep algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub algo: SweepAlgo,
    /// Text lengths `n` (matching) or common lengths `k` (comparison).
    pub grid: Vec<usize>,
    /// Pattern length for matching.
    pub m: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub backend: Backend,
    pub jobs: Option<usize>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("sweep grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.algo == SweepAlgo::Match && self.grid.iter().any(|&n| n < self.m || self.m == 0) {
            return Err(Error::InvalidParameter("every n must be at least m >= 1".into()));
        }
        if self.grid.contains(&0) {
            return Err(Error::InvalidParameter("grid sizes must be positive".into()));
        }
        Ok(())
    }
}

/// Mean costs over the trials of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub algo: SweepAlgo,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub epsilon: f64,
    pub seed: u64,
    pub trials: u64,
    pub success_rate: f64,
    pub qubits: u64,
    /// Closed-form count for the point; equals `qubits` by construction
    /// unless a layout disagrees with its formula.
    pub qubits_formula: u64,
    pub diffusion_units: f64,
    pub oracle_queries: f64,
    pub inner_grover_iterations: f64,
    pub access_units: f64,
    pub hash_eval_units: f64,
    pub gate_units_total: f64,
    /// Mean outer Grover iterations.
    pub grover_iterations: f64,
}

struct Trial {
    success: bool,
    qubits: u64,
    counters: Counters,
}

fn run_trial(config: &SweepConfig, size: usize, seed: u64) -> Result<Trial> {
    let mut ctx = RunContext::new(config.backend, seed);
    match config.algo {
        SweepAlgo::Match => {
            let inst = planted_match_instance(size, config.m, 1, &mut ctx.rng)?;
            let params = match_params(&inst, config.epsilon, &mut ctx.rng)?;
            let r = match_search(&inst, &params, &mut ctx)?;
            Ok(Trial {
                success: r.position.is_some(),
                qubits: r.qubits,
                counters: *r.ledger.totals(),
            })
        }
        SweepAlgo::CompareGrover | SweepAlgo::CompareBsearch => {
            let (u, v) = random_compare_pair(size, &mut ctx.rng);
            let expected = verdict(compare_classical(&u, &v));
            let r = if config.algo == SweepAlgo::CompareGrover {
                compare_grover(&u, &v, &mut ctx)?
            } else {
                let params = compare_params(&u, &v, config.epsilon, &mut ctx.rng)?;
                compare_bsearch(&u, &v, &params, &mut ctx)?
            };
            Ok(Trial {
                success: r.verdict == expected,
                qubits: r.qubits,
                counters: *r.ledger.totals(),
            })
        }
    }
}

/// One row per grid point, in grid order. Trials run in parallel with
/// seeds derived from `(seed, point, trial)`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.grid.len());
    for (point, &size) in config.grid.iter().enumerate() {
        let point_seed = crate::montecarlo::trial_seed(config.seed, point as u64);
        let trials = run_trials(point_seed, config.trials, config.jobs, |_, seed| {
            run_trial(config, size, seed)
        })?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let count = trials.len() as f64;
        let mean = |kind: CostKind| trials.iter().map(|t| t.counters.get(kind) as f64).sum::<f64>() / count;
        let qubits = trials[0].qubits;
        if trials.iter().any(|t| t.qubits != qubits) {
            return Err(Error::Layout(format!("qubit count varies across trials at size {size}")));
        }
        let (n, m, k, qubits_formula) = match config.algo {
            SweepAlgo::Match => (
                Some(size),
                Some(config.m),
                None,
                qubit_count_match(size, config.m, config.epsilon)?,
            ),
            SweepAlgo::CompareGrover => (None, None, Some(size), qubit_count_compare_grover(size)),
            SweepAlgo::CompareBsearch => (
                None,
                None,
                Some(size),
                qubit_count_compare_bsearch(size, config.epsilon)?,
            ),
        };
        rows.push(SweepRow {
            algo: config.algo,
            n,
            m,
            k,
            epsilon: config.epsilon,
            seed: config.seed,
            trials: config.trials,
            success_rate: trials.iter().filter(|t| t.success).count() as f64 / count,
            qubits,
            qubits_formula,
            diffusion_units: mean(CostKind::Diffusion),
            oracle_queries: mean(CostKind::OracleQuery),
            inner_grover_iterations: mean(CostKind::InnerGroverIterations),
            access_units: mean(CostKind::Access),
            hash_eval_units: mean(CostKind::HashEval),
            gate_units_total: trials
                .iter()
                .map(|t| t.counters.gate_units_total() as f64)
                .sum::<f64>()
                / count,
            grover_iterations: mean(CostKind::GroverIterations),
        });
    }
    Ok(rows)
}

fn opt(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the header and one line per row.
pub fn write_csv(rows: &[SweepRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.4},{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.2}",
            r.algo.name(),
            opt(r.n),
            opt(r.m),
            opt(r.k),
            r.epsilon,
            r.seed,
            r.trials,
            r.success_rate,
            r.qubits,
            r.diffusion_units,
            r.oracle_queries,
            r.inner_grover_iterations,
            r.access_units,
            r.hash_eval_units,
            r.gate_units_total
        )?;
    }
    Ok(())
}

fn sizes(rows: &[SweepRow]) -> Vec<f64> {
    rows.iter()
        .map(|r| r.n.or(r.k).unwrap_or(0) as f64)
        .collect()
}

/// Log-log slope of mean gate units against the swept size.
pub fn gate_unit_slope(rows: &[SweepRow]) -> f64 {
    let ys: Vec<f64> = rows.iter().map(|r| r.gate_units_total).collect();
    log_log_slope(&sizes(rows), &ys)
}

/// Least-squares `c` in `iterations ~ c sqrt(size)` and the largest relative
/// deviation of a single point's `iterations / sqrt(size)` from it.
pub fn sqrt_fit(sizes: &[f64], iterations: &[f64]) -> (f64, f64) {
    let roots: Vec<f64> = sizes.iter().map(|s| s.sqrt()).collect();
    let c = fit_through_origin(&roots, iterations);
    let spread = roots
        .iter()
        .zip(iterations)
        .map(|(r, y)| (y / r / c - 1.0).abs())
        .fold(0.0, f64::max);
    (c, spread)
}

/// `sqrt_fit` of mean outer iterations over the sweep.
pub fn iteration_fit(rows: &[SweepRow]) -> (f64, f64) {
    let ys: Vec<f64> = rows.iter().map(|r| r.grover_iterations).collect();
    sqrt_fit(&sizes(rows), &ys)
}
