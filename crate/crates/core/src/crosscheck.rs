//! Dense-versus-structured equivalence battery.
//!
//! Each instance runs once per backend from the same seed with step tracing
//! on. The traces must have the same steps with index amplitudes equal
//! within [`TOLERANCE`] (the dense side also has to stay on the bound
//! manifold), and the ledgers and results must be identical.

use std::fmt;

use num_complex::Complex64;

use crate::error::Result;
use crate::fingerprint::HashParams;
use crate::grover::{RunContext, Snapshot};
use crate::math::ceil_log2;
use crate::qcompare::{compare_bsearch, compare_grover};
use crate::qmatch::{match_search, match_unique};
use crate::sim::Backend;
use crate::strings::{BitString, MatchInstance};

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    MatchUnique,
    MatchSearch,
    CompareGrover,
    CompareBsearch,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::MatchUnique => "match_unique",
            Algorithm::MatchSearch => "match_search",
            Algorithm::CompareGrover => "compare_grover",
            Algorithm::CompareBsearch => "compare_bsearch",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossInstance {
    pub algorithm: Algorithm,
    /// Text and pattern, or `u` and `v`.
    pub first: BitString,
    pub second: BitString,
    pub prime: u64,
}

impl CrossInstance {
    fn new(algorithm: Algorithm, first: &str, second: &str, prime: u64) -> Self {
        CrossInstance {
            algorithm,
            first: first.parse().expect("battery strings are binary"),
            second: second.parse().expect("battery strings are binary"),
            prime,
        }
    }

    pub fn name(&self) -> String {
        format!("{}({},{},p={})", self.algorithm, self.first, self.second, self.prime)
    }

    /// Widest state the dense backend holds at once.
    pub fn dense_width(&self) -> usize {
        let hash = ceil_log2(self.prime);
        let inner = ceil_log2(hash.max(1) as u64) + 2 + 1;
        let (n, m) = (self.first.len(), self.second.len());
        let outer = match self.algorithm {
            Algorithm::MatchUnique | Algorithm::MatchSearch => {
                ceil_log2((n - m + 1) as u64) + hash + 1
            }
            Algorithm::CompareGrover => ceil_log2(n.min(m) as u64) + 2 + 1,
            Algorithm::CompareBsearch => ceil_log2(n.min(m) as u64) + 2 * hash + 1,
        };
        outer.max(inner)
    }
}

/// The fixed battery: matching with `n <= 8, m <= 3, p <= 13` and
/// comparisons with `k <= 8`.
pub fn battery() -> Vec<CrossInstance> {
    use Algorithm::*;
    let matching = [
        ("010101", "010", 13),
        ("0010", "1", 5),
        ("10110100", "101", 11),
        ("00000000", "11", 7),
        ("11011", "011", 13),
        ("101", "101", 3),
        ("01101001", "10", 13),
    ];
    let comparing = [
        ("101", "111", 7),
        ("0110", "0100", 13),
        ("10110", "10110", 11),
        ("01", "011", 5),
        ("11010011", "11010010", 13),
        ("0001", "1000", 7),
        ("1", "0", 3),
    ];
    let mut out = Vec::new();
    for (s, w, p) in matching {
        out.push(CrossInstance::new(MatchUnique, s, w, p));
        out.push(CrossInstance::new(MatchSearch, s, w, p));
    }
    for (u, v, p) in comparing {
        out.push(CrossInstance::new(CompareGrover, u, v, p));
        out.push(CrossInstance::new(CompareBsearch, u, v, p));
    }
    out
}

/// A deliberate perturbation of the structured trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fault {
    pub step: usize,
    pub basis: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceReport {
    pub name: String,
    pub dense_width: usize,
    /// Reason the instance was not run.
    pub skipped: Option<String>,
    pub steps: usize,
    pub max_deviation: f64,
    /// `(step, basis index)` of the largest deviation.
    pub worst: Option<(usize, usize)>,
    pub traces_aligned: bool,
    pub ledgers_equal: bool,
    pub results_equal: bool,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.skipped.is_some()
            || (self.traces_aligned
                && self.ledgers_equal
                && self.results_equal
                && self.max_deviation < TOLERANCE)
    }
}

impl fmt::Display for InstanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(reason) = &self.skipped {
            return write!(f, "SKIP {} ({reason})", self.name);
        }
        write!(
            f,
            "{} {} width={} steps={} max_dev={:.3e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.dense_width,
            self.steps,
            self.max_deviation
        )?;
        if !self.passed() {
            if let Some((step, basis)) = self.worst {
                write!(f, " worst_step={step} worst_basis={basis}")?;
            }
            if !self.traces_aligned {
                write!(f, " traces-misaligned")?;
            }
            if !self.ledgers_equal {
                write!(f, " ledgers-differ")?;
            }
            if !self.results_equal {
                write!(f, " results-differ")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    pub instances: Vec<InstanceReport>,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(InstanceReport::passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.instances
            .iter()
            .map(|r| r.max_deviation)
            .fold(0.0, f64::max)
    }
}

/// Result fields that must coincide across backends.
type Outcome = (Vec<i64>, crate::resources::ResourceLedger);

fn run(inst: &CrossInstance, backend: Backend, seed: u64) -> Result<(Outcome, Vec<Snapshot>)> {
    let mut ctx = RunContext::new(backend, seed).with_trace();
    let params = HashParams::with_prime(inst.prime)?;
    let opt = |x: Option<usize>| x.map_or(-1, |d| d as i64);
    let (fields, ledger) = match inst.algorithm {
        Algorithm::MatchUnique | Algorithm::MatchSearch => {
            let mi = MatchInstance::new(inst.first.clone(), inst.second.clone())?;
            let r = if inst.algorithm == Algorithm::MatchUnique {
                match_unique(&mi, &params, &mut ctx)?
            } else {
                match_search(&mi, &params, &mut ctx)?
            };
            let fields = vec![
                opt(r.position),
                opt(r.measured),
                i64::from(r.hash_verified),
                r.copies_used as i64,
                r.qubits as i64,
            ];
            (fields, r.ledger)
        }
        Algorithm::CompareGrover | Algorithm::CompareBsearch => {
            let r = if inst.algorithm == Algorithm::CompareGrover {
                compare_grover(&inst.first, &inst.second, &mut ctx)?
            } else {
                compare_bsearch(&inst.first, &inst.second, &params, &mut ctx)?
            };
            let fields = vec![
                i64::from(r.verdict),
                opt(r.a0),
                r.phases as i64,
                r.comparisons as i64,
                r.copies_used as i64,
                r.qubits as i64,
            ];
            (fields, r.ledger)
        }
    };
    Ok(((fields, ledger), ctx.trace.unwrap_or_default()))
}

fn inject(trace: &mut [Snapshot], fault: Fault) {
    if let Some(snap) = trace.get_mut(fault.step) {
        if let Some(a) = snap.amplitudes.get_mut(fault.basis) {
            *a += Complex64::new(fault.delta, 0.0);
        }
    }
}

/// Runs one instance in both backends and compares them.
pub fn run_instance(
    inst: &CrossInstance,
    seed: u64,
    max_width: usize,
    fault: Option<Fault>,
) -> Result<InstanceReport> {
    let mut report = InstanceReport {
        name: inst.name(),
        dense_width: inst.dense_width(),
        skipped: None,
        steps: 0,
        max_deviation: 0.0,
        worst: None,
        traces_aligned: true,
        ledgers_equal: true,
        results_equal: true,
    };
    if report.dense_width > max_width {
        report.skipped = Some(format!(
            "dense width {} exceeds {max_width}",
            report.dense_width
        ));
        return Ok(report);
    }
    let (dense_out, dense) = run(inst, Backend::Dense, seed)?;
    let (structured_out, mut structured) = run(inst, Backend::Structured, seed)?;
    if let Some(fault) = fault {
        inject(&mut structured, fault);
    }
    report.steps = structured.len();
    report.traces_aligned = dense.len() == structured.len()
        && dense
            .iter()
            .zip(&structured)
            .all(|(d, s)| d.label == s.label && d.amplitudes.len() == s.amplitudes.len());
    for (step, (d, s)) in dense.iter().zip(&structured).enumerate() {
        if d.residual > report.max_deviation {
            report.max_deviation = d.residual;
            report.worst = Some((step, 0));
        }
        for (basis, (x, y)) in d.amplitudes.iter().zip(&s.amplitudes).enumerate() {
            let dev = (x - y).norm();
            if dev > report.max_deviation {
                report.max_deviation = dev;
                report.worst = Some((step, basis));
            }
        }
    }
    report.results_equal = dense_out.0 == structured_out.0;
    report.ledgers_equal = dense_out.1 == structured_out.1;
    Ok(report)
}

/// The whole battery under one seed.
pub fn crosscheck(max_width: usize, seed: u64) -> Result<CrosscheckReport> {
    let instances = battery()
        .iter()
        .map(|inst| run_instance(inst, seed, max_width, None))
        .collect::<Result<Vec<_>>>()?;
    Ok(CrosscheckReport { instances })
}
