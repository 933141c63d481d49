mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use qstrings::crosscheck::crosscheck;
use qstrings::fingerprint::{choose_prime, nth_prime, universe_size};
use qstrings::grover::{min_find, RunContext};
use qstrings::math::ceil_log2;
use qstrings::montecarlo::run_trials;
use qstrings::qcompare::{compare_bsearch, compare_grover, compare_params};
use qstrings::qmatch::{match_params, match_search, InnerEqualityTest};
use qstrings::resources::{run_sweep, write_csv, SweepAlgo, SweepConfig};
use qstrings::sim::{DenseState, DENSE_QUBIT_CAP};
use qstrings::strings::{compare_classical, verdict};
use qstrings::{Backend, BitString, Error, MatchInstance};

use args::{Cli, Command, Common, CompareAlgo, CompareArgs, MatchArgs, MinFindArgs, PrimesArgs, SweepArgs};

/// Largest text accepted by `match`.
const MAX_TEXT_BITS: usize = 1 << 16;

enum Failure {
    Usage(String),
    Verification(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::StateExhausted(_) | Error::Layout(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T = ()> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Match(a) => run_match(a),
        Command::Compare(a) => run_compare(a),
        Command::MinFind(a) => run_min_find(a),
        Command::Sweep(a) => run_sweep_cmd(a),
        Command::Crosscheck(a) => run_crosscheck(a.max_width, a.seed),
        Command::Primes(a) => run_primes(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) | Err(Failure::Runtime(msg)) => {
            eprintln!("qstrings: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("qstrings: {msg}");
            ExitCode::from(2)
        }
    }
}

/// CSV sink with the flag-echo comment already written.
fn open_output(csv: Option<&Path>) -> CliResult<Box<dyn Write>> {
    let mut out: Box<dyn Write> = match csv {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let flags: Vec<String> = std::env::args().skip(1).collect();
    writeln!(out, "# qstrings {}", flags.join(" "))?;
    Ok(out)
}

fn parse_input(raw: &str, ascii: bool) -> CliResult<BitString> {
    let path = Path::new(raw);
    if ascii {
        let bytes = if path.is_file() {
            std::fs::read(path)?
        } else {
            raw.as_bytes().to_vec()
        };
        return Ok(BitString::from_ascii(&bytes));
    }
    if !raw.is_empty() && raw.bytes().all(|b| b == b'0' || b == b'1') {
        return Ok(raw.parse()?);
    }
    if path.is_file() {
        return Ok(std::fs::read_to_string(path)?.trim().parse()?);
    }
    Err(Failure::Usage(format!(
        "`{raw}` is neither a 0/1 string nor a readable file (use --ascii for text)"
    )))
}

fn check_common(common: &Common) -> CliResult {
    if common.trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if common.jobs == Some(0) {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    if common.dump_state.is_some() && common.mode != args::Mode::Dense {
        return Err(Failure::Usage("--dump-state requires --mode dense".into()));
    }
    Ok(())
}

fn guard_dense(common: &Common, width: usize) -> CliResult {
    if common.mode == args::Mode::Dense && width > DENSE_QUBIT_CAP {
        return Err(Failure::Usage(format!(
            "dense mode would hold a {width}-qubit state, above the {DENSE_QUBIT_CAP}-qubit cap; use --mode structured"
        )));
    }
    Ok(())
}

fn hash_register_width(delta: u64, max_len: usize, epsilon: f64) -> CliResult<usize> {
    let r = universe_size(delta, max_len, epsilon)?;
    Ok(ceil_log2(nth_prime(r)?))
}

/// Widest jointly simulated state for an index of `index_width` qubits
/// with `data` bound qubits and an equality test over `hash` bits.
fn dense_width(index_width: usize, data: usize, hash: usize) -> usize {
    let outer = index_width + data + 1;
    let inner = InnerEqualityTest::new(hash.max(1)).copy_spec(0, 0).dense_width();
    outer.max(inner)
}

fn write_dump(common: &Common, state: Option<DenseState>) -> CliResult {
    if let Some(path) = &common.dump_state {
        let state = state.ok_or_else(|| Failure::Runtime("no dense state was measured".into()))?;
        state.dump(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn context(common: &Common, trial: u64, seed: u64) -> RunContext {
    let ctx = RunContext::new(Backend::from(common.mode), seed);
    if trial == 0 && common.dump_state.is_some() {
        ctx.with_capture()
    } else {
        ctx
    }
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn run_match(a: &MatchArgs) -> CliResult {
    let common = &a.common;
    check_common(common)?;
    let inst = MatchInstance::new(parse_input(&a.text, a.ascii)?, parse_input(&a.pattern, a.ascii)?)?;
    if inst.n() > MAX_TEXT_BITS {
        return Err(Failure::Usage(format!(
            "text has {} bits; at most {MAX_TEXT_BITS} are supported",
            inst.n()
        )));
    }
    let windows = inst.window_count();
    let hash = hash_register_width(windows as u64, inst.m(), common.epsilon)?;
    guard_dense(common, dense_width(ceil_log2(windows as u64), hash, hash))?;

    let rows = run_trials(common.seed, common.trials, common.jobs, |t, seed| {
        let mut ctx = context(common, t, seed);
        let params = match_params(&inst, common.epsilon, &mut ctx.rng)?;
        let result = match_search(&inst, &params, &mut ctx)?;
        Ok::<_, Error>((t, seed, result, ctx.captured))
    })?;
    let mut out = open_output(common.csv.as_deref())?;
    writeln!(out, "trial,seed,result_d,hash_verified,exact_verified,copies_used,qubits,gate_units,inner_iters")?;
    let mut dump = None;
    let mut unsound = Vec::new();
    for row in rows {
        let (t, seed, r, captured) = row?;
        if r.position.is_some_and(|d| !inst.occurs_at(d)) {
            unsound.push(t);
        }
        if t == 0 {
            dump = captured;
        }
        writeln!(
            out,
            "{t},{seed},{},{},{},{},{},{},{}",
            opt(r.position),
            u8::from(r.hash_verified),
            u8::from(r.exactly_verified),
            r.copies_used,
            r.qubits,
            r.gate_units(),
            r.inner_iterations()
        )?;
    }
    out.flush()?;
    write_dump(common, dump)?;
    if !unsound.is_empty() {
        return Err(Failure::Verification(format!(
            "trials {unsound:?} returned a position that is not an occurrence"
        )));
    }
    Ok(())
}

fn run_compare(a: &CompareArgs) -> CliResult {
    let common = &a.common;
    check_common(common)?;
    let u = parse_input(&a.u, a.ascii)?;
    let v = parse_input(&a.v, a.ascii)?;
    let k = u.len().min(v.len());
    if k == 0 {
        return Err(Failure::Usage("u and v must both be non-empty".into()));
    }
    let index = ceil_log2(k as u64);
    let width = match a.algo {
        CompareAlgo::Grover => dense_width(index, 2, 1),
        CompareAlgo::Bsearch => {
            let hash = hash_register_width(k as u64, k, common.epsilon)?;
            dense_width(index, 2 * hash, hash)
        }
    };
    guard_dense(common, width)?;
    let expected = verdict(compare_classical(&u, &v));

    let rows = run_trials(common.seed, common.trials, common.jobs, |t, seed| {
        let mut ctx = context(common, t, seed);
        let result = match a.algo {
            CompareAlgo::Grover => compare_grover(&u, &v, &mut ctx)?,
            CompareAlgo::Bsearch => {
                let params = compare_params(&u, &v, common.epsilon, &mut ctx.rng)?;
                compare_bsearch(&u, &v, &params, &mut ctx)?
            }
        };
        Ok::<_, Error>((t, seed, result, ctx.captured))
    })?;
    let mut out = open_output(common.csv.as_deref())?;
    writeln!(out, "trial,seed,verdict,expected,a0,phases,qubits,gate_units")?;
    let mut dump = None;
    for row in rows {
        let (t, seed, r, captured) = row?;
        if t == 0 {
            dump = captured;
        }
        writeln!(
            out,
            "{t},{seed},{},{expected},{},{},{},{}",
            r.verdict,
            opt(r.a0),
            r.phases,
            r.qubits,
            r.ledger.gate_units_total()
        )?;
    }
    out.flush()?;
    write_dump(common, dump)
}

fn run_min_find(a: &MinFindArgs) -> CliResult {
    let common = &a.common;
    check_common(common)?;
    let max = a.values.iter().copied().max().unwrap_or(0);
    if max >= u64::MAX - 1 {
        return Err(Failure::Usage("values must be below 2^64 - 2".into()));
    }
    let value_bits = ceil_log2(max + 2).max(1);
    guard_dense(common, ceil_log2(a.values.len() as u64) + value_bits + 1)?;

    let rows = run_trials(common.seed, common.trials, common.jobs, |t, seed| {
        let mut ctx = context(common, t, seed);
        let outcome = min_find(&a.values, &mut ctx)?;
        Ok::<_, Error>((t, outcome, ctx.captured))
    })?;
    let mut out = open_output(common.csv.as_deref())?;
    writeln!(out, "trial,found_index,phases,iterations")?;
    let mut dump = None;
    for row in rows {
        let (t, m, captured) = row?;
        if t == 0 {
            dump = captured;
        }
        writeln!(out, "{t},{},{},{}", opt(m.index), m.phases, m.iterations)?;
    }
    out.flush()?;
    write_dump(common, dump)
}

fn run_sweep_cmd(a: &SweepArgs) -> CliResult {
    let common = &a.common;
    check_common(common)?;
    if common.dump_state.is_some() {
        return Err(Failure::Usage("--dump-state is not supported for sweeps".into()));
    }
    let largest = a.grid.iter().copied().max().unwrap_or(0);
    if common.mode == args::Mode::Dense && largest > 0 {
        let index = ceil_log2(largest as u64);
        let width = match a.algo {
            SweepAlgo::Match if largest >= a.m && a.m > 0 => {
                let windows = largest - a.m + 1;
                let hash = hash_register_width(windows as u64, a.m, common.epsilon)?;
                dense_width(ceil_log2(windows as u64), hash, hash)
            }
            SweepAlgo::Match => 0,
            SweepAlgo::CompareGrover => dense_width(index, 2, 1),
            SweepAlgo::CompareBsearch => {
                let hash = hash_register_width(largest as u64, largest, common.epsilon)?;
                dense_width(index, 2 * hash, hash)
            }
        };
        guard_dense(common, width)?;
    }
    let config = SweepConfig {
        algo: a.algo,
        grid: a.grid.clone(),
        m: a.m,
        epsilon: common.epsilon,
        trials: common.trials,
        seed: common.seed,
        backend: Backend::from(common.mode),
        jobs: common.jobs,
    };
    let rows = run_sweep(&config)?;
    let mut out = open_output(common.csv.as_deref())?;
    write_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run_crosscheck(max_width: usize, seed: u64) -> CliResult {
    if max_width > DENSE_QUBIT_CAP {
        return Err(Failure::Usage(format!(
            "--max-width {max_width} exceeds the {DENSE_QUBIT_CAP}-qubit dense cap"
        )));
    }
    let report = crosscheck(max_width, seed)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for inst in &report.instances {
        writeln!(out, "{inst}")?;
    }
    let failed = report.instances.iter().filter(|r| !r.passed()).count();
    writeln!(
        out,
        "{} instances, {failed} failed, max deviation {:.3e}",
        report.instances.len(),
        report.max_deviation()
    )?;
    out.flush()?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{failed} crosscheck instances failed")))
    }
}

fn run_primes(a: &PrimesArgs) -> CliResult {
    let mut ctx = RunContext::new(Backend::Structured, a.seed);
    let params = choose_prime(&mut ctx.rng, a.delta, a.max_len, a.epsilon)?;
    let mut out = open_output(a.csv.as_deref())?;
    writeln!(out, "r,p,epsilon,delta,max_len")?;
    writeln!(
        out,
        "{},{},{},{},{}",
        params.r(),
        params.p(),
        params.epsilon(),
        params.delta(),
        params.max_len()
    )?;
    out.flush()?;
    Ok(())
}
