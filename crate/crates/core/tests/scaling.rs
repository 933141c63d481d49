//! Monte Carlo and sweep-level invariants at moderate sizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qstrings::fingerprint::{choose_prime, rolling_hash};
use qstrings::grover::{min_find, RunContext};
use qstrings::math::log_log_slope;
use qstrings::montecarlo::run_trials;
use qstrings::qmatch::{match_params, match_search};
use qstrings::resources::{
    gate_unit_slope, iteration_fit, planted_match_instance, run_sweep, sqrt_fit, write_csv, SweepAlgo,
    SweepConfig,
};
use qstrings::Backend;

fn config(algo: SweepAlgo, grid: Vec<usize>, trials: u64, seed: u64) -> SweepConfig {
    SweepConfig {
        algo,
        grid,
        m: 8,
        epsilon: 0.1,
        trials,
        seed,
        backend: Backend::Structured,
        jobs: None,
    }
}

#[test]
fn matching_completeness_on_small_instances() {
    for (n, m) in [(16, 2), (16, 4), (32, 2), (32, 4)] {
        let hits = run_trials((n * 10 + m) as u64, 1000, None, |_, seed| {
            let mut ctx = RunContext::new(Backend::Structured, seed);
            let inst = planted_match_instance(n, m, 1, &mut ctx.rng).unwrap();
            let params = match_params(&inst, 0.1, &mut ctx.rng).unwrap();
            match_search(&inst, &params, &mut ctx).unwrap().position.is_some()
        })
        .unwrap();
        let rate = hits.iter().filter(|&&h| h).count() as f64 / 1000.0;
        assert!(rate >= 0.5 * 0.9 - 0.05, "n={n} m={m} rate={rate}");
    }
}

#[test]
fn fingerprint_collisions_respect_the_split_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (delta, epsilon) = (4u64, 0.5);
    let mut collisions = 0;
    let trials = 4000;
    for _ in 0..trials {
        let len = rng.gen_range(1..=16);
        let u: Vec<u8> = (0..len).map(|_| rng.gen_range(0..=1)).collect();
        let mut v = u.clone();
        v[rng.gen_range(0..len)] ^= 1;
        let p = choose_prime(&mut rng, delta, 16, epsilon).unwrap().p();
        collisions += usize::from(rolling_hash(&u, p) == rolling_hash(&v, p));
    }
    assert!(collisions as f64 / trials as f64 <= epsilon / delta as f64);
}

#[test]
fn grover_comparator_iterations_scale_as_sqrt_k() {
    let rows = run_sweep(&config(SweepAlgo::CompareGrover, vec![8, 16, 32, 64, 128, 256], 300, 21)).unwrap();
    let (c, spread) = iteration_fit(&rows);
    assert!(c > 0.0 && spread <= 0.25, "c={c} spread={spread}");
}

#[test]
fn minimum_finding_iterations_scale_as_sqrt_m() {
    let sizes: Vec<usize> = (3..=8).map(|e| 1 << e).collect();
    let means: Vec<f64> = sizes
        .iter()
        .map(|&m| {
            let runs = run_trials(m as u64, 200, None, |_, seed| {
                let mut ctx = RunContext::new(Backend::Structured, seed);
                let values: Vec<u64> = (0..m).map(|_| ctx.rng.gen_range(0..1000)).collect();
                min_find(&values, &mut ctx).unwrap().iterations
            })
            .unwrap();
            runs.iter().sum::<u64>() as f64 / runs.len() as f64
        })
        .collect();
    let xs: Vec<f64> = sizes.iter().map(|&m| m as f64).collect();
    let (c, spread) = sqrt_fit(&xs, &means);
    assert!(c > 0.0 && spread <= 0.25, "c={c} spread={spread} means={means:?}");
}

#[test]
fn binary_search_comparator_stays_within_its_time_bound() {
    let grid: Vec<usize> = (3..=12).map(|e| 1 << e).collect();
    let rows = run_sweep(&config(SweepAlgo::CompareBsearch, grid.clone(), 60, 22)).unwrap();
    let measured = gate_unit_slope(&rows);
    let ks: Vec<f64> = grid.iter().map(|&k| k as f64).collect();
    let model: Vec<f64> = ks.iter().map(|k| k.log2().powi(2) * k.log2().log2().max(1.0)).collect();
    let expected = log_log_slope(&ks, &model);
    // the inner test cost is flat while ceil(log2 W) is constant, so the
    // growth sits below the bound's shape rather than on it
    assert!(
        measured > 0.0 && measured <= 1.15 * expected,
        "measured slope {measured}, model slope {expected}"
    );
    for row in &rows {
        assert_eq!(row.qubits, row.qubits_formula);
    }
}

#[test]
fn sweep_csv_is_reproducible() {
    let render = || {
        let rows = run_sweep(&config(SweepAlgo::Match, vec![64, 128], 20, 5)).unwrap();
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        out
    };
    assert_eq!(render(), render());
}
