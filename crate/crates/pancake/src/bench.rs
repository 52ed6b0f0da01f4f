//! Scaling harness backing the linear-time claim.
//!
//! The primary evidence is the deterministic comparison counter (machine
//! noise cannot touch it); wall time is reported with a looser bound.
//! Instance generation happens outside the timed region.

use std::time::Instant;

use crate::instances::{derive_seed, generate, Dist};
use crate::solver::{solve, PhaseConfig};
use crate::verify_cut;
use crate::{Error, Result};

/// Per-size medians over the trials.
#[derive(Debug, Clone, Copy)]
pub struct BenchRow {
    pub n: usize,
    pub median_elapsed_ns: u64,
    pub median_comparisons: u64,
    pub phases: u64,
    pub retries: u64,
}

/// Scaling report: per-size medians plus least-squares slopes of
/// `log(time)` and `log(comparisons)` against `log(n)`.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub time_slope: f64,
    pub counter_slope: f64,
}

impl BenchReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,median_elapsed_ns,median_comparisons,phases,retries\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.median_elapsed_ns, r.median_comparisons, r.phases, r.retries
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:>10} {:>16} {:>16} {:>8} {:>8}\n",
            "n", "time (ns)", "comparisons", "phases", "retries"
        ));
        for r in &self.rows {
            out.push_str(&format!(
                "{:>10} {:>16} {:>16} {:>8} {:>8}\n",
                r.n, r.median_elapsed_ns, r.median_comparisons, r.phases, r.retries
            ));
        }
        out.push_str(&format!(
            "log-log slope: time {:.4}, comparisons {:.4}\n",
            self.time_slope, self.counter_slope
        ));
        out
    }

    /// Largest ratio of medians between adjacent doubling sizes.
    pub fn worst_doubling_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.rows.windows(2) {
            if w[1].n == 2 * w[0].n && w[0].median_comparisons > 0 {
                worst = worst.max(w[1].median_comparisons as f64 / w[0].median_comparisons as f64);
            }
        }
        worst
    }
}

fn median_u64(values: &mut [u64]) -> u64 {
    values.sort_unstable();
    values[values.len() / 2]
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in points {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    num / den
}

fn one_trial(n: usize, trial: u64, seed: u64, cfg: &PhaseConfig) -> Result<(u64, u64, u64, u64)> {
    let instance_seed = derive_seed(seed, n as u64, trial);
    let ps = generate(n, Dist::Gaussian, instance_seed);
    let cfg = PhaseConfig {
        rng_seed: derive_seed(seed ^ 0x5eed, n as u64, trial),
        ..*cfg
    };
    let t0 = Instant::now();
    let (cut, stats) = solve(&ps, &cfg)?;
    let elapsed = t0.elapsed().as_nanos() as u64;
    if !verify_cut(&ps, &cut, crate::geometry::DEFAULT_ON_LINE_TOL) {
        return Err(Error::SolveFailed {
            retries: 0,
            reason: format!("bench verification failed at n={n} trial={trial} seed={seed}"),
        });
    }
    Ok((elapsed, stats.comparisons, stats.phases, stats.retries))
}

/// Runs `trials` seeded solves per size and reports per-size medians and
/// log-log slopes. Deterministic instances per `(n, trial, seed)`; trials run
/// sequentially unless `parallel` is set (timing is cleanest sequentially).
pub fn run_scaling(ns: &[usize], trials: usize, seed: u64, parallel: bool) -> Result<BenchReport> {
    if ns.is_empty() || trials == 0 {
        return Err(Error::EmptyInput);
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] < 4 {
        return Err(Error::InvalidConfig(
            "sizes must be ascending and at least 4".into(),
        ));
    }
    let cfg = PhaseConfig::default();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let results: Vec<(u64, u64, u64, u64)> = if parallel {
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..trials as u64)
                    .map(|t| {
                        let cfg = &cfg;
                        scope.spawn(move || one_trial(n, t, seed, cfg))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("bench thread panicked"))
                    .collect::<Result<Vec<_>>>()
            })?
        } else {
            (0..trials as u64)
                .map(|t| one_trial(n, t, seed, &cfg))
                .collect::<Result<Vec<_>>>()?
        };
        let mut times: Vec<u64> = results.iter().map(|r| r.0).collect();
        let mut comps: Vec<u64> = results.iter().map(|r| r.1).collect();
        let mut phases: Vec<u64> = results.iter().map(|r| r.2).collect();
        let mut retries: Vec<u64> = results.iter().map(|r| r.3).collect();
        rows.push(BenchRow {
            n,
            median_elapsed_ns: median_u64(&mut times),
            median_comparisons: median_u64(&mut comps),
            phases: median_u64(&mut phases),
            retries: median_u64(&mut retries),
        });
    }
    let time_pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), (r.median_elapsed_ns.max(1) as f64).ln()))
        .collect();
    let comp_pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.n as f64).ln(), (r.median_comparisons.max(1) as f64).ln()))
        .collect();
    Ok(BenchReport {
        time_slope: least_squares_slope(&time_pts),
        counter_slope: least_squares_slope(&comp_pts),
        rows,
    })
}

/// One row of the solver-vs-oracle comparison.
#[derive(Debug, Clone, Copy)]
pub struct CompareRow {
    pub n: usize,
    pub solver_ns: u64,
    pub oracle_ns: u64,
    pub speedup: f64,
}

/// Comparison report; both solvers verified on every instance.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn csv(&self) -> String {
        let mut out = String::from("n,solver_ns,oracle_ns,speedup\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.3}\n",
                r.n, r.solver_ns, r.oracle_ns, r.speedup
            ));
        }
        out
    }
}

/// Runs solver and oracle on the same seeded instances (oracle-feasible
/// sizes only) and records median times and speedups. Any verification
/// failure aborts with the offending seed in the error.
pub fn run_compare(ns: &[usize], trials: usize, seed: u64) -> Result<CompareReport> {
    if ns.is_empty() || trials == 0 {
        return Err(Error::EmptyInput);
    }
    if ns.iter().any(|&n| !(4..=300).contains(&n)) {
        return Err(Error::InvalidConfig(
            "comparison sizes must lie in [4, 300]".into(),
        ));
    }
    let cfg = PhaseConfig::default();
    let mut rows = Vec::new();
    for &n in ns {
        let mut solver_times = Vec::with_capacity(trials);
        let mut oracle_times = Vec::with_capacity(trials);
        for t in 0..trials as u64 {
            let instance_seed = derive_seed(seed, n as u64, t);
            let ps = generate(n, Dist::Gaussian, instance_seed);
            let run_cfg = PhaseConfig {
                rng_seed: derive_seed(seed ^ 0x5eed, n as u64, t),
                ..cfg
            };
            let t0 = Instant::now();
            let (cut, _) = solve(&ps, &run_cfg)?;
            solver_times.push(t0.elapsed().as_nanos() as u64);
            let t1 = Instant::now();
            let oracle_cut = crate::oracle::brute_force_solve(&ps)?;
            oracle_times.push(t1.elapsed().as_nanos() as u64);
            let tol = crate::geometry::DEFAULT_ON_LINE_TOL;
            if !verify_cut(&ps, &cut, tol) || !verify_cut(&ps, &oracle_cut, tol) {
                return Err(Error::SolveFailed {
                    retries: 0,
                    reason: format!(
                        "comparison verification failed at n={n} trial={t} seed={instance_seed}"
                    ),
                });
            }
        }
        let s = median_u64(&mut solver_times);
        let o = median_u64(&mut oracle_times);
        rows.push(CompareRow {
            n,
            solver_ns: s,
            oracle_ns: o,
            speedup: o as f64 / s.max(1) as f64,
        });
    }
    Ok(CompareReport { rows })
}
