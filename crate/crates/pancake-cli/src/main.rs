//! Command-line front end: instance generation, the linear-time planar
//! solver, brute-force reference solvers, verification, the median reduction
//! demo, the d-dimensional solvers, and the scaling bench.
//!
//! Exit codes: 0 success, 1 parse error, 2 solver failure, 3 size cap
//! exceeded (pass --force to override).

mod io;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pancake::geometry::{count_quadrants, verify_cut, PointSet2D, DEFAULT_ON_LINE_TOL};
use pancake::highdim::{solve_a, solve_b, HighDimConfig, PointSetND};
use pancake::instances::{generate, Dist};
use pancake::oracle::{brute_force_solve, median_via_pancake};
use pancake::solver::{solve, PhaseConfig, SolveStats};
use pancake::Error as PancakeError;

use io::{
    error_record, fmt_f64, parse_cut_json, parse_instance, points_to_csv, result_record_2d,
    result_record_nd, Instance,
};

const EXIT_PARSE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "pancake", version, about = "Orthogonal equipartition of point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Gaussian,
    Grid,
}

impl From<DistArg> for Dist {
    fn from(d: DistArg) -> Dist {
        match d {
            DistArg::Uniform => Dist::Uniform,
            DistArg::Gaussian => Dist::Gaussian,
            DistArg::Grid => Dist::Grid,
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// RNG seed; falls back to the PANCAKE_SEED environment variable, then 1.
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> u64 {
        self.seed
            .or_else(|| {
                std::env::var("PANCAKE_SEED")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(1)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planar instance file (CSV, one "x,y" row per point).
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
        dist: DistArg,
        #[command(flatten)]
        seed: SeedArg,
        /// Output path; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a planar instance with the linear-time solver.
    Solve2d {
        input: PathBuf,
        /// Relative tolerance for classifying points as on a cut line.
        #[arg(long, default_value_t = DEFAULT_ON_LINE_TOL)]
        tol: f64,
        #[command(flatten)]
        seed: SeedArg,
        /// Write an SVG plot of the cut.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Emit only the JSON record (suppress the human-readable summary).
        #[arg(long)]
        json: bool,
    },
    /// Solve a planar instance with the exhaustive reference solver.
    Oracle2d {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ON_LINE_TOL)]
        tol: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        json: bool,
    },
    /// Check a cut (JSON, inline or @file) against an instance.
    Verify {
        input: PathBuf,
        /// Cut JSON: a cut object or a whole result record; prefix with @ to
        /// read from a file.
        cut: String,
        #[arg(long, default_value_t = DEFAULT_ON_LINE_TOL)]
        tol: f64,
    },
    /// Find the median of an odd list of distinct numbers via the planar
    /// solver.
    MedianDemo {
        /// Values, separated by spaces or commas.
        values: String,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Find d mutually orthogonal hyperplanes pairwise quartering one set.
    SolveA {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Override the desk-scale size caps.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Find two orthogonal hyperplanes quartering every input set.
    SolveB {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Scaling bench (comparison counter and wall time) or solver-vs-oracle
    /// comparison.
    Bench {
        /// Comma-separated ascending point counts.
        #[arg(long, default_value = "32768,65536,131072,262144,524288,1048576,2097152")]
        ns: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Run trials on worker threads (timing is cleanest sequentially).
        #[arg(long)]
        parallel: bool,
        /// "scaling" (default) or "compare".
        #[arg(long, default_value = "scaling")]
        mode: String,
        /// Write the CSV report here (stdout summary is always printed).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

fn read_planar(path: &PathBuf) -> Result<PointSet2D> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    match parse_instance(&text, &path.display().to_string())? {
        Instance::Planar(ps) => Ok(ps),
        _ => Err(anyhow!("{}: expected a planar instance", path.display())),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { n, dist, seed, out } => {
            if n < 1 {
                return Err(anyhow!("n must be at least 1"));
            }
            let ps = generate(n, dist.into(), seed.resolve());
            let csv = points_to_csv(&ps);
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve2d {
            input,
            tol,
            seed,
            svg,
            json,
        } => {
            let ps = match read_planar(&input) {
                Ok(ps) => ps,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
            };
            let seed = seed.resolve();
            let cfg = PhaseConfig {
                rng_seed: seed,
                ..PhaseConfig::default()
            };
            match solve(&ps, &cfg) {
                Ok((cut, stats)) => {
                    let counts = count_quadrants(&ps, &cut, tol);
                    if !json {
                        eprintln!(
                            "ok: n={} quadrants=({},{},{},{}) on=({},{},{}) phases={} comparisons={}",
                            ps.len(),
                            counts.q1,
                            counts.q2,
                            counts.q3,
                            counts.q4,
                            counts.on1,
                            counts.on2,
                            counts.on_both,
                            stats.phases,
                            stats.comparisons
                        );
                    }
                    println!(
                        "{}",
                        result_record_2d("ok", Some(&cut), Some(&counts), ps.len(), seed, &stats)
                    );
                    if let Some(path) = svg {
                        std::fs::write(&path, svg::render(&ps, &cut, &counts))
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("{}", error_record("error", &e.to_string(), ps.len(), seed));
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(EXIT_SOLVER))
                }
            }
        }
        Command::Oracle2d {
            input,
            tol,
            seed,
            json,
        } => {
            let ps = match read_planar(&input) {
                Ok(ps) => ps,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
            };
            let seed = seed.resolve();
            let t0 = std::time::Instant::now();
            match brute_force_solve(&ps) {
                Ok(cut) => {
                    let stats = SolveStats {
                        elapsed_ns: t0.elapsed().as_nanos() as u64,
                        ..SolveStats::default()
                    };
                    let counts = count_quadrants(&ps, &cut, tol);
                    if !json {
                        eprintln!(
                            "ok: n={} quadrants=({},{},{},{})",
                            ps.len(),
                            counts.q1,
                            counts.q2,
                            counts.q3,
                            counts.q4
                        );
                    }
                    println!(
                        "{}",
                        result_record_2d("ok", Some(&cut), Some(&counts), ps.len(), seed, &stats)
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(PancakeError::NotFound) => {
                    println!(
                        "{}",
                        error_record("not_found", "exhaustive search found no cut", ps.len(), seed)
                    );
                    Ok(ExitCode::from(EXIT_SOLVER))
                }
                Err(e) => {
                    println!("{}", error_record("error", &e.to_string(), ps.len(), seed));
                    Ok(ExitCode::from(EXIT_SOLVER))
                }
            }
        }
        Command::Verify { input, cut, tol } => {
            let ps = match read_planar(&input) {
                Ok(ps) => ps,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
            };
            let cut_text = if let Some(path) = cut.strip_prefix('@') {
                std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?
            } else {
                cut
            };
            let cut = match parse_cut_json(&cut_text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
            };
            let counts = count_quadrants(&ps, &cut, tol);
            println!(
                "counts: q=({},{},{},{}) on=({},{},{}) n={}",
                counts.q1,
                counts.q2,
                counts.q3,
                counts.q4,
                counts.on1,
                counts.on2,
                counts.on_both,
                counts.n
            );
            if verify_cut(&ps, &cut, tol) {
                println!("valid");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("invalid");
                Ok(ExitCode::from(EXIT_SOLVER))
            }
        }
        Command::MedianDemo { values, seed } => {
            let parsed: Result<Vec<f64>> = values
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| anyhow!("invalid number {s:?}"))
                })
                .collect();
            let parsed = match parsed {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
            };
            match median_via_pancake(&parsed) {
                Ok(median) => {
                    println!(
                        "{{\"status\":\"ok\",\"median\":{},\"n\":{},\"seed\":{}}}",
                        fmt_f64(median),
                        parsed.len(),
                        seed.resolve()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(EXIT_SOLVER))
                }
            }
        }
        Command::SolveA {
            input,
            tol,
            force,
            seed,
        } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))?;
            let set = match parse_instance(&text, &input.display().to_string()) {
                Ok(Instance::Single(set)) => set,
                Ok(Instance::Planar(ps)) => planar_to_nd(&ps),
                Ok(Instance::Sets(_)) => {
                    eprintln!("error: solve-a takes a single set");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
            };
            let cfg = HighDimConfig {
                tol,
                force,
                ..HighDimConfig::default()
            };
            let n = set.len();
            run_highdim(
                seed.resolve(),
                n,
                || solve_a(&set, &cfg),
                |frame| {
                    pancake::highdim::quadrant_counts_pair(
                        &set,
                        &frame.hyperplanes[0],
                        &frame.hyperplanes[1],
                        tol,
                    )
                },
            )
        }
        Command::SolveB {
            input,
            tol,
            force,
            seed,
        } => {
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("cannot read {}", input.display()))?;
            let sets = match parse_instance(&text, &input.display().to_string()) {
                Ok(Instance::Sets(sets)) => sets,
                Ok(Instance::Single(set)) => vec![set],
                Ok(Instance::Planar(ps)) => vec![planar_to_nd(&ps)],
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_PARSE));
                }
            };
            let cfg = HighDimConfig {
                tol,
                force,
                ..HighDimConfig::default()
            };
            let total: usize = sets.iter().map(|s| s.len()).sum();
            run_highdim(
                seed.resolve(),
                total,
                || solve_b(&sets, &cfg),
                |frame| {
                    pancake::highdim::quadrant_counts_pair(
                        &sets[0],
                        &frame.hyperplanes[0],
                        &frame.hyperplanes[1],
                        tol,
                    )
                },
            )
        }
        Command::Bench {
            ns,
            trials,
            seed,
            parallel,
            mode,
            csv,
        } => {
            let sizes: Result<Vec<usize>> = ns
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| anyhow!("invalid size {s:?}"))
                })
                .collect();
            let sizes = sizes?;
            let seed = seed.resolve();
            match mode.as_str() {
                "scaling" => {
                    let report = pancake::bench::run_scaling(&sizes, trials, seed, parallel)
                        .map_err(|e| anyhow!("bench failed: {e}"))?;
                    print!("{}", report.summary());
                    let csv_text = report.csv();
                    match csv {
                        Some(path) => std::fs::write(&path, csv_text)
                            .with_context(|| format!("cannot write {}", path.display()))?,
                        None => print!("{csv_text}"),
                    }
                }
                "compare" => {
                    let report = pancake::bench::run_compare(&sizes, trials, seed)
                        .map_err(|e| anyhow!("compare failed: {e}"))?;
                    let csv_text = report.csv();
                    print!("{csv_text}");
                    if let Some(path) = csv {
                        std::fs::write(&path, csv_text)
                            .with_context(|| format!("cannot write {}", path.display()))?;
                    }
                }
                other => return Err(anyhow!("unknown bench mode {other:?}")),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn planar_to_nd(ps: &PointSet2D) -> PointSetND {
    PointSetND::new(2, ps.points().iter().map(|p| vec![p.x, p.y]).collect())
        .expect("planar set is 2-dimensional")
}

fn run_highdim(
    seed: u64,
    n: usize,
    solve: impl FnOnce() -> pancake::Result<pancake::highdim::OrthoFrame>,
    counts_of: impl FnOnce(&pancake::highdim::OrthoFrame) -> pancake::geometry::QuadrantCounts,
) -> Result<ExitCode> {
    let t0 = std::time::Instant::now();
    match solve() {
        Ok(frame) => {
            let stats = SolveStats {
                elapsed_ns: t0.elapsed().as_nanos() as u64,
                ..SolveStats::default()
            };
            let counts = counts_of(&frame);
            println!(
                "{}",
                result_record_nd("ok", Some(&frame), Some(&counts), n, seed, &stats)
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(PancakeError::NotFound) => {
            println!(
                "{}",
                error_record(
                    "not_found",
                    "enumeration exhausted without a valid frame",
                    n,
                    seed
                )
            );
            Ok(ExitCode::from(EXIT_SOLVER))
        }
        Err(PancakeError::CapExceeded(msg)) => {
            println!("{}", error_record("error", &msg, n, seed));
            eprintln!("error: {msg}; pass --force to override");
            Ok(ExitCode::from(EXIT_CAP))
        }
        Err(e) => {
            println!("{}", error_record("error", &e.to_string(), n, seed));
            Ok(ExitCode::from(EXIT_SOLVER))
        }
    }
}
