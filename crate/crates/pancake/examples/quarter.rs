//! Quarter a random point set and print the cut.

use pancake::geometry::{count_quadrants, verify_cut, DEFAULT_ON_LINE_TOL};
use pancake::instances::{generate, Dist};
use pancake::solver::{solve, PhaseConfig};

fn main() {
    let ps = generate(1000, Dist::Gaussian, 42);
    let (cut, stats) = solve(&ps, &PhaseConfig::default()).expect("solvable");
    let counts = count_quadrants(&ps, &cut, DEFAULT_ON_LINE_TOL);
    println!("cut: {cut:?}");
    println!(
        "quadrants: ({}, {}, {}, {}), on lines: {}",
        counts.q1,
        counts.q2,
        counts.q3,
        counts.q4,
        counts.on1 + counts.on2 + counts.on_both
    );
    println!(
        "phases: {}, comparisons: {}, valid: {}",
        stats.phases,
        stats.comparisons,
        verify_cut(&ps, &cut, DEFAULT_ON_LINE_TOL)
    );
}
