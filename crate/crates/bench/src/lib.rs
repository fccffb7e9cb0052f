//! Shared fixtures for the criterion benches.

use rankscope_core::simgen::generate_random;
use rankscope_core::{ChallengeData, SimSpec, TaskData};

/// Random challenge with `tasks` tasks of `n` cases and `p` algorithms.
pub fn random_challenge(n: usize, p: usize, tasks: usize) -> ChallengeData {
    generate_random(&SimSpec { n, p, tasks, ..SimSpec::random(11) }).expect("valid spec")
}

pub fn random_task(n: usize, p: usize) -> TaskData {
    random_challenge(n, p, 1).tasks.remove(0)
}

/// Two paired samples of length `n` with a small shift and no ties.
pub fn paired(n: usize) -> (Vec<f64>, Vec<f64>) {
    let x = (0..n).map(|i| ((i * 37 % 101) as f64).sin()).collect();
    let y = (0..n).map(|i| ((i * 37 % 101) as f64).sin() - 0.05 + 1e-3 * i as f64).collect();
    (x, y)
}
