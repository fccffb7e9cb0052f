//! Synthetic challenges.
//!
//! * Ideal: algorithm `A_i` draws uniformly from `[1 - 0.1 i, 1 - 0.1 (i - 1))`,
//!   so every value of `A_i` beats every value of `A_{i+1}`.
//! * Random: `n p` draws from `N(1.5, 1)` pushed through the logistic function
//!   and dealt to the algorithms round-robin; no algorithm is better than
//!   another.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Cell, ChallengeData, Direction, TaskData};
use crate::error::{Error, Result};
use crate::rng::{Domain, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimKind {
    Ideal,
    Random,
}

impl FromStr for SimKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(SimKind::Ideal),
            "random" => Ok(SimKind::Random),
            other => Err(Error::InvalidConfig(format!("unknown simulation kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimSpec {
    pub kind: SimKind,
    /// Test cases per task.
    pub n: usize,
    /// Algorithms.
    pub p: usize,
    /// Number of tasks; each task uses its own random stream.
    pub tasks: usize,
    pub seed: u64,
}

/// Largest algorithm count for the ideal generator.
pub const IDEAL_MAX_ALGORITHMS: usize = 9;

const RANDOM_MEAN: f64 = 1.5;
const RANDOM_SD: f64 = 1.0;

impl SimSpec {
    pub fn ideal(seed: u64) -> Self {
        Self {
            kind: SimKind::Ideal,
            n: 50,
            p: 5,
            tasks: 1,
            seed,
        }
    }

    pub fn random(seed: u64) -> Self {
        Self {
            kind: SimKind::Random,
            ..Self::ideal(seed)
        }
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 || self.tasks == 0 {
            return Err(Error::InvalidConfig("cases, algorithms and tasks must be positive".into()));
        }
        Ok(())
    }
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn ideal_task(spec: &SimSpec, index: usize) -> Result<TaskData> {
    let (n, p) = (spec.n, spec.p);
    let mut stream = Stream::new(spec.seed, Domain::SimIdeal, index as u64);
    let mut values = vec![Cell::Missing; n * p];
    for a in 0..p {
        let lo = 1.0 - 0.1 * (a + 1) as f64;
        for c in 0..n {
            values[c * p + a] = Cell::Observed(lo + 0.1 * stream.uniform());
        }
    }
    TaskData::new(format!("T{}", index + 1), names("c", n), names("A", p), values)
}

fn random_task(spec: &SimSpec, index: usize) -> Result<TaskData> {
    let (n, p) = (spec.n, spec.p);
    let mut stream = Stream::new(spec.seed, Domain::SimRandom, index as u64);
    let values = (0..n * p)
        .map(|_| {
            let x = RANDOM_MEAN + RANDOM_SD * stream.standard_normal();
            Cell::Observed(1.0 / (1.0 + (-x).exp()))
        })
        .collect();
    // Draw k lands at case k / p, algorithm k % p.
    TaskData::new(format!("T{}", index + 1), names("c", n), names("A", p), values)
}

/// Clearly separated algorithms.
pub fn generate_ideal(spec: &SimSpec) -> Result<ChallengeData> {
    spec.check()?;
    if spec.p > IDEAL_MAX_ALGORITHMS {
        return Err(Error::TooManyAlgorithms { requested: spec.p });
    }
    let tasks = (0..spec.tasks).map(|i| ideal_task(spec, i)).collect::<Result<_>>()?;
    ChallengeData::new(tasks, Direction::LargerBetter)
}

/// Exchangeable algorithms with logistic-normal values.
pub fn generate_random(spec: &SimSpec) -> Result<ChallengeData> {
    spec.check()?;
    let tasks = (0..spec.tasks).map(|i| random_task(spec, i)).collect::<Result<_>>()?;
    ChallengeData::new(tasks, Direction::LargerBetter)
}

pub fn generate(spec: &SimSpec) -> Result<ChallengeData> {
    match spec.kind {
        SimKind::Ideal => generate_ideal(spec),
        SimKind::Random => generate_random(spec),
    }
}
