//! Ranking stability: bootstrap rank distributions, Kendall's tau against
//! bootstrap rankings, and rank distributions across tasks.

use std::io::Write;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ChallengeData, Direction, TaskData};
use crate::error::{Error, Result};
use crate::quantile::quantile_sorted;
use crate::rank_stats::kendall_tau_slices;
use crate::ranking::{rank_grid, rank_task, Ranking, RankingMethodSpec};
use crate::rng::{Domain, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of bootstrap samples.
    pub b: usize,
    pub seed: u64,
}

pub const DEFAULT_BOOTSTRAP_SAMPLES: usize = 1000;

/// Percentiles bounding the bootstrap rank intervals.
pub const INTERVAL_PERCENTILES: (f64, f64) = (0.025, 0.975);

impl BootstrapConfig {
    pub fn new(b: usize, seed: u64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidConfig("bootstrap sample count must be at least 1".into()));
        }
        Ok(Self { b, seed })
    }

    /// Config for the `index`-th task of a multi-task run, so tasks do not
    /// share resampling patterns.
    pub fn for_task(&self, index: usize) -> Self {
        let mut s = Stream::new(self.seed, Domain::Bootstrap, u64::MAX - index as u64);
        Self {
            b: self.b,
            seed: s.next_u64(),
        }
    }
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            b: DEFAULT_BOOTSTRAP_SAMPLES,
            seed: 0,
        }
    }
}

/// Case indices of bootstrap sample `sample`: `n` draws with replacement.
pub fn bootstrap_sample(n: usize, seed: u64, sample: usize) -> Vec<usize> {
    let mut s = Stream::new(seed, Domain::Bootstrap, sample as u64);
    (0..n).map(|_| s.below(n)).collect()
}

pub fn draw_bootstrap_indices(n: usize, cfg: &BootstrapConfig) -> Vec<Vec<usize>> {
    (0..cfg.b).map(|i| bootstrap_sample(n, cfg.seed, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionSource {
    Bootstrap,
    AcrossTasks,
}

/// Frequencies of ranks per column.
///
/// Columns are usually algorithms; per-algorithm panels use tasks instead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDistribution {
    pub title: String,
    pub labels: Vec<String>,
    /// `counts[column][rank - 1]`.
    pub counts: Vec<Vec<u32>>,
    pub medians: Vec<f64>,
    /// Percentile interval (bootstrap) or min/max range (across tasks).
    pub intervals: Vec<(f64, f64)>,
    pub source: DistributionSource,
    /// Observations per column: `b` or `m`.
    pub total: usize,
}

impl RankDistribution {
    /// Builds the distribution from per-column rank samples.
    pub fn from_samples(
        title: impl Into<String>,
        labels: Vec<String>,
        samples: &[Vec<u32>],
        max_rank: usize,
        source: DistributionSource,
    ) -> Self {
        let mut counts = Vec::with_capacity(samples.len());
        let mut medians = Vec::with_capacity(samples.len());
        let mut intervals = Vec::with_capacity(samples.len());
        for s in samples {
            let mut c = vec![0u32; max_rank];
            for &r in s {
                c[r as usize - 1] += 1;
            }
            counts.push(c);
            let mut sorted: Vec<f64> = s.iter().map(|&r| r as f64).collect();
            sorted.sort_by(f64::total_cmp);
            medians.push(quantile_sorted(&sorted, 0.5));
            intervals.push(match source {
                DistributionSource::Bootstrap => (
                    quantile_sorted(&sorted, INTERVAL_PERCENTILES.0),
                    quantile_sorted(&sorted, INTERVAL_PERCENTILES.1),
                ),
                DistributionSource::AcrossTasks => (sorted[0], sorted[sorted.len() - 1]),
            });
        }
        Self {
            title: title.into(),
            labels,
            counts,
            medians,
            intervals,
            source,
            total: samples.first().map(Vec::len).unwrap_or(0),
        }
    }

    pub fn max_rank(&self) -> usize {
        self.counts.first().map(Vec::len).unwrap_or(0)
    }

    pub fn frequency(&self, column: usize, rank: usize) -> f64 {
        self.counts[column][rank - 1] as f64 / self.total as f64
    }

    /// Interval widened outward to whole ranks, for display.
    pub fn display_interval(&self, column: usize) -> (u32, u32) {
        let (lo, hi) = self.intervals[column];
        (lo.floor() as u32, hi.ceil() as u32)
    }

    /// Same distribution with columns in the given label order; labels not
    /// present are skipped.
    pub fn reordered(&self, labels: &[String]) -> RankDistribution {
        let idx: Vec<usize> = labels
            .iter()
            .filter_map(|l| self.labels.iter().position(|x| x == l))
            .collect();
        RankDistribution {
            title: self.title.clone(),
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            counts: idx.iter().map(|&i| self.counts[i].clone()).collect(),
            medians: idx.iter().map(|&i| self.medians[i]).collect(),
            intervals: idx.iter().map(|&i| self.intervals[i]).collect(),
            source: self.source,
            total: self.total,
        }
    }

    /// Writes `label,rank,count,frequency` rows (only nonzero counts).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["label", "rank", "count", "frequency", "median", "lo", "hi"]).map_err(io)?;
        for (c, label) in self.labels.iter().enumerate() {
            for rank in 1..=self.max_rank() {
                let count = self.counts[c][rank - 1];
                if count == 0 {
                    continue;
                }
                w.write_record([
                    label.clone(),
                    rank.to_string(),
                    count.to_string(),
                    format!("{:?}", self.frequency(c, rank)),
                    format!("{:?}", self.medians[c]),
                    format!("{:?}", self.intervals[c].0),
                    format!("{:?}", self.intervals[c].1),
                ])
                .map_err(io)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Full-data ranking plus the ranking of every bootstrap sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapRankings {
    pub full: Ranking,
    /// `samples[i][algorithm]` is the rank in bootstrap sample `i`.
    pub samples: Vec<Vec<u32>>,
}

impl BootstrapRankings {
    pub fn distribution(&self) -> RankDistribution {
        let p = self.full.algorithms.len();
        let per_alg: Vec<Vec<u32>> = (0..p).map(|a| self.samples.iter().map(|s| s[a]).collect()).collect();
        RankDistribution::from_samples(
            self.full.task.clone(),
            self.full.algorithms.clone(),
            &per_alg,
            p,
            DistributionSource::Bootstrap,
        )
    }

    /// Kendall's tau between the full-data ranking and each bootstrap ranking.
    ///
    /// A bootstrap ranking with all algorithms tied carries no ordering and
    /// contributes tau = 0.
    pub fn tau_samples(&self) -> Result<TauSamples> {
        if self.full.algorithms.len() < 2 || self.full.is_all_tied() {
            return Err(Error::DegenerateInput(format!(
                "full-data ranking of task `{}` has all algorithms tied",
                self.full.task
            )));
        }
        let full: Vec<f64> = self.full.ranks.iter().map(|&r| r as f64).collect();
        let values = self
            .samples
            .iter()
            .map(|s| {
                let b: Vec<f64> = s.iter().map(|&r| r as f64).collect();
                kendall_tau_slices(&full, &b).unwrap_or(0.0)
            })
            .collect();
        Ok(TauSamples {
            task: self.full.task.clone(),
            method: self.full.method,
            values,
        })
    }
}

/// Ranks the task on the full data and on `cfg.b` bootstrap samples.
pub fn bootstrap_rankings(
    task: &TaskData,
    direction: Direction,
    method: &RankingMethodSpec,
    cfg: &BootstrapConfig,
) -> Result<BootstrapRankings> {
    if cfg.b == 0 {
        return Err(Error::InvalidConfig("bootstrap sample count must be at least 1".into()));
    }
    let full = rank_task(task, direction, method)?;
    let grid = task.grid(direction)?;
    let n = grid.n_cases();
    let samples = (0..cfg.b)
        .into_par_iter()
        .map(|i| {
            let resampled = grid.resample(&bootstrap_sample(n, cfg.seed, i));
            rank_grid(&resampled, direction, method).map(|(ranks, _, _)| ranks)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BootstrapRankings { full, samples })
}

pub fn bootstrap_rank_distribution(
    task: &TaskData,
    direction: Direction,
    method: &RankingMethodSpec,
    cfg: &BootstrapConfig,
) -> Result<RankDistribution> {
    Ok(bootstrap_rankings(task, direction, method, cfg)?.distribution())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauSamples {
    pub task: String,
    pub method: RankingMethodSpec,
    pub values: Vec<f64>,
}

impl TauSamples {
    pub fn median(&self) -> f64 {
        crate::quantile::median(&self.values).unwrap_or(f64::NAN)
    }

    pub fn write_csv<W: Write>(samples: &[TauSamples], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["task", "sample", "tau"]).map_err(io)?;
        for s in samples {
            for (i, v) in s.values.iter().enumerate() {
                w.write_record([s.task.clone(), i.to_string(), format!("{v:?}")]).map_err(io)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn bootstrap_tau_samples(
    task: &TaskData,
    direction: Direction,
    method: &RankingMethodSpec,
    cfg: &BootstrapConfig,
) -> Result<TauSamples> {
    bootstrap_rankings(task, direction, method, cfg)?.tau_samples()
}

/// Rank frequencies of each algorithm over tasks, with min/max ranges.
pub fn cross_task_rank_distribution(rankings: &[Ranking]) -> Result<RankDistribution> {
    let first = rankings.first().ok_or_else(|| Error::EmptyInput("no rankings".into()))?;
    let names = first.algorithms.clone();
    let aligned: Vec<Ranking> = rankings.iter().map(|r| r.aligned_to(&names)).collect::<Result<_>>()?;
    let per_alg: Vec<Vec<u32>> = (0..names.len())
        .map(|a| aligned.iter().map(|r| r.ranks[a]).collect())
        .collect();
    Ok(RankDistribution::from_samples(
        "across tasks",
        names.clone(),
        &per_alg,
        names.len(),
        DistributionSource::AcrossTasks,
    ))
}

/// Bootstrap rank frequencies keyed by `(algorithm, task)`.
///
/// Each task is bootstrapped over its own algorithm set; an algorithm that
/// does not take part in a task has no entry for it.
pub fn per_algorithm_task_bootstrap(
    data: &ChallengeData,
    method: &RankingMethodSpec,
    cfg: &BootstrapConfig,
) -> Result<IndexMap<(String, String), Vec<u32>>> {
    let dists = data
        .tasks
        .iter()
        .enumerate()
        .map(|(k, t)| bootstrap_rank_distribution(t, data.direction, method, &cfg.for_task(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(reindex_by_algorithm(&data.algorithms, &dists))
}

pub(crate) fn reindex_by_algorithm(
    algorithms: &[String],
    per_task: &[RankDistribution],
) -> IndexMap<(String, String), Vec<u32>> {
    let mut out = IndexMap::new();
    for alg in algorithms {
        for d in per_task {
            if let Some(c) = d.labels.iter().position(|l| l == alg) {
                out.insert((alg.clone(), d.title.clone()), d.counts[c].clone());
            }
        }
    }
    out
}

/// One distribution per algorithm with tasks as columns, for per-algorithm
/// blob panels.
pub fn per_algorithm_panels(algorithms: &[String], per_task: &[RankDistribution]) -> Vec<RankDistribution> {
    algorithms
        .iter()
        .map(|alg| {
            let mut labels = Vec::new();
            let mut samples = Vec::new();
            let mut max_rank = 0;
            for d in per_task {
                if let Some(c) = d.labels.iter().position(|l| l == alg) {
                    labels.push(d.title.clone());
                    max_rank = max_rank.max(d.max_rank());
                    let expanded: Vec<u32> = d.counts[c]
                        .iter()
                        .enumerate()
                        .flat_map(|(r, &n)| std::iter::repeat_n(r as u32 + 1, n as usize))
                        .collect();
                    samples.push(expanded);
                }
            }
            RankDistribution::from_samples(alg.clone(), labels, &samples, max_rank, DistributionSource::Bootstrap)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::Scheme;
    use crate::simgen::{generate_ideal, SimSpec};

    const LB: Direction = Direction::LargerBetter;

    fn ranking(task: &str, ranks: &[u32]) -> Ranking {
        Ranking {
            task: task.into(),
            algorithms: (0..ranks.len()).map(|i| format!("A{}", i + 1)).collect(),
            ranks: ranks.to_vec(),
            aggregates: ranks.iter().map(|&r| r as f64).collect(),
            aggregate_direction: Direction::SmallerBetter,
            method: RankingMethodSpec::rank_then_mean(),
        }
    }

    #[test]
    fn single_case_indices() {
        let cfg = BootstrapConfig::new(20, 3).unwrap();
        assert!(draw_bootstrap_indices(1, &cfg).iter().all(|s| s == &vec![0]));
        assert_eq!(draw_bootstrap_indices(17, &cfg), draw_bootstrap_indices(17, &cfg));
        assert!(BootstrapConfig::new(0, 1).is_err());
    }

    #[test]
    fn distinct_fraction_matches_expectation() {
        let cfg = BootstrapConfig::new(1000, 42).unwrap();
        let samples = draw_bootstrap_indices(50, &cfg);
        let mean_frac = samples
            .iter()
            .map(|s| {
                let mut u = s.clone();
                u.sort_unstable();
                u.dedup();
                u.len() as f64 / 50.0
            })
            .sum::<f64>()
            / samples.len() as f64;
        let expected = 1.0 - (1.0f64 - 1.0 / 50.0).powi(50);
        assert!((mean_frac - expected).abs() < 0.02, "{mean_frac} vs {expected}");
    }

    #[test]
    fn ideal_bootstrap_is_point_mass() {
        let d = generate_ideal(&SimSpec::ideal(5)).unwrap();
        let cfg = BootstrapConfig::new(200, 1).unwrap();
        for method in RankingMethodSpec::all_variants(0.05) {
            let br = bootstrap_rankings(&d.tasks[0], LB, &method, &cfg).unwrap();
            let dist = br.distribution();
            for a in 0..5 {
                assert_eq!(dist.counts[a][a], 200, "{method}");
                assert_eq!(dist.intervals[a], ((a + 1) as f64, (a + 1) as f64));
                assert_eq!(dist.medians[a], (a + 1) as f64);
            }
            assert!(br.tau_samples().unwrap().values.iter().all(|&t| t == 1.0));
        }
    }

    #[test]
    fn identical_algorithms_tie_at_one() {
        let v = vec![0.3, 0.9, 0.1, 0.5];
        let t = TaskData::from_columns("T", &[("A", v.clone()), ("B", v)]).unwrap();
        let cfg = BootstrapConfig::new(50, 2).unwrap();
        let dist = bootstrap_rank_distribution(&t, LB, &RankingMethodSpec::mean_then_rank(), &cfg).unwrap();
        assert_eq!(dist.counts, vec![vec![50, 0], vec![50, 0]]);
        let err = bootstrap_tau_samples(&t, LB, &RankingMethodSpec::mean_then_rank(), &cfg);
        assert!(matches!(err, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn single_bootstrap_sample() {
        let d = generate_ideal(&SimSpec::ideal(5)).unwrap();
        let cfg = BootstrapConfig::new(1, 9).unwrap();
        let tau = bootstrap_tau_samples(&d.tasks[0], LB, &RankingMethodSpec::mean_then_rank(), &cfg).unwrap();
        assert_eq!(tau.values.len(), 1);
    }

    #[test]
    fn cross_task_examples() {
        let dist = cross_task_rank_distribution(&[ranking("T1", &[1, 2]), ranking("T2", &[1, 2])]).unwrap();
        assert_eq!(dist.counts, vec![vec![2, 0], vec![0, 2]]);

        let dist = cross_task_rank_distribution(&[ranking("T1", &[1, 3, 2]), ranking("T2", &[3, 1, 2])]).unwrap();
        assert_eq!(dist.counts[0], vec![1, 0, 1]);
        assert_eq!(dist.medians[0], 2.0);
        assert_eq!(dist.intervals[0], (1.0, 3.0));
        assert_eq!(dist.source, DistributionSource::AcrossTasks);

        let single = cross_task_rank_distribution(&[ranking("T1", &[2, 1])]).unwrap();
        assert_eq!(single.medians, vec![2.0, 1.0]);

        let mut other = ranking("T2", &[1, 2]);
        other.algorithms[0] = "X".into();
        assert!(cross_task_rank_distribution(&[ranking("T1", &[1, 2]), other]).is_err());
    }

    #[test]
    fn per_algorithm_reindexing() {
        let d = generate_ideal(&SimSpec { tasks: 2, ..SimSpec::ideal(5) }).unwrap();
        let cfg = BootstrapConfig::new(100, 4).unwrap();
        let method = RankingMethodSpec::rank_then_mean();
        let map = per_algorithm_task_bootstrap(&d, &method, &cfg).unwrap();
        assert_eq!(map.len(), 10);
        for (k, t) in d.tasks.iter().enumerate() {
            let dist = bootstrap_rank_distribution(t, LB, &method, &cfg.for_task(k)).unwrap();
            for (a, alg) in dist.labels.iter().enumerate() {
                let v = &map[&(alg.clone(), t.id.clone())];
                assert_eq!(v, &dist.counts[a]);
                assert_eq!(v.iter().filter(|c| **c > 0).count(), 1);
            }
        }
    }

    #[test]
    fn absent_algorithm_has_no_key() {
        use crate::data::ChallengeData;
        let t1 = TaskData::from_columns("T1", &[("A", vec![1.0, 2.0]), ("B", vec![0.0, 0.5]), ("C", vec![0.1, 0.2])]).unwrap();
        let t2 = TaskData::from_columns("T2", &[("A", vec![1.0, 2.0]), ("B", vec![0.0, 0.5])]).unwrap();
        let d = ChallengeData::new(vec![t1, t2], LB).unwrap();
        let cfg = BootstrapConfig::new(10, 4).unwrap();
        let method = RankingMethodSpec {
            scheme: Scheme::AggregateThenRank,
            ..RankingMethodSpec::mean_then_rank()
        };
        let map = per_algorithm_task_bootstrap(&d, &method, &cfg).unwrap();
        assert!(map.contains_key(&("C".to_string(), "T1".to_string())));
        assert!(!map.contains_key(&("C".to_string(), "T2".to_string())));
        let panels = per_algorithm_panels(&d.algorithms, &bootstrap_panels(&d, &method, &cfg));
        assert_eq!(panels[2].labels, vec!["T1"]);
    }

    fn bootstrap_panels(d: &ChallengeData, method: &RankingMethodSpec, cfg: &BootstrapConfig) -> Vec<RankDistribution> {
        d.tasks
            .iter()
            .enumerate()
            .map(|(k, t)| bootstrap_rank_distribution(t, d.direction, method, &cfg.for_task(k)).unwrap())
            .collect()
    }
}
