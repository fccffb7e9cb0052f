//! Per-task rankings and cross-task consensus.
//!
//! Three schemes are supported: aggregate the metric values over cases and
//! rank the aggregates, rank each case and aggregate the ranks, or count
//! significant pairwise wins. Ties always share the minimum rank of their
//! group unless [`TiePolicy::AverageRank`] is requested.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Direction, Grid, TaskData};
use crate::error::{Error, Result};
use crate::quantile::{mean, quantile};
use crate::rank_stats::significance::pairwise_p_values;
use crate::rank_stats::RankList;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    AggregateThenRank,
    RankThenAggregate,
    TestBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Aggregate {
    Mean,
    Median,
    Quantile(f64),
}

impl Aggregate {
    fn apply(self, values: &[f64]) -> f64 {
        match self {
            Aggregate::Mean => mean(values),
            Aggregate::Median => quantile(values, 0.5),
            Aggregate::Quantile(q) => quantile(values, q),
        }
        .expect("aggregate over a nonempty column")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingMethodSpec {
    pub scheme: Scheme,
    pub aggregate: Aggregate,
    /// Significance level; only used by [`Scheme::TestBased`].
    pub alpha: f64,
}

pub const DEFAULT_ALPHA: f64 = 0.05;

impl RankingMethodSpec {
    pub fn new(scheme: Scheme, aggregate: Aggregate, alpha: f64) -> Result<Self> {
        let spec = Self { scheme, aggregate, alpha };
        spec.check()?;
        Ok(spec)
    }

    pub fn mean_then_rank() -> Self {
        Self {
            scheme: Scheme::AggregateThenRank,
            aggregate: Aggregate::Mean,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn median_then_rank() -> Self {
        Self {
            aggregate: Aggregate::Median,
            ..Self::mean_then_rank()
        }
    }

    pub fn rank_then_mean() -> Self {
        Self {
            scheme: Scheme::RankThenAggregate,
            ..Self::mean_then_rank()
        }
    }

    pub fn rank_then_median() -> Self {
        Self {
            scheme: Scheme::RankThenAggregate,
            aggregate: Aggregate::Median,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn test_based(alpha: f64) -> Self {
        Self {
            scheme: Scheme::TestBased,
            aggregate: Aggregate::Mean,
            alpha,
        }
    }

    /// The five variants compared in method line plots.
    pub fn all_variants(alpha: f64) -> [Self; 5] {
        [
            Self::mean_then_rank(),
            Self::median_then_rank(),
            Self::rank_then_mean(),
            Self::rank_then_median(),
            Self::test_based(alpha),
        ]
    }

    fn check(&self) -> Result<()> {
        if let Aggregate::Quantile(q) = self.aggregate {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidConfig(format!("quantile {q} not in [0, 1]")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} not in (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

impl fmt::Display for RankingMethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let agg = match self.aggregate {
            Aggregate::Mean => "mean".to_string(),
            Aggregate::Median => "median".to_string(),
            Aggregate::Quantile(q) => format!("q{q}"),
        };
        match self.scheme {
            Scheme::AggregateThenRank => write!(f, "{agg}-then-rank"),
            Scheme::RankThenAggregate => write!(f, "rank-then-{agg}"),
            Scheme::TestBased => write!(f, "test-based"),
        }
    }
}

impl FromStr for RankingMethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-then-rank" => Ok(Self::mean_then_rank()),
            "median-then-rank" => Ok(Self::median_then_rank()),
            "rank-then-mean" => Ok(Self::rank_then_mean()),
            "rank-then-median" => Ok(Self::rank_then_median()),
            "test-based" => Ok(Self::test_based(DEFAULT_ALPHA)),
            other => Err(Error::InvalidConfig(format!("unknown ranking method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    MinRank,
    AverageRank,
}

fn rank_unchecked(scores: &[f64], direction: Direction, tie: TiePolicy) -> Vec<f64> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Best first; stable so equal scores keep input order.
    order.sort_by(|&a, &b| direction.orient(scores[b]).total_cmp(&direction.orient(scores[a])));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let r = match tie {
            TiePolicy::MinRank => (i + 1) as f64,
            TiePolicy::AverageRank => (i + 1 + j) as f64 / 2.0,
        };
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Ranks scores so that better scores get smaller ranks.
///
/// With [`TiePolicy::MinRank`], `k` tied scores at position `r` all get rank
/// `r` and the next score gets `r + k`. With [`TiePolicy::AverageRank`] they
/// get the mean of the positions they occupy.
pub fn assign_ranks(scores: &[f64], direction: Direction, tie: TiePolicy) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("no scores to rank".into()));
    }
    if let Some(v) = scores.iter().find(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput(format!("score {v} is not finite")));
    }
    Ok(rank_unchecked(scores, direction, tie))
}

fn min_ranks(scores: &[f64], direction: Direction) -> Vec<u32> {
    rank_unchecked(scores, direction, TiePolicy::MinRank)
        .into_iter()
        .map(|r| r as u32)
        .collect()
}

/// A ranking of the algorithms of one task (or a consensus over tasks).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    pub task: String,
    pub algorithms: Vec<String>,
    /// Min-rank tie pattern, aligned with `algorithms`.
    pub ranks: Vec<u32>,
    /// Scores that induced the ranks: aggregated metric values, aggregated
    /// per-case ranks, win counts or mean ranks depending on the method.
    pub aggregates: Vec<f64>,
    /// Which direction of `aggregates` is better.
    pub aggregate_direction: Direction,
    pub method: RankingMethodSpec,
}

impl Ranking {
    pub fn rank_of(&self, algorithm: &str) -> Option<u32> {
        self.algorithms.iter().position(|a| a == algorithm).map(|i| self.ranks[i])
    }

    /// Ranks recomputed from the aggregates with average ties.
    pub fn average_ranks(&self) -> Vec<f64> {
        rank_unchecked(&self.aggregates, self.aggregate_direction, TiePolicy::AverageRank)
    }

    pub fn rank_list(&self) -> RankList {
        RankList::new(self.algorithms.iter().cloned().zip(self.ranks.iter().map(|&r| r as f64)))
            .expect("ranks are positive")
    }

    pub fn average_rank_list(&self) -> RankList {
        RankList::new(self.algorithms.iter().cloned().zip(self.average_ranks())).expect("ranks are positive")
    }

    /// Algorithm indices from best to worst; ties keep input order.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.algorithms.len()).collect();
        idx.sort_by_key(|&i| self.ranks[i]);
        idx
    }

    /// Algorithm names from best to worst.
    pub fn ordered_algorithms(&self) -> Vec<String> {
        self.order().into_iter().map(|i| self.algorithms[i].clone()).collect()
    }

    /// The algorithm ranked first, if no other algorithm shares rank 1.
    pub fn unique_winner(&self) -> Option<&str> {
        let mut firsts = self.ranks.iter().enumerate().filter(|(_, r)| **r == 1);
        match (firsts.next(), firsts.next()) {
            (Some((i, _)), None) => Some(&self.algorithms[i]),
            _ => None,
        }
    }

    pub fn is_all_tied(&self) -> bool {
        self.ranks.iter().all(|&r| r == self.ranks[0])
    }

    /// Same ranking with algorithms reordered to `names`.
    pub fn aligned_to(&self, names: &[String]) -> Result<Ranking> {
        if names.len() != self.algorithms.len() {
            return Err(Error::AlgorithmSetMismatch);
        }
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.algorithms.iter().position(|a| a == n).ok_or(Error::AlgorithmSetMismatch))
            .collect::<Result<_>>()?;
        Ok(Ranking {
            algorithms: names.to_vec(),
            ranks: idx.iter().map(|&i| self.ranks[i]).collect(),
            aggregates: idx.iter().map(|&i| self.aggregates[i]).collect(),
            ..self.clone()
        })
    }
}

/// Ranks, aggregates and aggregate direction of one grid.
pub(crate) fn rank_grid(grid: &Grid, direction: Direction, spec: &RankingMethodSpec) -> Result<(Vec<u32>, Vec<f64>, Direction)> {
    let p = grid.n_algorithms();
    if p == 0 || grid.n_cases() == 0 {
        return Err(Error::EmptyInput("empty grid".into()));
    }
    match spec.scheme {
        Scheme::AggregateThenRank => {
            let agg: Vec<f64> = (0..p).map(|a| spec.aggregate.apply(&grid.column(a))).collect();
            Ok((min_ranks(&agg, direction), agg, direction))
        }
        Scheme::RankThenAggregate => {
            let mut case_ranks = vec![Vec::with_capacity(grid.n_cases()); p];
            for c in 0..grid.n_cases() {
                for (a, r) in rank_unchecked(grid.row(c), direction, TiePolicy::MinRank).into_iter().enumerate() {
                    case_ranks[a].push(r);
                }
            }
            let agg: Vec<f64> = case_ranks.iter().map(|r| spec.aggregate.apply(r)).collect();
            Ok((min_ranks(&agg, Direction::SmallerBetter), agg, Direction::SmallerBetter))
        }
        Scheme::TestBased => {
            let pv = pairwise_p_values(grid, direction)?;
            let wins: Vec<f64> = (0..p)
                .map(|i| (0..p).filter(|&j| j != i && pv[i][j] < spec.alpha).count() as f64)
                .collect();
            Ok((min_ranks(&wins, Direction::LargerBetter), wins, Direction::LargerBetter))
        }
    }
}

/// Ranks the algorithms of one task with the given method.
pub fn rank_task(task: &TaskData, direction: Direction, spec: &RankingMethodSpec) -> Result<Ranking> {
    spec.check()?;
    let grid = task.grid(direction)?;
    let (ranks, aggregates, aggregate_direction) = rank_grid(&grid, direction, spec)?;
    Ok(Ranking {
        task: task.id.clone(),
        algorithms: task.algorithms.clone(),
        ranks,
        aggregates,
        aggregate_direction,
        method: *spec,
    })
}

pub fn aggregate_then_rank(task: &TaskData, direction: Direction, aggregate: Aggregate) -> Result<Ranking> {
    rank_task(
        task,
        direction,
        &RankingMethodSpec {
            scheme: Scheme::AggregateThenRank,
            aggregate,
            alpha: DEFAULT_ALPHA,
        },
    )
}

pub fn rank_then_aggregate(task: &TaskData, direction: Direction, aggregate: Aggregate) -> Result<Ranking> {
    rank_task(
        task,
        direction,
        &RankingMethodSpec {
            scheme: Scheme::RankThenAggregate,
            aggregate,
            alpha: DEFAULT_ALPHA,
        },
    )
}

/// Ranks by the number of unadjusted one-sided Wilcoxon wins at `alpha`.
pub fn test_based_ranking(task: &TaskData, direction: Direction, alpha: f64) -> Result<Ranking> {
    rank_task(task, direction, &RankingMethodSpec::test_based(alpha))
}

/// Ranks algorithms by their (weighted) mean average-tie rank over tasks.
///
/// Tasks absent from `weights` get weight 1.
pub fn consensus_ranking(rankings: &[Ranking], weights: Option<&HashMap<String, f64>>) -> Result<Ranking> {
    let first = rankings.first().ok_or_else(|| Error::EmptyInput("no rankings".into()))?;
    let names = first.algorithms.clone();
    let aligned: Vec<Ranking> = rankings.iter().map(|r| r.aligned_to(&names)).collect::<Result<_>>()?;
    if let Some(w) = weights {
        for (task, &v) in w {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveWeight(task.clone()));
            }
            if !rankings.iter().any(|r| &r.task == task) {
                return Err(Error::UnknownTask(task.clone()));
            }
        }
    }
    let p = names.len();
    let mut sums = vec![0.0; p];
    let mut total_weight = 0.0;
    for r in &aligned {
        let w = weights.and_then(|w| w.get(&r.task)).copied().unwrap_or(1.0);
        total_weight += w;
        for (s, ar) in sums.iter_mut().zip(r.average_ranks()) {
            *s += w * ar;
        }
    }
    let means: Vec<f64> = sums.into_iter().map(|s| s / total_weight).collect();
    Ok(Ranking {
        task: "consensus".into(),
        algorithms: names,
        ranks: min_ranks(&means, Direction::SmallerBetter),
        aggregates: means,
        aggregate_direction: Direction::SmallerBetter,
        method: first.method,
    })
}

/// Writes `task,algorithm,rank,aggregate,method` rows.
pub fn write_rankings_csv<W: Write>(rankings: &[Ranking], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(["task", "algorithm", "rank", "aggregate", "method"]).map_err(io)?;
    for r in rankings {
        let method = r.method.to_string();
        for i in r.order() {
            w.write_record([
                r.task.as_str(),
                r.algorithms[i].as_str(),
                &r.ranks[i].to_string(),
                &format!("{:?}", r.aggregates[i]),
                &method,
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LB: Direction = Direction::LargerBetter;

    fn task(cols: &[(&str, Vec<f64>)]) -> TaskData {
        TaskData::from_columns("T", cols).unwrap()
    }

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
    fn assign_ranks_examples() {
        let s = [0.9, 0.7, 0.7, 0.5];
        assert_eq!(assign_ranks(&s, LB, TiePolicy::MinRank).unwrap(), vec![1.0, 2.0, 2.0, 4.0]);
        assert_eq!(assign_ranks(&s, LB, TiePolicy::AverageRank).unwrap(), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(assign_ranks(&[0.3], LB, TiePolicy::MinRank).unwrap(), vec![1.0]);
        assert_eq!(
            assign_ranks(&s, Direction::SmallerBetter, TiePolicy::MinRank).unwrap(),
            vec![4.0, 2.0, 2.0, 1.0]
        );
        assert!(matches!(assign_ranks(&[], LB, TiePolicy::MinRank), Err(Error::EmptyInput(_))));
        assert!(assign_ranks(&[f64::NAN], LB, TiePolicy::MinRank).is_err());
    }

    #[test]
    fn aggregate_then_rank_examples() {
        let t = task(&[("A", vec![0.9, 0.8]), ("B", vec![0.7, 0.6])]);
        let r = aggregate_then_rank(&t, LB, Aggregate::Mean).unwrap();
        assert!((r.aggregates[0] - 0.85).abs() < 1e-12 && (r.aggregates[1] - 0.65).abs() < 1e-12);
        assert_eq!(r.ranks, vec![1, 2]);

        let t = task(&[("A", vec![1.0, 0.0]), ("B", vec![0.6, 0.5])]);
        let r = aggregate_then_rank(&t, LB, Aggregate::Median).unwrap();
        assert_eq!(r.aggregates[0], 0.5);
        assert!((r.aggregates[1] - 0.55).abs() < 1e-12);
        assert_eq!(r.ranks, vec![2, 1]);
    }

    #[test]
    fn rank_then_aggregate_examples() {
        let t = task(&[("A", vec![0.9, 0.8]), ("B", vec![0.7, 0.6])]);
        let r = rank_then_aggregate(&t, LB, Aggregate::Mean).unwrap();
        assert_eq!(r.aggregates, vec![1.0, 2.0]);
        assert_eq!(r.ranks, vec![1, 2]);

        let t = task(&[("A", vec![0.9, 0.1]), ("B", vec![0.7, 0.6])]);
        let r = rank_then_aggregate(&t, LB, Aggregate::Mean).unwrap();
        assert_eq!(r.ranks, vec![1, 1]);
    }

    #[test]
    fn test_based_examples() {
        let v = vec![0.2, 0.4, 0.6, 0.1, 0.9];
        let t = task(&[("A", v.clone()), ("B", v.clone()), ("C", v)]);
        let r = test_based_ranking(&t, LB, 0.05).unwrap();
        assert_eq!(r.aggregates, vec![0.0; 3]);
        assert_eq!(r.ranks, vec![1, 1, 1]);

        let b = vec![0.10, 0.20, 0.30, 0.40, 0.50, 0.60];
        let a: Vec<f64> = b.iter().enumerate().map(|(i, v)| v + 0.01 * (i + 1) as f64).collect();
        let t = task(&[("A", a), ("B", b)]);
        let r = test_based_ranking(&t, LB, 0.05).unwrap();
        assert_eq!(r.aggregates, vec![1.0, 0.0]);
        assert_eq!(r.ranks, vec![1, 2]);
    }

    #[test]
    fn worst_rank_missing_cell_ranks_last_on_case() {
        use crate::data::Cell;
        let t = TaskData::new(
            "T",
            vec!["c1".into()],
            vec!["A".into(), "B".into(), "C".into()],
            vec![Cell::Observed(0.5), Cell::WorstRank, Cell::Observed(0.1)],
        )
        .unwrap();
        let r = rank_then_aggregate(&t, LB, Aggregate::Mean).unwrap();
        assert_eq!(r.ranks, vec![1, 3, 2]);
    }

    #[test]
    fn consensus_examples() {
        let r1 = ranking("T1", &[1, 2]);
        let r2 = ranking("T2", &[2, 1]);
        let c = consensus_ranking(&[r1.clone(), r2.clone()], None).unwrap();
        assert_eq!(c.aggregates, vec![1.5, 1.5]);
        assert_eq!(c.ranks, vec![1, 1]);

        let only = consensus_ranking(std::slice::from_ref(&r1), None).unwrap();
        assert_eq!(only.ranks, r1.ranks);

        let w: HashMap<String, f64> = [("T1".to_string(), 2.0), ("T2".to_string(), 1.0)].into();
        let c = consensus_ranking(&[r1.clone(), r2.clone()], Some(&w)).unwrap();
        assert!((c.aggregates[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((c.aggregates[1] - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(c.ranks, vec![1, 2]);

        let bad: HashMap<String, f64> = [("T1".to_string(), 0.0)].into();
        assert!(matches!(consensus_ranking(std::slice::from_ref(&r1), Some(&bad)), Err(Error::NonPositiveWeight(_))));
        let mut other = ranking("T3", &[1, 2]);
        other.algorithms[1] = "Z".into();
        assert!(matches!(consensus_ranking(&[r1, other], None), Err(Error::AlgorithmSetMismatch)));
    }

    #[test]
    fn consensus_uses_average_ties() {
        // T1 ranks A1 first and ties A2, A3 (min ranks 2, 2 -> average 2.5 each).
        let mut t1 = ranking("T1", &[1, 2, 2]);
        t1.aggregates = vec![1.0, 2.0, 2.0];
        let t2 = ranking("T2", &[3, 1, 2]);
        let c = consensus_ranking(&[t1, t2], None).unwrap();
        assert_eq!(c.aggregates, vec![2.0, 1.75, 2.25]);
        assert_eq!(c.ranks, vec![2, 1, 3]);
    }

    #[test]
    fn method_names_round_trip() {
        for spec in RankingMethodSpec::all_variants(DEFAULT_ALPHA) {
            assert_eq!(spec.to_string().parse::<RankingMethodSpec>().unwrap(), spec);
        }
        assert!("nope".parse::<RankingMethodSpec>().is_err());
        assert!(RankingMethodSpec::new(Scheme::AggregateThenRank, Aggregate::Quantile(1.5), 0.05).is_err());
    }

    #[test]
    fn rankings_csv() {
        let mut buf = Vec::new();
        write_rankings_csv(&[ranking("T1", &[2, 1])], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "task,algorithm,rank,aggregate,method\nT1,A2,1,1.0,rank-then-mean\nT1,A1,2,2.0,rank-then-mean\n"
        );
    }

    #[test]
    fn winner() {
        assert_eq!(ranking("T", &[2, 1, 3]).unique_winner(), Some("A2"));
        assert_eq!(ranking("T", &[1, 1, 3]).unique_winner(), None);
    }
}
