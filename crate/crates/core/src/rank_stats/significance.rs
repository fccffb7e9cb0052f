use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::holm::holm_adjust;
use super::wilcoxon::wilcoxon_signed_rank_one_sided;
use crate::data::{Direction, Grid, TaskData};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Adjustment {
    Holm,
    None,
}

/// Pairwise one-sided test results for one task.
///
/// Entry `[i][j]` refers to the hypothesis "algorithm i is superior to
/// algorithm j". Diagonal p-values are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceMatrix {
    pub algorithms: Vec<String>,
    pub p_raw: Vec<Vec<f64>>,
    pub p_adj: Vec<Vec<f64>>,
    pub superior: Vec<Vec<bool>>,
    pub alpha: f64,
    pub adjustment: Adjustment,
}

impl SignificanceMatrix {
    pub fn n(&self) -> usize {
        self.algorithms.len()
    }

    /// Number of algorithms each algorithm is significantly superior to.
    pub fn win_counts(&self) -> Vec<usize> {
        self.superior.iter().map(|row| row.iter().filter(|s| **s).count()).collect()
    }

    pub fn any_significant(&self) -> bool {
        self.superior.iter().flatten().any(|s| *s)
    }

    /// Writes `pair,raw_p,adj_p,significant` with pairs as `A>B`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["pair", "raw_p", "adj_p", "significant"])
            .map_err(|e| Error::Io(e.into()))?;
        for i in 0..self.n() {
            for j in 0..self.n() {
                if i == j {
                    continue;
                }
                w.write_record([
                    format!("{}>{}", self.algorithms[i], self.algorithms[j]),
                    format!("{:?}", self.p_raw[i][j]),
                    format!("{:?}", self.p_adj[i][j]),
                    self.superior[i][j].to_string(),
                ])
                .map_err(|e| Error::Io(e.into()))?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Raw one-sided p-values for every ordered pair of algorithms.
pub(crate) fn pairwise_p_values(grid: &Grid, direction: Direction) -> Result<Vec<Vec<f64>>> {
    let p = grid.n_algorithms();
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|a| grid.column(a).into_iter().map(|v| direction.orient(v)).collect())
        .collect();
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let results: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| wilcoxon_signed_rank_one_sided(&columns[i], &columns[j]).map(|r| r.p_value))
        .collect::<Result<_>>()?;
    let mut out = vec![vec![f64::NAN; p]; p];
    for (&(i, j), pv) in pairs.iter().zip(results) {
        out[i][j] = pv;
    }
    Ok(out)
}

pub fn significance_matrix_grid(
    grid: &Grid,
    algorithms: &[String],
    direction: Direction,
    alpha: f64,
    adjustment: Adjustment,
) -> Result<SignificanceMatrix> {
    let p = grid.n_algorithms();
    if p < 2 {
        return Err(Error::TooFewAlgorithms { required: 2, found: p });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} not in (0, 1)")));
    }
    let p_raw = pairwise_p_values(grid, direction)?;
    let flat: Vec<f64> = (0..p)
        .flat_map(|i| (0..p).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| p_raw[i][j])
        .collect();
    let adjusted = match adjustment {
        Adjustment::Holm => holm_adjust(&flat)?,
        Adjustment::None => flat,
    };
    let mut p_adj = vec![vec![f64::NAN; p]; p];
    let mut superior = vec![vec![false; p]; p];
    let mut k = 0;
    for i in 0..p {
        for j in 0..p {
            if i != j {
                p_adj[i][j] = adjusted[k];
                superior[i][j] = adjusted[k] < alpha;
                k += 1;
            }
        }
    }
    Ok(SignificanceMatrix {
        algorithms: algorithms.to_vec(),
        p_raw,
        p_adj,
        superior,
        alpha,
        adjustment,
    })
}

/// Pairwise one-sided Wilcoxon tests for a task, adjusted jointly over all
/// `p (p - 1)` ordered pairs.
pub fn significance_matrix(
    task: &TaskData,
    direction: Direction,
    alpha: f64,
    adjustment: Adjustment,
) -> Result<SignificanceMatrix> {
    let grid = task.grid(direction)?;
    significance_matrix_grid(&grid, &task.algorithms, direction, alpha, adjustment)
}
