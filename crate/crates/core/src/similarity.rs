//! Similarity of tasks in terms of their algorithm rankings.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank_stats::{spearman_distance, spearman_footrule};
use crate::ranking::Ranking;
use crate::rng::{Domain, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceMeasure {
    Footrule,
    SpearmanDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskDistanceMatrix {
    pub tasks: Vec<String>,
    pub d: Vec<Vec<f64>>,
    pub measure: DistanceMeasure,
}

impl TaskDistanceMatrix {
    /// Validates shape, symmetry and the zero diagonal.
    pub fn new(tasks: Vec<String>, d: Vec<Vec<f64>>, measure: DistanceMeasure) -> Result<Self> {
        let m = tasks.len();
        if d.len() != m || d.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidConfig("distance matrix shape does not match task count".into()));
        }
        for i in 0..m {
            if d[i][i] != 0.0 {
                return Err(Error::InvalidConfig("distance matrix diagonal must be zero".into()));
            }
            for j in 0..m {
                if d[i][j] != d[j][i] || !(d[i][j] >= 0.0) {
                    return Err(Error::InvalidConfig("distance matrix must be symmetric and nonnegative".into()));
                }
            }
        }
        Ok(Self { tasks, d, measure })
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.into());
        let mut header = vec!["task".to_string()];
        header.extend(self.tasks.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for (i, t) in self.tasks.iter().enumerate() {
            let mut row = vec![t.clone()];
            row.extend(self.d[i].iter().map(|v| format!("{v:?}")));
            w.write_record(&row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Pairwise distances between the tasks' average-tie rank lists.
pub fn task_distance_matrix(rankings: &[Ranking], measure: DistanceMeasure) -> Result<TaskDistanceMatrix> {
    let lists: Vec<_> = rankings.iter().map(Ranking::average_rank_list).collect();
    let m = lists.len();
    let mut d = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let v = match measure {
                DistanceMeasure::Footrule => spearman_footrule(&lists[i], &lists[j]),
                DistanceMeasure::SpearmanDistance => spearman_distance(&lists[i], &lists[j]),
            }
            .map_err(|e| match e {
                Error::KeyMismatch => Error::AlgorithmSetMismatch,
                other => other,
            })?;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(TaskDistanceMatrix {
        tasks: rankings.iter().map(|r| r.task.clone()).collect(),
        d,
        measure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DendrogramNode {
    Leaf(String),
    Merge {
        left: Box<DendrogramNode>,
        right: Box<DendrogramNode>,
        height: f64,
    },
}

impl DendrogramNode {
    pub fn height(&self) -> f64 {
        match self {
            DendrogramNode::Leaf(_) => 0.0,
            DendrogramNode::Merge { height, .. } => *height,
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            DendrogramNode::Leaf(name) => out.push(name),
            DendrogramNode::Merge { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    fn smallest_label(&self) -> &str {
        let mut leaves = Vec::new();
        self.collect_leaves(&mut leaves);
        leaves.into_iter().min().expect("node has leaves")
    }

    fn newick(&self, parent_height: f64, out: &mut String) {
        match self {
            DendrogramNode::Leaf(name) => out.push_str(&newick_label(name)),
            DendrogramNode::Merge { left, right, height } => {
                out.push('(');
                left.newick(*height, out);
                out.push(',');
                right.newick(*height, out);
                out.push(')');
            }
        }
        let _ = write!(out, ":{}", parent_height - self.height());
    }
}

fn newick_label(name: &str) -> String {
    if name.chars().any(|c| "()[]':;, \t".contains(c)) {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

/// Binary merge tree over task labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    pub root: DendrogramNode,
}

impl Dendrogram {
    /// Leaves in left-to-right traversal order.
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out
    }

    /// Merge heights in the order the merges happened (bottom-up).
    pub fn merge_heights(&self) -> Vec<f64> {
        fn walk(n: &DendrogramNode, out: &mut Vec<f64>) {
            if let DendrogramNode::Merge { left, right, height } = n {
                walk(left, out);
                walk(right, out);
                out.push(*height);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort_by(f64::total_cmp);
        out
    }

    /// Newick text; branch lengths are height differences.
    pub fn to_newick(&self) -> String {
        let mut s = String::new();
        match &self.root {
            DendrogramNode::Leaf(name) => s.push_str(&newick_label(name)),
            DendrogramNode::Merge { left, right, height } => {
                s.push('(');
                left.newick(*height, &mut s);
                s.push(',');
                right.newick(*height, &mut s);
                s.push(')');
            }
        }
        s.push(';');
        s
    }
}

/// Complete-linkage agglomerative clustering.
///
/// Equal linkage distances are resolved by merging the pair whose smallest
/// task labels come first lexicographically.
pub fn hierarchical_cluster(dm: &TaskDistanceMatrix) -> Result<Dendrogram> {
    let m = dm.len();
    if m < 2 {
        return Err(Error::TooFewTasks(m));
    }
    let mut clusters: Vec<(DendrogramNode, Vec<usize>)> = dm
        .tasks
        .iter()
        .enumerate()
        .map(|(i, t)| (DendrogramNode::Leaf(t.clone()), vec![i]))
        .collect();
    while clusters.len() > 1 {
        let mut best: Option<(f64, String, String, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let dist = clusters[a]
                    .1
                    .iter()
                    .flat_map(|&i| clusters[b].1.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| dm.d[i][j])
                    .fold(f64::NEG_INFINITY, f64::max);
                let la = clusters[a].0.smallest_label().to_string();
                let lb = clusters[b].0.smallest_label().to_string();
                let (first, second, ia, ib) = if la <= lb { (la, lb, a, b) } else { (lb, la, b, a) };
                let better = match &best {
                    None => true,
                    Some((bd, bf, bs, _, _)) => dist < *bd || (dist == *bd && (&first, &second) < (bf, bs)),
                };
                if better {
                    best = Some((dist, first, second, ia, ib));
                }
            }
        }
        let (height, _, _, ia, ib) = best.expect("at least one pair");
        let (hi, lo) = (ia.max(ib), ia.min(ib));
        let c_hi = clusters.remove(hi);
        let c_lo = clusters.remove(lo);
        let (left, right) = if ia < ib { (c_lo, c_hi) } else { (c_hi, c_lo) };
        let members = left.1.iter().chain(&right.1).copied().collect();
        let node = DendrogramNode::Merge {
            left: Box::new(left.0),
            right: Box::new(right.0),
            height,
        };
        clusters.insert(lo, (node, members));
    }
    Ok(Dendrogram {
        root: clusters.pop().expect("root").0,
    })
}

/// How distances become target edge lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EdgeTransform {
    /// `exp(growth * d)`
    Exponential,
    /// `(1 + growth)^d`
    Compound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub growth: f64,
    pub transform: EdgeTransform,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop when the relative stress decrease falls below this.
    pub tolerance: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            growth: 0.05,
            transform: EdgeTransform::Exponential,
            seed: 0,
            max_iterations: 500,
            tolerance: 1e-8,
        }
    }
}

impl LayoutConfig {
    pub fn target_length(&self, d: f64) -> f64 {
        match self.transform {
            EdgeTransform::Exponential => (self.growth * d).exp(),
            EdgeTransform::Compound => (1.0 + self.growth).powf(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkLayout {
    pub tasks: Vec<String>,
    pub positions: Vec<(f64, f64)>,
    /// Target lengths for `i < j`, row by row.
    pub edge_targets: Vec<((String, String), f64)>,
    /// Unique first-ranked algorithm per task.
    pub winners: Vec<Option<String>>,
    /// Stress after initialization and after every iteration.
    pub stress_history: Vec<f64>,
}

impl NetworkLayout {
    pub fn stress(&self) -> f64 {
        *self.stress_history.last().expect("stress recorded")
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["task", "x", "y", "winner"]).map_err(io)?;
        for (i, t) in self.tasks.iter().enumerate() {
            w.write_record([
                t.clone(),
                format!("{:?}", self.positions[i].0),
                format!("{:?}", self.positions[i].1),
                self.winners[i].clone().unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Unique winner of each ranking, `None` when rank 1 is shared.
pub fn winners(rankings: &[Ranking]) -> Vec<Option<String>> {
    rankings.iter().map(|r| r.unique_winner().map(str::to_string)).collect()
}

fn stress(x: &[(f64, f64)], target: &[Vec<f64>]) -> f64 {
    let m = x.len();
    let mut s = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            let d = (x[i].0 - x[j].0).hypot(x[i].1 - x[j].1);
            s += (d - target[i][j]).powi(2);
        }
    }
    s
}

/// Places tasks in the plane so that distances approximate the target edge
/// lengths, by stress majorization (unit weights) from a seeded start.
pub fn network_layout(dm: &TaskDistanceMatrix, winners: &[Option<String>], cfg: &LayoutConfig) -> Result<NetworkLayout> {
    let m = dm.len();
    if m < 2 {
        return Err(Error::TooFewTasks(m));
    }
    if !(cfg.growth > 0.0) {
        return Err(Error::InvalidConfig(format!("growth {} must be positive", cfg.growth)));
    }
    if winners.len() != m {
        return Err(Error::InvalidConfig("one winner entry per task required".into()));
    }
    let target: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 0.0 } else { cfg.target_length(dm.d[i][j]) }).collect())
        .collect();
    let scale = target.iter().flatten().copied().fold(0.0, f64::max);
    let mut rng = Stream::new(cfg.seed, Domain::Layout, 0);
    let mut x: Vec<(f64, f64)> = (0..m)
        .map(|_| ((rng.uniform() - 0.5) * scale, (rng.uniform() - 0.5) * scale))
        .collect();
    let mut history = vec![stress(&x, &target)];
    for _ in 0..cfg.max_iterations {
        let mut next = vec![(0.0, 0.0); m];
        for i in 0..m {
            let (mut sx, mut sy) = (0.0, 0.0);
            for j in 0..m {
                if i == j {
                    continue;
                }
                let (dx, dy) = (x[i].0 - x[j].0, x[i].1 - x[j].1);
                let dist = dx.hypot(dy);
                let ratio = if dist > 0.0 { target[i][j] / dist } else { 0.0 };
                sx += ratio * dx;
                sy += ratio * dy;
            }
            next[i] = (sx / m as f64, sy / m as f64);
        }
        let prev = *history.last().expect("nonempty");
        let s = stress(&next, &target);
        x = next;
        history.push(s);
        if prev <= 0.0 || (prev - s) / prev < cfg.tolerance || s < 1e-24 * scale * scale {
            break;
        }
    }
    let cx = x.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let cy = x.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let positions = x.into_iter().map(|(a, b)| (a - cx, b - cy)).collect();
    let mut edge_targets = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            edge_targets.push(((dm.tasks[i].clone(), dm.tasks[j].clone()), target[i][j]));
        }
    }
    Ok(NetworkLayout {
        tasks: dm.tasks.clone(),
        positions,
        edge_targets,
        winners: winners.to_vec(),
        stress_history: history,
    })
}
