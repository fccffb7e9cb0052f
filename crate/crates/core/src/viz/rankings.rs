//! Plots of rankings, their bootstrap distributions and pairwise significance.

use super::scene::{tick_label, Anchor, Axis, AxisSide, LegendEntry, Mark, Scale, Shape, VectorScene};
use super::color;
use crate::data::{Direction, TaskData};
use crate::error::{Error, Result};
use crate::rank_stats::SignificanceMatrix;
use crate::ranking::{rank_task, Ranking, RankingMethodSpec};
use crate::stability::RankDistribution;

const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;
const RIGHT: f64 = 20.0;
const BOTTOM: f64 = 90.0;

/// Number of strict order inversions between consecutive rankings, summed
/// over all algorithm pairs. Ties on either side do not count.
pub fn line_crossings(rankings: &[Ranking]) -> usize {
    let mut total = 0;
    for w in rankings.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let names = &a.algorithms;
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                let (Some(bi), Some(bj)) = (b.rank_of(&names[i]), b.rank_of(&names[j])) else {
                    continue;
                };
                let (ai, aj) = (a.ranks[i], a.ranks[j]);
                if (ai < aj && bi > bj) || (ai > aj && bi < bj) {
                    total += 1;
                }
            }
        }
    }
    total
}

/// One line per algorithm connecting its rank under each ranking method.
pub fn line_plot_methods(task: &TaskData, direction: Direction, methods: &[RankingMethodSpec]) -> Result<VectorScene> {
    if methods.len() < 2 {
        return Err(Error::InvalidConfig("line plot needs at least two ranking methods".into()));
    }
    let rankings = methods
        .iter()
        .map(|m| rank_task(task, direction, m))
        .collect::<Result<Vec<_>>>()?;
    let p = task.n_algorithms();
    let col_w = 90.0;
    let row_h = (240.0 / p as f64).clamp(12.0, 40.0);
    let width = LEFT + col_w * methods.len() as f64 + RIGHT + 40.0;
    let bottom = TOP + row_h * p as f64;
    let mut sc = VectorScene::new(width, bottom + BOTTOM, format!("Ranking robustness: {}", task.id));
    let x = |k: usize| LEFT + col_w * (k as f64 + 0.5);
    let y = |r: u32| TOP + row_h * (r as f64 - 0.5);
    for (a, name) in task.algorithms.iter().enumerate() {
        let points: Vec<(f64, f64)> = rankings.iter().enumerate().map(|(k, r)| (x(k), y(r.ranks[a]))).collect();
        sc.push(
            Mark::new(Shape::Polyline { points: points.clone() }, "rank-line")
                .stroke(color(a), 1.5)
                .data("algorithm", name),
        );
        for (k, (px, py)) in points.into_iter().enumerate() {
            sc.push(
                Mark::new(Shape::Circle { cx: px, cy: py, r: 3.0 }, "rank-point")
                    .fill(color(a))
                    .data("algorithm", name)
                    .data("method", methods[k])
                    .data("rank", rankings[k].ranks[a]),
            );
        }
    }
    sc.axes.push(Axis {
        side: AxisSide::Left,
        at: LEFT,
        from: TOP,
        to: bottom,
        ticks: (1..=p as u32).map(|r| (y(r), r.to_string())).collect(),
        label: "rank".into(),
        rotate_labels: false,
    });
    sc.axes.push(Axis {
        side: AxisSide::Bottom,
        at: bottom,
        from: LEFT,
        to: LEFT + col_w * methods.len() as f64,
        ticks: methods.iter().enumerate().map(|(k, m)| (x(k), m.to_string())).collect(),
        label: "ranking method".into(),
        rotate_labels: true,
    });
    sc.legend = task
        .algorithms
        .iter()
        .enumerate()
        .map(|(a, l)| LegendEntry {
            label: l.clone(),
            color: color(a).into(),
        })
        .collect();
    Ok(sc)
}

/// Blob plot of a rank distribution: blob area proportional to the rank
/// frequency, with the median rank crossed and the interval drawn as a line.
/// Columns follow `ordering`.
pub fn blob_plot(dist: &RankDistribution, ordering: &[String]) -> Result<VectorScene> {
    let d = dist.reordered(ordering);
    if d.labels.len() != ordering.len() {
        return Err(Error::AlgorithmSetMismatch);
    }
    let cols = d.labels.len();
    let ranks = d.max_rank();
    if cols == 0 || ranks == 0 || d.total == 0 {
        return Err(Error::EmptyInput("empty rank distribution".into()));
    }
    let col_w: f64 = 40.0;
    let row_h = 30.0;
    let max_r = 0.45 * col_w.min(row_h);
    let width = LEFT + col_w * cols as f64 + RIGHT;
    let bottom = TOP + row_h * ranks as f64;
    let mut sc = VectorScene::new(width, bottom + BOTTOM, d.title.clone());
    let x = |k: usize| LEFT + col_w * (k as f64 + 0.5);
    let y = Scale::new((0.5, ranks as f64 + 0.5), (TOP, bottom));
    if cols > 1 && cols == ranks {
        sc.push(
            Mark::new(
                Shape::Line {
                    x1: x(0),
                    y1: y.map(1.0),
                    x2: x(cols - 1),
                    y2: y.map(ranks as f64),
                },
                "diagonal",
            )
            .stroke("#bbbbbb", 1.0),
        );
    }
    for k in 0..cols {
        for r in 1..=ranks {
            let f = d.frequency(k, r);
            if f == 0.0 {
                continue;
            }
            sc.push(
                Mark::new(
                    Shape::Circle {
                        cx: x(k),
                        cy: y.map(r as f64),
                        r: max_r * f.sqrt(),
                    },
                    "blob",
                )
                .fill(color(k))
                .opacity(0.8)
                .data("label", &d.labels[k])
                .data("rank", r)
                .data("frequency", f),
            );
        }
        let (lo, hi) = d.intervals[k];
        sc.push(
            Mark::new(
                Shape::Line {
                    x1: x(k),
                    y1: y.map(lo),
                    x2: x(k),
                    y2: y.map(hi),
                },
                "interval-line",
            )
            .stroke("#000000", 1.0)
            .data("label", &d.labels[k])
            .data("low", lo)
            .data("high", hi),
        );
        let (cx, cy, s) = (x(k), y.map(d.medians[k]), 4.0);
        sc.push(
            Mark::new(
                Shape::Polyline {
                    points: vec![(cx - s, cy - s), (cx + s, cy + s), (cx, cy), (cx - s, cy + s), (cx + s, cy - s)],
                },
                "median-cross",
            )
            .stroke("#000000", 1.5)
            .data("label", &d.labels[k])
            .data("median", d.medians[k]),
        );
    }
    sc.axes.push(Axis {
        side: AxisSide::Left,
        at: LEFT,
        from: TOP,
        to: bottom,
        ticks: (1..=ranks).map(|r| (y.map(r as f64), r.to_string())).collect(),
        label: "rank".into(),
        rotate_labels: false,
    });
    sc.axes.push(Axis {
        side: AxisSide::Bottom,
        at: bottom,
        from: LEFT,
        to: LEFT + col_w * cols as f64,
        ticks: (0..cols).map(|k| (x(k), d.labels[k].clone())).collect(),
        label: String::new(),
        rotate_labels: true,
    });
    Ok(sc)
}

const SUPERIOR: &str = "#f1c40f";
const NOT_SUPERIOR: &str = "#3b6fb6";

/// Pairwise significance grid. The x axis is the algorithm tested for
/// superiority, the y axis its competitor, with the first algorithm of
/// `ordering` at the bottom. Yellow cells mark significant superiority.
pub fn significance_map_plot(sm: &SignificanceMatrix, ordering: &[String]) -> Result<VectorScene> {
    let idx: Vec<usize> = ordering
        .iter()
        .map(|a| sm.algorithms.iter().position(|x| x == a).ok_or(Error::AlgorithmSetMismatch))
        .collect::<Result<_>>()?;
    let p = idx.len();
    if p == 0 {
        return Err(Error::EmptyInput("no algorithms to plot".into()));
    }
    let cell = (300.0 / p as f64).clamp(12.0, 40.0);
    let width = LEFT + cell * p as f64 + RIGHT;
    let bottom = TOP + cell * p as f64;
    let mut sc = VectorScene::new(width, bottom + BOTTOM, "Significance map".to_string());
    for (xi, &i) in idx.iter().enumerate() {
        for (yj, &j) in idx.iter().enumerate() {
            let x = LEFT + cell * xi as f64;
            let y = bottom - cell * (yj as f64 + 1.0);
            let (class, fill) = if i == j {
                ("sig-cell sig-diagonal", "#ffffff")
            } else if sm.superior[i][j] {
                ("sig-cell sig-superior", SUPERIOR)
            } else {
                ("sig-cell sig-not-superior", NOT_SUPERIOR)
            };
            let mut m = Mark::new(Shape::Rect { x, y, w: cell, h: cell }, class)
                .fill(fill)
                .stroke("#ffffff", 0.5)
                .data("x", &sm.algorithms[i])
                .data("y", &sm.algorithms[j]);
            if i != j {
                m = m.data("p", sm.p_adj[i][j]);
            }
            sc.push(m);
        }
    }
    let centers = |k: usize| cell * (k as f64 + 0.5);
    sc.axes.push(Axis {
        side: AxisSide::Left,
        at: LEFT,
        from: TOP,
        to: bottom,
        ticks: (0..p).map(|k| (bottom - centers(k), ordering[k].clone())).collect(),
        label: "algorithm".into(),
        rotate_labels: false,
    });
    sc.axes.push(Axis {
        side: AxisSide::Bottom,
        at: bottom,
        from: LEFT,
        to: LEFT + cell * p as f64,
        ticks: (0..p).map(|k| (LEFT + centers(k), ordering[k].clone())).collect(),
        label: "algorithm".into(),
        rotate_labels: true,
    });
    sc.legend = vec![
        LegendEntry {
            label: "superior".into(),
            color: SUPERIOR.into(),
        },
        LegendEntry {
            label: "not superior".into(),
            color: NOT_SUPERIOR.into(),
        },
    ];
    sc.push(Mark::new(
        Shape::Text {
            x: LEFT,
            y: bottom + BOTTOM - 8.0,
            text: format!("alpha = {}", tick_label(sm.alpha)),
            anchor: Anchor::Start,
            size: 10.0,
        },
        "sig-note",
    ));
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_stats::{significance_matrix, Adjustment};
    use crate::simgen::{generate_ideal, SimSpec};
    use crate::stability::{bootstrap_rank_distribution, BootstrapConfig};

    fn names(p: usize) -> Vec<String> {
        (1..=p).map(|i| format!("A{i}")).collect()
    }

    #[test]
    fn ideal_lines_do_not_cross() {
        let d = generate_ideal(&SimSpec::ideal(3)).unwrap();
        let methods = RankingMethodSpec::all_variants(0.05);
        let sc = line_plot_methods(&d.tasks[0], Direction::LargerBetter, &methods).unwrap();
        assert_eq!(sc.count_class("rank-line"), 5);
        let rankings: Vec<Ranking> = methods
            .iter()
            .map(|m| rank_task(&d.tasks[0], Direction::LargerBetter, m).unwrap())
            .collect();
        assert_eq!(line_crossings(&rankings), 0);
        assert!(line_plot_methods(&d.tasks[0], Direction::LargerBetter, &methods[..1]).is_err());
    }

    #[test]
    fn crossing_count() {
        let t = TaskData::from_columns("T", &[("A", vec![1.0, 1.0, 1.0]), ("B", vec![0.0, 0.0, 5.0])]).unwrap();
        let rs = vec![
            rank_task(&t, Direction::LargerBetter, &RankingMethodSpec::median_then_rank()).unwrap(),
            rank_task(&t, Direction::LargerBetter, &RankingMethodSpec::mean_then_rank()).unwrap(),
        ];
        assert_eq!(line_crossings(&rs), 1);
    }

    #[test]
    fn blobs_for_ideal_bootstrap() {
        let d = generate_ideal(&SimSpec::ideal(3)).unwrap();
        let cfg = BootstrapConfig::new(50, 1).unwrap();
        let dist =
            bootstrap_rank_distribution(&d.tasks[0], Direction::LargerBetter, &RankingMethodSpec::mean_then_rank(), &cfg)
                .unwrap();
        let sc = blob_plot(&dist, &names(5)).unwrap();
        assert_eq!(sc.count_class("blob"), 5);
        assert_eq!(sc.count_class("median-cross"), 5);
        assert_eq!(sc.count_class("interval-line"), 5);
        assert_eq!(sc.count_class("diagonal"), 1);
        for m in sc.marks_with_class("blob") {
            assert_eq!(m.get_data("frequency"), Some("1"));
        }
        assert!(sc.is_within_canvas());
    }

    #[test]
    fn significance_map_orientation() {
        let d = generate_ideal(&SimSpec::ideal(3)).unwrap();
        let sm = significance_matrix(&d.tasks[0], Direction::LargerBetter, 0.05, Adjustment::Holm).unwrap();
        let sc = significance_map_plot(&sm, &names(5)).unwrap();
        assert_eq!(sc.count_class("sig-cell"), 25);
        assert_eq!(sc.count_class("sig-superior"), 10);
        assert_eq!(sc.count_class("sig-diagonal"), 5);
        for m in sc.marks_with_class("sig-superior") {
            let xi: usize = m.get_data("x").unwrap()[1..].parse().unwrap();
            let yj: usize = m.get_data("y").unwrap()[1..].parse().unwrap();
            assert!(xi < yj);
            // above the diagonal: higher on the canvas than the diagonal cell of its column
            let Shape::Rect { y, .. } = m.shape else { unreachable!() };
            let diag = sc
                .marks_with_class("sig-diagonal")
                .find(|d| d.get_data("x") == m.get_data("x"))
                .unwrap();
            let Shape::Rect { y: dy, .. } = diag.shape else { unreachable!() };
            assert!(y < dy);
        }
    }
}
