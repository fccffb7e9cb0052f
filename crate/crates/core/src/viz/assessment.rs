//! Plots of the raw assessment data of one task.

use super::scene::{tick_label, Anchor, Axis, AxisSide, LegendEntry, Mark, Scale, Shape, VectorScene};
use super::{color, jitter, marker_variant, BoxStats};
use crate::data::{Cell, Direction, TaskData};
use crate::error::{Error, Result};
use crate::ranking::{assign_ranks, TiePolicy};
use crate::rng::{Domain, Stream};

const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;
const RIGHT: f64 = 20.0;
const BOTTOM: f64 = 70.0;
const PLOT_H: f64 = 300.0;
const COL_W: f64 = 50.0;

fn column_indices(task: &TaskData, ordering: &[String]) -> Result<Vec<usize>> {
    if ordering.is_empty() {
        return Err(Error::EmptyInput("no algorithms to plot".into()));
    }
    ordering
        .iter()
        .map(|a| task.algorithm_index(a).ok_or(Error::AlgorithmSetMismatch))
        .collect()
}

fn value_scale(task: &TaskData, cols: &[usize], top: f64, bottom: f64) -> Scale {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in 0..task.n_cases() {
        for &a in cols {
            if let Some(v) = task.cell(c, a).value().filter(|v| v.is_finite()) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    Scale::new((lo - pad, hi + pad), (bottom, top))
}

fn value_axis(scale: &Scale, at: f64, top: f64, bottom: f64) -> Axis {
    Axis {
        side: AxisSide::Left,
        at,
        from: top,
        to: bottom,
        ticks: scale.ticks(5).into_iter().map(|v| (scale.map(v), tick_label(v))).collect(),
        label: "metric value".into(),
        rotate_labels: false,
    }
}

fn dot_shape(cx: f64, cy: f64, r: f64, variant: usize) -> Shape {
    if variant.is_multiple_of(2) {
        Shape::Circle { cx, cy, r }
    } else {
        Shape::Rect {
            x: cx - r,
            y: cy - r,
            w: 2.0 * r,
            h: 2.0 * r,
        }
    }
}

/// Box plots per algorithm overlaid with one jittered dot per test case.
///
/// Cells flagged to rank last without a value are drawn as `dot missing` on
/// the lower edge of the plot.
pub fn dot_box_plot(task: &TaskData, ordering: &[String], seed: u64) -> Result<VectorScene> {
    let cols = column_indices(task, ordering)?;
    let p = cols.len();
    let width = LEFT + COL_W * p as f64 + RIGHT;
    let bottom = TOP + PLOT_H;
    let mut sc = VectorScene::new(width, bottom + BOTTOM, format!("Dot and box plot: {}", task.id));
    let y = value_scale(task, &cols, TOP, bottom);
    for (k, &a) in cols.iter().enumerate() {
        let center = LEFT + COL_W * (k as f64 + 0.5);
        let resolved: Vec<f64> = task.column(a).into_iter().flatten().filter(|v| v.is_finite()).collect();
        let colr = color(a);
        if let Some(b) = BoxStats::compute(&resolved) {
            let half = COL_W * 0.3;
            sc.push(
                Mark::new(
                    Shape::Rect {
                        x: center - half,
                        y: y.map(b.q3),
                        w: 2.0 * half,
                        h: y.map(b.q1) - y.map(b.q3),
                    },
                    "box",
                )
                .stroke("#333333", 1.0)
                .data("algorithm", &ordering[k]),
            );
            sc.push(
                Mark::new(
                    Shape::Line {
                        x1: center - half,
                        y1: y.map(b.median),
                        x2: center + half,
                        y2: y.map(b.median),
                    },
                    "box-median",
                )
                .stroke("#000000", 2.0),
            );
            for (from, to) in [(b.q3, b.whisker_hi), (b.q1, b.whisker_lo)] {
                sc.push(
                    Mark::new(
                        Shape::Line {
                            x1: center,
                            y1: y.map(from),
                            x2: center,
                            y2: y.map(to),
                        },
                        "whisker",
                    )
                    .stroke("#333333", 1.0),
                );
            }
            for o in &b.outliers {
                sc.push(
                    Mark::new(Shape::Circle { cx: center, cy: y.map(*o), r: 3.5 }, "outlier")
                        .stroke("#333333", 1.0)
                        .data("value", o),
                );
            }
        }
        let offsets = jitter(task.n_cases(), seed, a as u64);
        for c in 0..task.n_cases() {
            let cx = center + offsets[c] * COL_W;
            let (cy, class) = match task.cell(c, a) {
                Cell::WorstRank | Cell::Missing => (bottom, "dot missing"),
                cell => (y.map(cell.value().expect("resolved")), "dot"),
            };
            sc.push(
                Mark::new(dot_shape(cx, cy, 2.0, marker_variant(a)), class)
                    .fill(colr)
                    .opacity(0.7)
                    .data("algorithm", &ordering[k])
                    .data("case", &task.cases[c]),
            );
        }
    }
    sc.axes.push(value_axis(&y, LEFT - 8.0, TOP, bottom));
    sc.axes.push(category_axis(ordering, bottom, LEFT, COL_W, "algorithm"));
    Ok(sc)
}

fn category_axis(labels: &[String], at: f64, left: f64, width: f64, title: &str) -> Axis {
    Axis {
        side: AxisSide::Bottom,
        at,
        from: left,
        to: left + width * labels.len() as f64,
        ticks: labels
            .iter()
            .enumerate()
            .map(|(k, l)| (left + width * (k as f64 + 0.5), l.clone()))
            .collect(),
        label: title.into(),
        rotate_labels: true,
    }
}

/// Podium places per case: `places[case][place] = algorithm position`.
/// Ties are broken by a seeded random permutation per case.
fn podium_places(task: &TaskData, direction: Direction, cols: &[usize], seed: u64) -> Result<Vec<Vec<usize>>> {
    let grid = task.grid(direction)?;
    let mut out = Vec::with_capacity(task.n_cases());
    for c in 0..task.n_cases() {
        let mut rng = Stream::new(seed, Domain::PodiumTies, c as u64);
        let keys: Vec<u64> = cols.iter().map(|_| rng.next_u64()).collect();
        let mut order: Vec<usize> = (0..cols.len()).collect();
        order.sort_by(|&i, &j| {
            let (vi, vj) = (direction.orient(grid.get(c, cols[i])), direction.orient(grid.get(c, cols[j])));
            vj.total_cmp(&vi).then(keys[i].cmp(&keys[j]))
        });
        out.push(order);
    }
    Ok(out)
}

const SUB_W: f64 = 12.0;
const PODIUM_GAP: f64 = 14.0;
const BAR_H: f64 = 90.0;

/// Podium plot: each case's values placed on the podium of the rank the
/// algorithm achieved on that case, connected by one line per case, with a
/// bar chart of rank frequencies underneath.
pub fn podium_plot(task: &TaskData, direction: Direction, ordering: &[String], seed: u64) -> Result<VectorScene> {
    let cols = column_indices(task, ordering)?;
    let p = cols.len();
    let n = task.n_cases();
    let podium_w = SUB_W * p as f64;
    let width = LEFT + p as f64 * (podium_w + PODIUM_GAP) + RIGHT;
    let upper_bottom = TOP + 240.0;
    let bars_top = upper_bottom + 30.0;
    let bars_bottom = bars_top + BAR_H;
    let mut sc = VectorScene::new(width, bars_bottom + 50.0, format!("Podium plot: {}", task.id));
    let y = value_scale(task, &cols, TOP, upper_bottom);
    let places = podium_places(task, direction, &cols, seed)?;
    let podium_left = |place: usize| LEFT + place as f64 * (podium_w + PODIUM_GAP);
    let dot_at = |c: usize, place: usize, k: usize| {
        let x = podium_left(place) + SUB_W * (k as f64 + 0.5);
        let yy = task.cell(c, cols[k]).value().map(|v| y.map(v)).unwrap_or(upper_bottom);
        (x, yy)
    };
    for (c, order) in places.iter().enumerate() {
        let points: Vec<(f64, f64)> = order.iter().enumerate().map(|(place, &k)| dot_at(c, place, k)).collect();
        sc.push(
            Mark::new(Shape::Polyline { points }, "podium-line")
                .stroke("#999999", 0.6)
                .opacity(0.6)
                .data("case", &task.cases[c]),
        );
    }
    let mut freq = vec![vec![0usize; p]; p];
    for (c, order) in places.iter().enumerate() {
        for (place, &k) in order.iter().enumerate() {
            freq[place][k] += 1;
            let (cx, cy) = dot_at(c, place, k);
            sc.push(
                Mark::new(dot_shape(cx, cy, 2.2, marker_variant(cols[k])), "podium-dot")
                    .fill(color(cols[k]))
                    .data("algorithm", &ordering[k])
                    .data("place", place + 1)
                    .data("case", &task.cases[c]),
            );
        }
    }
    for (place, counts) in freq.iter().enumerate() {
        for (k, &count) in counts.iter().enumerate() {
            let f = count as f64 / n as f64;
            sc.push(
                Mark::new(
                    Shape::Rect {
                        x: podium_left(place) + SUB_W * k as f64 + 1.0,
                        y: bars_bottom - f * BAR_H,
                        w: SUB_W - 2.0,
                        h: f * BAR_H,
                    },
                    "podium-bar",
                )
                .fill(color(cols[k]))
                .data("place", place + 1)
                .data("algorithm", &ordering[k])
                .data("frequency", f),
            );
        }
        sc.push(Mark::new(
            Shape::Text {
                x: podium_left(place) + podium_w / 2.0,
                y: bars_bottom + 14.0,
                text: format!("{}", place + 1),
                anchor: Anchor::Middle,
                size: 10.0,
            },
            "podium-label",
        ));
    }
    sc.push(Mark::new(
        Shape::Text {
            x: width / 2.0,
            y: bars_bottom + 32.0,
            text: "podium place".into(),
            anchor: Anchor::Middle,
            size: 11.0,
        },
        "axis-title",
    ));
    sc.axes.push(value_axis(&y, LEFT - 8.0, TOP, upper_bottom));
    let fscale = Scale::new((0.0, 1.0), (bars_bottom, bars_top));
    sc.axes.push(Axis {
        side: AxisSide::Left,
        at: LEFT - 8.0,
        from: bars_top,
        to: bars_bottom,
        ticks: [0.0, 0.5, 1.0].iter().map(|&v| (fscale.map(v), tick_label(v))).collect(),
        label: String::new(),
        rotate_labels: false,
    });
    sc.legend = ordering
        .iter()
        .zip(&cols)
        .map(|(l, &a)| LegendEntry {
            label: l.clone(),
            color: color(a).into(),
        })
        .collect();
    Ok(sc)
}

fn heat_color(t: f64) -> String {
    let lerp = |a: f64, b: f64| (a + (b - a) * t.clamp(0.0, 1.0)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(247.0, 8.0), lerp(251.0, 48.0), lerp(255.0, 107.0))
}

/// Per-case rank counts: `counts[rank - 1][position in ordering]`.
pub(crate) fn case_rank_counts(task: &TaskData, direction: Direction, cols: &[usize]) -> Result<Vec<Vec<usize>>> {
    let grid = task.grid(direction)?;
    let p = cols.len();
    let mut counts = vec![vec![0usize; p]; p];
    for c in 0..task.n_cases() {
        let row: Vec<f64> = cols.iter().map(|&a| grid.get(c, a)).collect();
        for (k, r) in assign_ranks(&row, direction, TiePolicy::MinRank)?.into_iter().enumerate() {
            counts[r as usize - 1][k] += 1;
        }
    }
    Ok(counts)
}

/// Grid of how often each algorithm achieved each per-case rank.
pub fn ranking_heatmap(task: &TaskData, direction: Direction, ordering: &[String]) -> Result<VectorScene> {
    let cols = column_indices(task, ordering)?;
    let p = cols.len();
    let cell = (300.0 / p as f64).clamp(14.0, 40.0);
    let width = LEFT + cell * p as f64 + RIGHT;
    let bottom = TOP + cell * p as f64;
    let mut sc = VectorScene::new(width, bottom + BOTTOM, format!("Ranking heatmap: {}", task.id));
    let counts = case_rank_counts(task, direction, &cols)?;
    let n = task.n_cases() as f64;
    for (r, row) in counts.iter().enumerate() {
        for (k, &count) in row.iter().enumerate() {
            let x = LEFT + cell * k as f64;
            let y = TOP + cell * r as f64;
            sc.push(
                Mark::new(Shape::Rect { x, y, w: cell, h: cell }, "heatmap-cell")
                    .fill(heat_color(count as f64 / n))
                    .stroke("#ffffff", 0.5)
                    .data("rank", r + 1)
                    .data("algorithm", &ordering[k])
                    .data("count", count),
            );
            if count > 0 && cell >= 18.0 {
                let dark = count as f64 / n > 0.5;
                sc.push(
                    Mark::new(
                        Shape::Text {
                            x: x + cell / 2.0,
                            y: y + cell / 2.0 + 3.5,
                            text: count.to_string(),
                            anchor: Anchor::Middle,
                            size: 9.0,
                        },
                        "heatmap-count",
                    )
                    .fill(if dark { "#ffffff" } else { "#000000" }),
                );
            }
        }
    }
    sc.axes.push(Axis {
        side: AxisSide::Left,
        at: LEFT,
        from: TOP,
        to: bottom,
        ticks: (0..p).map(|r| (TOP + cell * (r as f64 + 0.5), (r + 1).to_string())).collect(),
        label: "rank".into(),
        rotate_labels: false,
    });
    sc.axes.push(category_axis(ordering, bottom, LEFT, cell, "algorithm"));
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{generate_ideal, SimSpec};

    fn names(p: usize) -> Vec<String> {
        (1..=p).map(|i| format!("A{i}")).collect()
    }

    #[test]
    fn ideal_boxes_are_separated() {
        let d = generate_ideal(&SimSpec::ideal(3)).unwrap();
        let sc = dot_box_plot(&d.tasks[0], &names(5), 1).unwrap();
        assert_eq!(sc.count_class("box"), 5);
        assert_eq!(sc.count_class("dot"), 250);
        assert!(sc.is_within_canvas());
        // box k spans strictly above box k+1 (canvas y grows downward)
        let boxes: Vec<(f64, f64)> = sc
            .marks_with_class("box")
            .map(|m| match m.shape {
                Shape::Rect { y, h, .. } => (y, y + h),
                _ => unreachable!(),
            })
            .collect();
        for w in boxes.windows(2) {
            assert!(w[0].1 < w[1].0);
        }
    }

    #[test]
    fn single_case_single_algorithm() {
        let t = TaskData::from_columns("T", &[("A", vec![0.4])]).unwrap();
        let sc = dot_box_plot(&t, &["A".to_string()], 0).unwrap();
        assert_eq!(sc.count_class("dot"), 1);
        assert_eq!(sc.count_class("box"), 1);
        assert!(sc.is_within_canvas());
    }

    #[test]
    fn podium_ideal() {
        let d = generate_ideal(&SimSpec { n: 20, ..SimSpec::ideal(3) }).unwrap();
        let sc = podium_plot(&d.tasks[0], Direction::LargerBetter, &names(5), 9).unwrap();
        assert_eq!(sc.count_class("podium-line"), 20);
        for line in sc.marks_with_class("podium-line") {
            match &line.shape {
                Shape::Polyline { points } => assert_eq!(points.len(), 5),
                _ => unreachable!(),
            }
        }
        let first: Vec<&str> = sc
            .marks_with_class("podium-dot")
            .filter(|m| m.get_data("place") == Some("1"))
            .map(|m| m.get_data("algorithm").unwrap())
            .collect();
        assert!(first.iter().all(|a| *a == "A1"));
        for place in 1..=5 {
            let total: f64 = sc
                .marks_with_class("podium-bar")
                .filter(|m| m.get_data("place") == Some(&place.to_string()))
                .map(|m| m.get_data("frequency").unwrap().parse::<f64>().unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        let full: Vec<&Mark> = sc
            .marks_with_class("podium-bar")
            .filter(|m| m.get_data("frequency") == Some("1"))
            .collect();
        assert_eq!(full.len(), 5);
        assert!(sc.is_within_canvas());
    }

    #[test]
    fn podium_ties_are_seeded() {
        let v = vec![0.5; 6];
        let t = TaskData::from_columns("T", &[("A", v.clone()), ("B", v)]).unwrap();
        let o = vec!["A".to_string(), "B".to_string()];
        let a = podium_plot(&t, Direction::LargerBetter, &o, 1).unwrap();
        assert_eq!(a, podium_plot(&t, Direction::LargerBetter, &o, 1).unwrap());
        let winners: Vec<&str> = a
            .marks_with_class("podium-dot")
            .filter(|m| m.get_data("place") == Some("1"))
            .map(|m| m.get_data("algorithm").unwrap())
            .collect();
        assert_eq!(winners.len(), 6);
    }

    #[test]
    fn heatmap_ideal_and_ties() {
        let d = generate_ideal(&SimSpec::ideal(3)).unwrap();
        let sc = ranking_heatmap(&d.tasks[0], Direction::LargerBetter, &names(5)).unwrap();
        assert_eq!(sc.count_class("heatmap-cell"), 25);
        for m in sc.marks_with_class("heatmap-cell") {
            let rank: usize = m.get_data("rank").unwrap().parse().unwrap();
            let alg = m.get_data("algorithm").unwrap();
            let expected = if alg == format!("A{rank}") { "50" } else { "0" };
            assert_eq!(m.get_data("count"), Some(expected));
        }
        let v = vec![0.1, 0.2, 0.3];
        let t = TaskData::from_columns("T", &[("A", v.clone()), ("B", v)]).unwrap();
        let sc = ranking_heatmap(&t, Direction::LargerBetter, &["A".to_string(), "B".to_string()]).unwrap();
        for m in sc.marks_with_class("heatmap-cell") {
            let expected = if m.get_data("rank") == Some("1") { "3" } else { "0" };
            assert_eq!(m.get_data("count"), Some(expected));
        }
    }

    #[test]
    fn unknown_algorithm_in_ordering() {
        let t = TaskData::from_columns("T", &[("A", vec![0.4])]).unwrap();
        assert!(dot_box_plot(&t, &["Z".to_string()], 0).is_err());
    }
}
