//! Violin plots of Kendall's tau between the full-data ranking and bootstrap
//! rankings, one violin per task.

use super::scene::{tick_label, Axis, AxisSide, Mark, Scale, Shape, VectorScene};
use super::BoxStats;
use crate::error::{Error, Result};
use crate::quantile::{mean, quantile_sorted};
use crate::stability::TauSamples;

const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;
const RIGHT: f64 = 20.0;
const BOTTOM: f64 = 90.0;
const PLOT_H: f64 = 300.0;
const COL_W: f64 = 70.0;
const GRID: usize = 101;

/// Silverman's rule of thumb, `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`, falling
/// back to the standard deviation when the IQR is zero. Zero for constant or
/// single-value samples.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 || values.iter().all(|v| *v == values[0]) {
        return 0.0;
    }
    let m = mean(values).expect("nonempty");
    let sd = (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    0.9 * spread * (n as f64).powf(-0.2)
}

/// Gaussian kernel density on an even grid over `[-1, 1]`.
fn density(values: &[f64], h: f64) -> Vec<(f64, f64)> {
    let norm = 1.0 / (values.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    (0..GRID)
        .map(|g| {
            let t = -1.0 + 2.0 * g as f64 / (GRID - 1) as f64;
            let d: f64 = values.iter().map(|v| (-0.5 * ((t - v) / h).powi(2)).exp()).sum();
            (t, d * norm)
        })
        .collect()
}

/// Tasks sorted by median tau, most stable first.
pub fn violin_plot(samples: &[TauSamples]) -> Result<VectorScene> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no tau samples".into()));
    }
    if let Some(s) = samples.iter().find(|s| s.values.is_empty()) {
        return Err(Error::EmptyInput(format!("no tau samples for task {}", s.task)));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].median().total_cmp(&samples[a].median()).then(a.cmp(&b)));
    let width = LEFT + COL_W * samples.len() as f64 + RIGHT;
    let bottom = TOP + PLOT_H;
    let mut sc = VectorScene::new(width, bottom + BOTTOM, "Kendall's tau between full and bootstrap rankings");
    let y = Scale::new((-1.0, 1.0), (bottom, TOP));
    let half = COL_W * 0.42;
    for (k, &i) in order.iter().enumerate() {
        let s = &samples[i];
        let cx = LEFT + COL_W * (k as f64 + 0.5);
        let h = silverman_bandwidth(&s.values);
        if h > 0.0 {
            let dens = density(&s.values, h);
            let peak = dens.iter().map(|d| d.1).fold(0.0, f64::max);
            let mut points: Vec<(f64, f64)> = dens.iter().map(|&(t, d)| (cx + half * d / peak, y.map(t))).collect();
            points.extend(dens.iter().rev().map(|&(t, d)| (cx - half * d / peak, y.map(t))));
            sc.push(
                Mark::new(Shape::Path { points }, "violin")
                    .fill("#9ecae1")
                    .stroke("#3182bd", 1.0)
                    .data("task", &s.task)
                    .data("bandwidth", h),
            );
        } else {
            let v = s.values[0];
            sc.push(
                Mark::new(
                    Shape::Line {
                        x1: cx - half,
                        y1: y.map(v),
                        x2: cx + half,
                        y2: y.map(v),
                    },
                    "violin-bar",
                )
                .stroke("#3182bd", 3.0)
                .data("task", &s.task)
                .data("value", v),
            );
        }
        let b = BoxStats::compute(&s.values).expect("nonempty");
        let bw = 5.0;
        sc.push(
            Mark::new(
                Shape::Rect {
                    x: cx - bw,
                    y: y.map(b.q3),
                    w: 2.0 * bw,
                    h: y.map(b.q1) - y.map(b.q3),
                },
                "violin-box",
            )
            .fill("#333333")
            .data("task", &s.task),
        );
        sc.push(
            Mark::new(
                Shape::Circle {
                    cx,
                    cy: y.map(b.median),
                    r: 2.5,
                },
                "violin-median",
            )
            .fill("#ffffff")
            .data("task", &s.task)
            .data("median", b.median),
        );
    }
    sc.axes.push(Axis {
        side: AxisSide::Left,
        at: LEFT,
        from: TOP,
        to: bottom,
        ticks: [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&v| (y.map(v), tick_label(v))).collect(),
        label: "Kendall's tau".into(),
        rotate_labels: false,
    });
    sc.axes.push(Axis {
        side: AxisSide::Bottom,
        at: bottom,
        from: LEFT,
        to: LEFT + COL_W * samples.len() as f64,
        ticks: order
            .iter()
            .enumerate()
            .map(|(k, &i)| (LEFT + COL_W * (k as f64 + 0.5), samples[i].task.clone()))
            .collect(),
        label: "task".into(),
        rotate_labels: true,
    });
    Ok(sc)
}
