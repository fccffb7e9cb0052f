//! Dendrogram and network views of task similarity.

use super::scene::{tick_label, Anchor, Axis, AxisSide, LegendEntry, Mark, Scale, Shape, VectorScene};
use super::color;
use crate::error::{Error, Result};
use crate::similarity::{Dendrogram, DendrogramNode, NetworkLayout};

const LEFT: f64 = 70.0;
const TOP: f64 = 30.0;
const RIGHT: f64 = 20.0;
const BOTTOM: f64 = 90.0;
const PLOT_H: f64 = 260.0;
const LEAF_W: f64 = 50.0;

pub fn dendrogram_plot(dendrogram: &Dendrogram) -> Result<VectorScene> {
    let leaves = dendrogram.leaves();
    let width = LEFT + LEAF_W * leaves.len() as f64 + RIGHT;
    let bottom = TOP + PLOT_H;
    let mut sc = VectorScene::new(width, bottom + BOTTOM, "Task clustering");
    let top_height = dendrogram.root.height();
    let y = Scale::new((0.0, if top_height > 0.0 { top_height } else { 1.0 }), (bottom, TOP));
    let mut next_leaf = 0usize;
    draw_node(&dendrogram.root, &mut sc, &y, &mut next_leaf, bottom);
    sc.axes.push(Axis {
        side: AxisSide::Left,
        at: LEFT - 8.0,
        from: TOP,
        to: bottom,
        ticks: y.ticks(5).into_iter().map(|v| (y.map(v), tick_label(v))).collect(),
        label: "height".into(),
        rotate_labels: false,
    });
    Ok(sc)
}

/// Draws `node` and returns the x position and height of its top.
fn draw_node(node: &DendrogramNode, sc: &mut VectorScene, y: &Scale, next_leaf: &mut usize, bottom: f64) -> (f64, f64) {
    match node {
        DendrogramNode::Leaf(name) => {
            let x = LEFT + LEAF_W * (*next_leaf as f64 + 0.5);
            *next_leaf += 1;
            sc.push(
                Mark::new(
                    Shape::Text {
                        x,
                        y: bottom + 14.0,
                        text: name.clone(),
                        anchor: Anchor::Middle,
                        size: 10.0,
                    },
                    "dendro-leaf",
                )
                .data("task", name),
            );
            (x, 0.0)
        }
        DendrogramNode::Merge { left, right, height } => {
            let (lx, lh) = draw_node(left, sc, y, next_leaf, bottom);
            let (rx, rh) = draw_node(right, sc, y, next_leaf, bottom);
            sc.push(
                Mark::new(
                    Shape::Polyline {
                        points: vec![(lx, y.map(lh)), (lx, y.map(*height)), (rx, y.map(*height)), (rx, y.map(rh))],
                    },
                    "dendro-link",
                )
                .stroke("#333333", 1.2)
                .data("height", height),
            );
            ((lx + rx) / 2.0, *height)
        }
    }
}

const SIZE: f64 = 420.0;
const PAD: f64 = 40.0;

/// Network of tasks: edges get thinner and lighter as the target length
/// grows, nodes are colored by their unique winner. `algorithms` fixes the
/// palette so colors match the other figures.
pub fn network_plot(layout: &NetworkLayout, algorithms: &[String]) -> Result<VectorScene> {
    let m = layout.tasks.len();
    if m == 0 || layout.positions.len() != m {
        return Err(Error::EmptyInput("empty network layout".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &layout.positions {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let k = if span > 0.0 { (SIZE - 2.0 * PAD) / span } else { 0.0 };
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let place = |(x, y): (f64, f64)| (SIZE / 2.0 + (x - cx) * k, TOP + SIZE / 2.0 + (y - cy) * k);
    let mut sc = VectorScene::new(SIZE, TOP + SIZE + 20.0, "Task network");
    let max_target = layout.edge_targets.iter().map(|e| e.1).fold(0.0, f64::max);
    let index_of = |t: &str| layout.tasks.iter().position(|x| x == t).expect("edge endpoints are tasks");
    for ((a, b), target) in &layout.edge_targets {
        let (pa, pb) = (place(layout.positions[index_of(a)]), place(layout.positions[index_of(b)]));
        let closeness = if max_target > 0.0 { 1.0 - target / max_target } else { 1.0 };
        sc.push(
            Mark::new(
                Shape::Line {
                    x1: pa.0,
                    y1: pa.1,
                    x2: pb.0,
                    y2: pb.1,
                },
                "network-edge",
            )
            .stroke("#666666", 0.5 + 2.5 * closeness)
            .opacity(0.3 + 0.5 * closeness)
            .data("from", a)
            .data("to", b)
            .data("target", target),
        );
    }
    let mut used = Vec::new();
    for (i, task) in layout.tasks.iter().enumerate() {
        let (x, y) = place(layout.positions[i]);
        let winner = layout.winners[i].as_deref();
        let palette_index = winner.and_then(|w| algorithms.iter().position(|a| a == w));
        let mut node = match palette_index {
            Some(p) => {
                if !used.contains(&p) {
                    used.push(p);
                }
                Mark::new(Shape::Circle { cx: x, cy: y, r: 9.0 }, "network-node").fill(color(p))
            }
            None => Mark::new(Shape::Circle { cx: x, cy: y, r: 9.0 }, "network-node uncolored").fill("#d9d9d9"),
        }
        .stroke("#333333", 1.0)
        .data("task", task);
        if let Some(w) = winner {
            node = node.data("winner", w);
        }
        sc.push(node);
        sc.push(
            Mark::new(
                Shape::Text {
                    x,
                    y: y - 12.0,
                    text: task.clone(),
                    anchor: Anchor::Middle,
                    size: 10.0,
                },
                "network-label",
            )
            .data("task", task),
        );
    }
    used.sort_unstable();
    sc.legend = used
        .into_iter()
        .map(|p| LegendEntry {
            label: algorithms[p].clone(),
            color: color(p).into(),
        })
        .collect();
    Ok(sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{hierarchical_cluster, network_layout, DistanceMeasure, LayoutConfig, TaskDistanceMatrix};

    fn dm() -> TaskDistanceMatrix {
        TaskDistanceMatrix::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![vec![0.0, 2.0, 10.0], vec![2.0, 0.0, 8.0], vec![10.0, 8.0, 0.0]],
            DistanceMeasure::SpearmanDistance,
        )
        .unwrap()
    }

    #[test]
    fn dendrogram_marks() {
        let d = hierarchical_cluster(&dm()).unwrap();
        let sc = dendrogram_plot(&d).unwrap();
        assert_eq!(sc.count_class("dendro-leaf"), 3);
        assert_eq!(sc.count_class("dendro-link"), 2);
        assert!(sc.is_within_canvas());
    }

    #[test]
    fn network_marks() {
        let winners = vec![Some("X".to_string()), None, Some("Y".to_string())];
        let layout = network_layout(&dm(), &winners, &LayoutConfig::default()).unwrap();
        let sc = network_plot(&layout, &["X".into(), "Y".into()]).unwrap();
        assert_eq!(sc.count_class("network-edge"), 3);
        assert_eq!(sc.count_class("network-node"), 3);
        assert_eq!(sc.count_class("uncolored"), 1);
        assert_eq!(sc.count_class("network-label"), 3);
        assert_eq!(sc.legend.len(), 2);
        assert!(sc.is_within_canvas());
    }
}
