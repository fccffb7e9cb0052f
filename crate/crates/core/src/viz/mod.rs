//! Figures as renderer-independent [`VectorScene`]s, serialized to SVG.
//!
//! Every mark carries a class tag naming what it depicts (`dot`, `blob`,
//! `heatmap-cell`, ...), so figures can be checked structurally by counting
//! tags. Output is a pure function of the inputs and the explicit seed.

mod assessment;
mod clustering;
mod rankings;
mod scene;
mod violin;

pub use assessment::{dot_box_plot, podium_plot, ranking_heatmap};
pub use clustering::{dendrogram_plot, network_plot};
pub use rankings::{blob_plot, line_crossings, line_plot_methods, significance_map_plot};
pub use scene::{Anchor, Axis, AxisSide, LegendEntry, Mark, Scale, Shape, VectorScene};
pub use violin::{silverman_bandwidth, violin_plot};

use crate::quantile::quantile_sorted;

/// Categorical colors; indices beyond the palette cycle with a marker change.
pub const PALETTE: [&str; 19] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#ad494a", "#8ca252", "#bd9e39", "#843c39", "#7b4173", "#3182bd", "#e6550d", "#31a354",
];

pub fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

/// 0 for the first pass through the palette, 1 for the second, ...
pub fn marker_variant(index: usize) -> usize {
    index / PALETTE.len()
}

/// Five-number summary with Tukey whiskers at 1.5 IQR.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

impl BoxStats {
    /// `None` for an empty sample.
    pub fn compute(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q1 = quantile_sorted(&sorted, 0.25);
        let median = quantile_sorted(&sorted, 0.5);
        let q3 = quantile_sorted(&sorted, 0.75);
        let fence = 1.5 * (q3 - q1);
        let (lo_fence, hi_fence) = (q1 - fence, q3 + fence);
        let inside: Vec<f64> = sorted.iter().copied().filter(|v| *v >= lo_fence && *v <= hi_fence).collect();
        let outliers = sorted.iter().copied().filter(|v| *v < lo_fence || *v > hi_fence).collect();
        Some(Self {
            median,
            q1,
            q3,
            whisker_lo: inside.first().copied().unwrap_or(q1).min(q1),
            whisker_hi: inside.last().copied().unwrap_or(q3).max(q3),
            outliers,
        })
    }
}

/// Low-discrepancy horizontal offsets in `[-0.35, 0.35]` (Weyl sequence).
pub(crate) fn jitter(count: usize, seed: u64, stratum: u64) -> Vec<f64> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    let start = crate::rng::Stream::new(seed, crate::rng::Domain::Jitter, stratum).uniform();
    (0..count)
        .map(|i| {
            let u = (start + GOLDEN * (i + 1) as f64).fract();
            (u - 0.5) * 0.7
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_stats() {
        let b = BoxStats::compute(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (2.0, 3.0, 4.0));
        assert_eq!(b.whisker_lo, 1.0);
        assert_eq!(b.whisker_hi, 4.0);
        assert_eq!(b.outliers, vec![100.0]);
        let b = BoxStats::compute(&[0.5]).unwrap();
        assert!([b.q1, b.median, b.q3, b.whisker_lo, b.whisker_hi].iter().all(|v| *v == 0.5));
        assert!(BoxStats::compute(&[]).is_none());
    }

    #[test]
    fn jitter_bounds() {
        let j = jitter(100, 3, 0);
        assert!(j.iter().all(|v| v.abs() <= 0.35));
        assert_eq!(j, jitter(100, 3, 0));
    }

    #[test]
    fn palette_cycles() {
        assert_eq!(color(0), color(19));
        assert_eq!(marker_variant(18), 0);
        assert_eq!(marker_variant(19), 1);
    }
}
