//! Rank correlation and distance measures, the one-sided Wilcoxon
//! signed-rank test, Holm's step-down adjustment and pairwise significance
//! matrices.

mod correlation;
mod holm;
pub(crate) mod significance;
mod wilcoxon;

pub use correlation::{kendall_tau, kendall_tau_slices, spearman_distance, spearman_footrule, RankList};
pub use holm::holm_adjust;
pub use significance::{significance_matrix, significance_matrix_grid, Adjustment, SignificanceMatrix};
pub use wilcoxon::{wilcoxon_signed_rank_normal, wilcoxon_signed_rank_one_sided, WilcoxonResult, EXACT_MAX_N};
