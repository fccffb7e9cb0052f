//! Ranking analysis and visualization for benchmark challenges.
//!
//! The crate takes assessment data (one metric value per task, test case and
//! algorithm), ranks the algorithms under several schemes, measures how stable
//! those rankings are, compares rankings across tasks and renders everything
//! as SVG figures bundled into a report.
//!
//! Module map:
//!
//! * [`data`]: CSV ingestion, missing-value handling, validation.
//! * [`ranking`]: aggregate-then-rank, rank-then-aggregate, test-based and
//!   consensus rankings.
//! * [`rank_stats`]: Kendall's tau, Spearman distances, Wilcoxon signed-rank,
//!   Holm adjustment, significance matrices.
//! * [`stability`]: bootstrap and cross-task rank distributions.
//! * [`similarity`]: task distance matrices, complete-linkage clustering,
//!   network layout.
//! * [`viz`]: renderer-independent scenes and their SVG serialization.
//! * [`simgen`]: synthetic challenges.
//! * [`report`]: single- and multi-task report bundles.

pub mod data;
pub mod error;
pub mod quantile;
pub mod rank_stats;
pub mod ranking;
pub mod report;
pub mod rng;
pub mod similarity;
pub mod simgen;
pub mod stability;
pub mod viz;

pub use data::{ChallengeData, ColumnMapping, Direction, Issue, MissingPolicy, TaskData};
pub use error::{Error, Result};
pub use rank_stats::{Adjustment, RankList, SignificanceMatrix};
pub use ranking::{Aggregate, Ranking, RankingMethodSpec, Scheme, TiePolicy};




pub use simgen::{SimKind, SimSpec};
pub use stability::{BootstrapConfig, RankDistribution, TauSamples};
pub use report::{OutputFormat, ReportBundle, ReportConfig};
pub use viz::VectorScene;
