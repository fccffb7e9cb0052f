//! Full analysis reports: figures, CSV tables and run metadata written as a
//! directory bundle with an HTML or Markdown index.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{validate, ChallengeData, Direction, TaskData};
use crate::error::{Error, Result};
use crate::rank_stats::{significance_matrix, Adjustment};
use crate::ranking::{consensus_ranking, rank_task, write_rankings_csv, Ranking, RankingMethodSpec, DEFAULT_ALPHA};
use crate::similarity::{
    hierarchical_cluster, network_layout, task_distance_matrix, winners, DistanceMeasure, LayoutConfig,
};
use crate::stability::{
    bootstrap_rankings, cross_task_rank_distribution, per_algorithm_panels, BootstrapConfig, BootstrapRankings,
    RankDistribution, TauSamples,
};
use crate::viz::{
    blob_plot, dendrogram_plot, dot_box_plot, line_plot_methods, network_plot, podium_plot, ranking_heatmap,
    significance_map_plot, violin_plot, VectorScene,
};

/// Bootstrap results on fewer cases than this get a caution in the report.
pub const BOOTSTRAP_CAUTION_CASES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Html,
    Markdown,
}

impl OutputFormat {
    fn index_name(self) -> &'static str {
        match self {
            OutputFormat::Html => "index.html",
            OutputFormat::Markdown => "report.md",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub method: RankingMethodSpec,
    /// Consensus weights per task; tasks not listed weigh 1.
    pub weights: Option<BTreeMap<String, f64>>,
    pub bootstrap: BootstrapConfig,
    pub alpha: f64,
    pub adjustment: Adjustment,
    pub format: OutputFormat,
    #[serde(skip)]
    pub output_dir: PathBuf,
    /// Restrict figures to the best `k` algorithms; tables stay complete.
    pub top_k: Option<usize>,
    /// Admissible metric range checked during validation.
    pub validity_range: Option<(f64, f64)>,
    pub distance: DistanceMeasure,
    pub layout: LayoutConfig,
}

impl ReportConfig {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        Self {
            method: RankingMethodSpec::test_based(DEFAULT_ALPHA),
            weights: None,
            bootstrap: BootstrapConfig::default(),
            alpha: DEFAULT_ALPHA,
            adjustment: Adjustment::Holm,
            format: OutputFormat::Html,
            output_dir: output_dir.into(),
            top_k: None,
            validity_range: None,
            distance: DistanceMeasure::Footrule,
            layout: LayoutConfig::default(),
        }
    }

    fn check(&self, p: usize) -> Result<()> {
        if let Some(k) = self.top_k {
            if k == 0 || k > p {
                return Err(Error::InvalidConfig(format!("top-k {k} must lie in 1..={p}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} must lie in (0, 1)", self.alpha)));
        }
        if self.bootstrap.b == 0 {
            return Err(Error::InvalidConfig("bootstrap sample count must be at least 1".into()));
        }
        Ok(())
    }

    fn weights_map(&self) -> Option<HashMap<String, f64>> {
        self.weights.as_ref().map(|w| w.iter().map(|(k, v)| (k.clone(), *v)).collect())
    }

    fn shown(&self, ordering: &[String]) -> Vec<String> {
        let k = self.top_k.unwrap_or(ordering.len()).min(ordering.len());
        ordering[..k].to_vec()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub section: String,
    pub subject: String,
    pub heading: String,
    pub scene: VectorScene,
}

impl Figure {
    fn new(section: &str, subject: &str, heading: impl Into<String>, scene: VectorScene) -> Self {
        Self {
            section: section.into(),
            subject: subject.into(),
            heading: heading.into(),
            scene,
        }
    }

    /// Path relative to the bundle root.
    pub fn path(&self) -> String {
        format!("figures/{}_{}.svg", self.section, file_safe(&self.subject))
    }
}

/// Everything a report consists of, held in memory until [`ReportBundle::write`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub root: PathBuf,
    pub format: OutputFormat,
    pub index: String,
    pub figures: Vec<Figure>,
    /// `(path relative to root, contents)`.
    pub tables: Vec<(String, String)>,
    pub metadata: String,
    pub warnings: Vec<String>,
}

impl ReportBundle {
    pub fn index_path(&self) -> PathBuf {
        self.root.join(self.format.index_name())
    }

    /// All files of the bundle as `(relative path, contents)`, index first.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut out = vec![(self.format.index_name().to_string(), self.index.clone())];
        out.extend(self.figures.iter().map(|f| (f.path(), f.scene.to_svg())));
        out.extend(self.tables.iter().cloned());
        out.push(("run.json".into(), self.metadata.clone()));
        out
    }

    pub fn write(&self) -> Result<()> {
        for (rel, contents) in self.files() {
            let path = self.root.join(&rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, contents)?;
        }
        Ok(())
    }
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '-' })
        .collect()
}

fn csv_string(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn data_warnings(data: &ChallengeData, cfg: &ReportConfig) -> Vec<String> {
    let mut w: Vec<String> = validate(data, cfg.validity_range).iter().map(|i| i.to_string()).collect();
    for t in &data.tasks {
        if t.n_cases() < BOOTSTRAP_CAUTION_CASES {
            w.push(format!(
                "task `{}` has only {} test cases; bootstrap results should be treated with caution",
                t.id,
                t.n_cases()
            ));
        }
    }
    w
}

fn ordering_of(r: &Ranking) -> Vec<String> {
    r.ordered_algorithms()
}

/// Figures and tables shared by both report kinds for one task.
struct TaskSection {
    figures: Vec<Figure>,
    tables: Vec<(String, String)>,
    warnings: Vec<String>,
    ranking: Ranking,
    boot: BootstrapRankings,
    tau: Option<TauSamples>,
}

fn task_section(
    task: &TaskData,
    direction: Direction,
    cfg: &ReportConfig,
    ordering: &[String],
    boot_cfg: &BootstrapConfig,
) -> Result<TaskSection> {
    let id = task.id.as_str();
    let shown = cfg.shown(ordering);
    let sub = task.select_algorithms(&shown)?;
    let seed = cfg.bootstrap.seed;
    let mut figures = vec![
        Figure::new("dotbox", id, format!("Dot and box plot: {id}"), dot_box_plot(&sub, &shown, seed)?),
        Figure::new("podium", id, format!("Podium plot: {id}"), podium_plot(&sub, direction, &shown, seed)?),
        Figure::new("heatmap", id, format!("Ranking heatmap: {id}"), ranking_heatmap(&sub, direction, &shown)?),
        Figure::new(
            "lineplot",
            id,
            format!("Ranking methods compared: {id}"),
            line_plot_methods(&sub, direction, &RankingMethodSpec::all_variants(cfg.alpha))?,
        ),
    ];
    let boot = bootstrap_rankings(task, direction, &cfg.method, boot_cfg)?;
    let ranking = boot.full.clone();
    let dist = boot.distribution();
    figures.push(Figure::new("blob", id, format!("Bootstrap rank distribution: {id}"), blob_plot(&dist, &shown)?));
    let mut warnings = Vec::new();
    let tau = if ranking.is_all_tied() {
        warnings.push(format!(
            "task `{id}`: all algorithms are tied in the full-data ranking; Kendall's tau is undefined and the violin plot is skipped"
        ));
        None
    } else {
        Some(boot.tau_samples()?)
    };
    let sm = significance_matrix(task, direction, cfg.alpha, cfg.adjustment)?;
    let sig_fig = Figure::new("significance", id, format!("Significance map: {id}"), significance_map_plot(&sm, &shown)?);
    let mut all_methods = Vec::new();
    for m in RankingMethodSpec::all_variants(cfg.alpha) {
        all_methods.push(rank_task(task, direction, &m)?);
    }
    let safe = file_safe(id);
    let tables = vec![
        (format!("data/rankings-all-methods_{safe}.csv"), csv_string(|b| write_rankings_csv(&all_methods, b))?),
        (format!("data/bootstrap-ranks_{safe}.csv"), csv_string(|b| dist.write_csv(b))?),
        (format!("data/significance_{safe}.csv"), csv_string(|b| sm.write_csv(b))?),
    ];
    figures.push(sig_fig);
    Ok(TaskSection {
        figures,
        tables,
        warnings,
        ranking,
        boot,
        tau,
    })
}

fn metadata(cfg: &ReportConfig, mode: &str, data: &ChallengeData) -> Result<String> {
    #[derive(Serialize)]
    struct Meta<'a> {
        tool: &'a str,
        version: &'a str,
        mode: &'a str,
        seed: u64,
        direction: Direction,
        tasks: Vec<String>,
        algorithms: &'a [String],
        config: &'a ReportConfig,
    }
    let mut s = serde_json::to_string_pretty(&Meta {
        tool: "rankscope",
        version: env!("CARGO_PKG_VERSION"),
        mode,
        seed: cfg.bootstrap.seed,
        direction: data.direction,
        tasks: data.task_ids(),
        algorithms: &data.algorithms,
        config: cfg,
    })?;
    s.push('\n');
    Ok(s)
}

/// Report for a challenge with exactly one task; algorithms are ordered by
/// the configured ranking method throughout.
pub fn render_single_task_report(data: &ChallengeData, cfg: &ReportConfig) -> Result<ReportBundle> {
    let [task] = data.tasks.as_slice() else {
        return Err(Error::InvalidConfig(format!(
            "single-task report needs exactly one task, found {}",
            data.tasks.len()
        )));
    };
    cfg.check(task.n_algorithms())?;
    let mut warnings = data_warnings(data, cfg);
    let ordering = ordering_of(&rank_task(task, data.direction, &cfg.method)?);
    let mut sec = task_section(task, data.direction, cfg, &ordering, &cfg.bootstrap)?;
    warnings.append(&mut sec.warnings);
    let mut figures = sec.figures;
    let mut tables = vec![("data/rankings.csv".to_string(), csv_string(|b| write_rankings_csv(&[sec.ranking.clone()], b))?)];
    tables.append(&mut sec.tables);
    if let Some(tau) = &sec.tau {
        let pos = figures.iter().position(|f| f.section == "significance").expect("significance figure");
        figures.insert(
            pos,
            Figure::new("violin", &task.id, format!("Kendall's tau: {}", task.id), violin_plot(std::slice::from_ref(tau))?),
        );
        tables.push(("data/tau.csv".into(), csv_string(|b| TauSamples::write_csv(std::slice::from_ref(tau), b))?));
    }
    finish(data, cfg, "single", figures, tables, warnings)
}

/// Report for a challenge with at least two tasks sharing one algorithm set;
/// algorithms are ordered by the consensus ranking throughout.
pub fn render_multi_task_report(data: &ChallengeData, cfg: &ReportConfig) -> Result<ReportBundle> {
    let m = data.tasks.len();
    if m < 2 {
        return Err(Error::TooFewTasks(m));
    }
    if !data.same_algorithm_sets() {
        let task = data
            .tasks
            .iter()
            .find(|t| t.algorithms.len() != data.algorithms.len())
            .map(|t| t.id.clone())
            .unwrap_or_default();
        return Err(Error::DifferingAlgorithmSets { task });
    }
    cfg.check(data.algorithms.len())?;
    let dir = data.direction;
    let mut warnings = data_warnings(data, cfg);
    let rankings = data
        .tasks
        .iter()
        .map(|t| rank_task(t, dir, &cfg.method))
        .collect::<Result<Vec<_>>>()?;
    let consensus = consensus_ranking(&rankings, cfg.weights_map().as_ref())?;
    let ordering = ordering_of(&consensus);
    let shown = cfg.shown(&ordering);
    let sections = data
        .tasks
        .par_iter()
        .enumerate()
        .map(|(k, t)| task_section(t, dir, cfg, &ordering, &cfg.bootstrap.for_task(k)))
        .collect::<Result<Vec<_>>>()?;

    let mut figures = Vec::new();
    let mut tables = Vec::new();
    let mut all = rankings.clone();
    all.push(consensus.clone());
    tables.push(("data/rankings.csv".to_string(), csv_string(|b| write_rankings_csv(&all, b))?));

    let across = cross_task_rank_distribution(&rankings)?;
    figures.push(Figure::new("blob-across-tasks", "all", "Rank distribution across tasks", blob_plot(&across, &shown)?));
    tables.push(("data/ranks-across-tasks.csv".into(), csv_string(|b| across.write_csv(b))?));

    let per_task: Vec<RankDistribution> = sections.iter().map(|s| s.boot.distribution()).collect();
    for panel in per_algorithm_panels(&shown, &per_task) {
        let subject = panel.title.clone();
        let tasks = panel.labels.clone();
        figures.push(Figure::new(
            "blob-per-algorithm",
            &subject,
            format!("Bootstrap ranks of {subject} per task"),
            blob_plot(&panel, &tasks)?,
        ));
    }

    let mut taus = Vec::new();
    for mut s in sections {
        warnings.append(&mut s.warnings);
        figures.append(&mut s.figures);
        tables.append(&mut s.tables);
        taus.extend(s.tau);
    }
    if taus.is_empty() {
        warnings.push("no task has a non-degenerate full-data ranking; the violin plot is skipped".into());
    } else {
        figures.push(Figure::new("violin", "all", "Kendall's tau per task", violin_plot(&taus)?));
        tables.push(("data/tau.csv".into(), csv_string(|b| TauSamples::write_csv(&taus, b))?));
    }

    let dm = task_distance_matrix(&rankings, cfg.distance)?;
    let dendrogram = hierarchical_cluster(&dm)?;
    figures.push(Figure::new("dendrogram", "all", "Task clustering", dendrogram_plot(&dendrogram)?));
    let layout = network_layout(&dm, &winners(&rankings), &cfg.layout)?;
    figures.push(Figure::new("network", "all", "Task network", network_plot(&layout, &data.algorithms)?));
    tables.push(("data/task-distances.csv".into(), csv_string(|b| dm.write_csv(b))?));
    tables.push(("data/dendrogram.nwk".into(), format!("{}\n", dendrogram.to_newick())));
    tables.push(("data/network-layout.csv".into(), csv_string(|b| layout.write_csv(b))?));
    finish(data, cfg, "multi", figures, tables, warnings)
}

fn finish(
    data: &ChallengeData,
    cfg: &ReportConfig,
    mode: &str,
    figures: Vec<Figure>,
    tables: Vec<(String, String)>,
    warnings: Vec<String>,
) -> Result<ReportBundle> {
    let metadata = metadata(cfg, mode, data)?;
    let config_echo = serde_json::to_string_pretty(cfg)?;
    let index = match cfg.format {
        OutputFormat::Html => html_index(&figures, &tables, &warnings, &config_echo, mode),
        OutputFormat::Markdown => markdown_index(&figures, &tables, &warnings, &config_echo, mode),
    };
    Ok(ReportBundle {
        root: cfg.output_dir.clone(),
        format: cfg.format,
        index,
        figures,
        tables,
        metadata,
        warnings,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn title(mode: &str) -> &'static str {
    if mode == "single" {
        "Ranking analysis report"
    } else {
        "Multi-task ranking analysis report"
    }
}

fn html_index(figures: &[Figure], tables: &[(String, String)], warnings: &[String], config: &str, mode: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>", title(mode));
    s.push_str("<style>body{font-family:sans-serif;max-width:1100px;margin:auto}pre{background:#f4f4f4;padding:8px}</style>\n");
    let _ = writeln!(s, "</head>\n<body>\n<h1>{}</h1>", title(mode));
    s.push_str("<h2>Configuration</h2>\n");
    let _ = writeln!(s, "<pre>{}</pre>", escape(config));
    s.push_str("<h2>Warnings</h2>\n");
    if warnings.is_empty() {
        s.push_str("<p>None.</p>\n");
    } else {
        s.push_str("<ul>\n");
        for w in warnings {
            let _ = writeln!(s, "<li>{}</li>", escape(w));
        }
        s.push_str("</ul>\n");
    }
    for f in figures {
        let svg = f.scene.to_svg();
        let body = svg.split_once("?>\n").map(|x| x.1).unwrap_or(&svg);
        let _ = writeln!(
            s,
            "<h2 id=\"{}\">{}</h2>\n<figure data-file=\"{}\">\n{}</figure>",
            escape(&f.path()),
            escape(&f.heading),
            escape(&f.path()),
            body
        );
    }
    s.push_str("<h2>Data files</h2>\n<ul>\n");
    for (path, _) in tables {
        let _ = writeln!(s, "<li><a href=\"{0}\">{0}</a></li>", escape(path));
    }
    s.push_str("<li><a href=\"run.json\">run.json</a></li>\n</ul>\n</body>\n</html>\n");
    s
}

fn markdown_index(figures: &[Figure], tables: &[(String, String)], warnings: &[String], config: &str, mode: &str) -> String {
    let mut s = format!("# {}\n\n## Configuration\n\n```json\n{config}\n```\n\n## Warnings\n\n", title(mode));
    if warnings.is_empty() {
        s.push_str("None.\n");
    } else {
        for w in warnings {
            let _ = writeln!(s, "- {w}");
        }
    }
    for f in figures {
        let _ = write!(s, "\n## {}\n\n![{}]({})\n", f.heading, f.heading, f.path());
    }
    s.push_str("\n## Data files\n\n");
    for (path, _) in tables {
        let _ = writeln!(s, "- [{path}]({path})");
    }
    s.push_str("- [run.json](run.json)\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{generate_ideal, generate_random, SimSpec};

    fn small_cfg(dir: &str) -> ReportConfig {
        ReportConfig {
            bootstrap: BootstrapConfig::new(40, 5).unwrap(),
            ..ReportConfig::new(dir)
        }
    }

    #[test]
    fn single_task_sections_in_order() {
        let d = generate_ideal(&SimSpec::ideal(1)).unwrap();
        let b = render_single_task_report(&d, &small_cfg("out")).unwrap();
        let sections: Vec<&str> = b.figures.iter().map(|f| f.section.as_str()).collect();
        assert_eq!(
            sections,
            vec!["dotbox", "podium", "heatmap", "lineplot", "blob", "violin", "significance"]
        );
        for f in &b.figures {
            assert!(b.index.contains(&f.path()));
        }
        assert!(b.index.contains("Warnings"));
        assert!(b.metadata.contains("\"seed\": 5"));
    }

    #[test]
    fn all_tied_task_skips_violin() {
        let d = generate_random(&SimSpec::random(2)).unwrap();
        let cfg = small_cfg("out");
        let b = render_single_task_report(&d, &cfg).unwrap();
        // test-based ranking on exchangeable data is typically all tied
        let tied = rank_task(&d.tasks[0], d.direction, &cfg.method).unwrap().is_all_tied();
        assert_eq!(b.figures.iter().any(|f| f.section == "violin"), !tied);
        assert_eq!(b.warnings.iter().any(|w| w.contains("violin plot is skipped")), tied);
    }

    #[test]
    fn top_k_restricts_figures_not_tables() {
        let d = generate_ideal(&SimSpec::ideal(1)).unwrap();
        let cfg = ReportConfig {
            top_k: Some(3),
            ..small_cfg("out")
        };
        let b = render_single_task_report(&d, &cfg).unwrap();
        let heat = &b.figures.iter().find(|f| f.section == "heatmap").unwrap().scene;
        assert_eq!(heat.count_class("heatmap-cell"), 9);
        let ranks = &b.tables.iter().find(|t| t.0 == "data/rankings.csv").unwrap().1;
        assert_eq!(ranks.lines().count(), 6);
        let bad = ReportConfig {
            top_k: Some(6),
            ..small_cfg("out")
        };
        assert!(render_single_task_report(&d, &bad).is_err());
    }

    #[test]
    fn multi_task_identical_tasks_merge_at_zero() {
        let d = generate_ideal(&SimSpec {
            tasks: 2,
            ..SimSpec::ideal(1)
        })
        .unwrap();
        let b = render_multi_task_report(&d, &small_cfg("out")).unwrap();
        let nwk = &b.tables.iter().find(|t| t.0 == "data/dendrogram.nwk").unwrap().1;
        assert_eq!(nwk, "(T1:0,T2:0);\n");
        let dm = &b.tables.iter().find(|t| t.0 == "data/task-distances.csv").unwrap().1;
        assert!(!dm.is_empty());
        let rk = &b.tables.iter().find(|t| t.0 == "data/rankings.csv").unwrap().1;
        assert!(rk.contains("consensus,A1,1,"));
        assert!(rk.contains("consensus,A5,5,"));
        for s in ["blob-across-tasks", "blob-per-algorithm", "violin", "dendrogram", "network"] {
            assert!(b.figures.iter().any(|f| f.section == s), "{s}");
        }
    }

    #[test]
    fn multi_task_needs_two_tasks() {
        let d = generate_ideal(&SimSpec::ideal(1)).unwrap();
        assert!(matches!(render_multi_task_report(&d, &small_cfg("out")), Err(Error::TooFewTasks(1))));
    }

    #[test]
    fn bundle_is_reproducible_and_written() {
        let d = generate_ideal(&SimSpec {
            tasks: 2,
            n: 12,
            ..SimSpec::ideal(4)
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let cfg = ReportConfig {
            format: OutputFormat::Markdown,
            ..small_cfg(dir.path().to_str().unwrap())
        };
        let a = render_multi_task_report(&d, &cfg).unwrap();
        let b = render_multi_task_report(&d, &cfg).unwrap();
        assert_eq!(a.files(), b.files());
        a.write().unwrap();
        assert!(dir.path().join("report.md").exists());
        assert!(dir.path().join("run.json").exists());
        for f in &a.figures {
            assert!(dir.path().join(f.path()).exists());
        }
    }
}
