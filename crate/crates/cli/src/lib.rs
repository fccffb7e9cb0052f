//! Command-line front end: `analyze`, `rank` and `simulate`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankscope_core::data::{apply_missing_policy, parse_assessment_csv, validate};
use rankscope_core::ranking::{consensus_ranking, rank_task, write_rankings_csv, DEFAULT_ALPHA};
use rankscope_core::report::{render_multi_task_report, render_single_task_report};
use rankscope_core::simgen::generate;
use rankscope_core::stability::DEFAULT_BOOTSTRAP_SAMPLES;
use rankscope_core::{
    Adjustment, BootstrapConfig, ChallengeData, ColumnMapping, Direction, Error, MissingPolicy, OutputFormat,
    RankingMethodSpec, ReportConfig, SimKind, SimSpec,
};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_190_101;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rankscope", version, about = "Ranking analysis and visualization for benchmark challenges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a full report bundle from assessment data.
    Analyze(AnalyzeArgs),
    /// Print rankings as CSV to standard output.
    Rank(RankArgs),
    /// Write a synthetic challenge as CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdjustArg {
    Holm,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Html,
    Md,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Single,
    Multi,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Ideal,
    Random,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Assessment data CSV.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Column names for task, case, algorithm and value.
    #[arg(long, value_name = "task,case,algorithm,value", value_parser = parse_columns)]
    columns: Option<ColumnMapping>,
    /// Smaller metric values are better.
    #[arg(long)]
    small_better: bool,
    /// Missing-value policy: worst-value=X, worst-rank or error.
    #[arg(long, value_name = "POLICY", default_value = "error", value_parser = parse_na)]
    na: MissingPolicy,
    /// Restrict all tasks to the algorithms present in every task.
    #[arg(long)]
    intersect_algorithms: bool,
    /// Ranking method.
    #[arg(long, value_name = "METHOD", default_value = "test-based", value_parser = parse_method)]
    method: String,
    /// Significance level for test-based ranking and significance maps.
    #[arg(long, value_name = "A", default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Consensus weights as task=w,...
    #[arg(long, value_name = "task=w,...", value_parser = parse_weights)]
    weights: Option<BTreeMap<String, f64>>,
    /// Single- or multi-task analysis; auto picks from the number of tasks.
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output directory for the report bundle.
    #[arg(long, value_name = "DIR", default_value = "report")]
    output: PathBuf,
    /// Bootstrap samples.
    #[arg(long, value_name = "B", default_value_t = DEFAULT_BOOTSTRAP_SAMPLES)]
    bootstrap: usize,
    /// Seed for bootstrap, jitter, tie breaks and layout.
    #[arg(long, value_name = "U64", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Multiple-testing adjustment for significance maps.
    #[arg(long, value_enum, default_value = "holm")]
    adjust: AdjustArg,
    /// Show only the best K algorithms in figures.
    #[arg(long, value_name = "K")]
    top_k: Option<usize>,
    /// Index document format.
    #[arg(long, value_enum, default_value = "html")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    kind: KindArg,
    /// Test cases per task.
    #[arg(long, default_value_t = 50)]
    cases: usize,
    /// Number of algorithms.
    #[arg(long, default_value_t = 5)]
    algorithms: usize,
    /// Number of tasks.
    #[arg(long, default_value_t = 1)]
    tasks: usize,
    #[arg(long, value_name = "U64", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output CSV (default: standard output).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn parse_columns(s: &str) -> Result<ColumnMapping, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [task, case, algorithm, value] = parts.as_slice() else {
        return Err("expected four comma-separated column names".into());
    };
    ColumnMapping::new(task, case, algorithm, value).map_err(|e| e.to_string())
}

fn parse_na(s: &str) -> Result<MissingPolicy, String> {
    match s {
        "worst-rank" => Ok(MissingPolicy::WorstRank),
        "error" => Ok(MissingPolicy::Error),
        _ => {
            let v = s
                .strip_prefix("worst-value=")
                .ok_or_else(|| format!("unknown policy `{s}`; use worst-value=X, worst-rank or error"))?;
            let v: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
            if !v.is_finite() {
                return Err("worst value must be finite".into());
            }
            Ok(MissingPolicy::WorstValue(v))
        }
    }
}

fn parse_method(s: &str) -> Result<String, String> {
    s.parse::<RankingMethodSpec>().map(|_| s.to_string()).map_err(|e| e.to_string())
}

fn parse_weights(s: &str) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in s.split(',').filter(|i| !i.is_empty()) {
        let (task, w) = item.split_once('=').ok_or_else(|| format!("`{item}` is not task=weight"))?;
        let w: f64 = w.parse().map_err(|_| format!("`{w}` is not a number"))?;
        if !(w > 0.0 && w.is_finite()) {
            return Err(format!("weight of task `{task}` must be positive"));
        }
        out.insert(task.to_string(), w);
    }
    Ok(out)
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

fn data_failure(e: Error) -> Failure {
    match e {
        Error::InvalidConfig(_) | Error::TooFewTasks(_) => Failure::Usage(e.to_string()),
        _ => Failure::Data(e.to_string()),
    }
}

impl DataArgs {
    fn method(&self) -> RankingMethodSpec {
        let m: RankingMethodSpec = self.method.parse().expect("validated by the parser");
        match m.scheme {
            rankscope_core::Scheme::TestBased => RankingMethodSpec::test_based(self.alpha),
            _ => m,
        }
    }

    fn direction(&self) -> Direction {
        if self.small_better {
            Direction::SmallerBetter
        } else {
            Direction::LargerBetter
        }
    }

    fn check(&self) -> Result<(), Failure> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Failure::Usage(format!("--alpha {} must lie in (0, 1)", self.alpha)));
        }
        if self.threads == Some(0) {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        Ok(())
    }

    fn load(&self) -> Result<ChallengeData, Failure> {
        let file = File::open(&self.input)
            .map_err(|e| Failure::Data(format!("cannot read `{}`: {e}", self.input.display())))?;
        let mapping = self.columns.clone().unwrap_or_default();
        let in_file = |e: Error| Failure::Data(format!("`{}`: {e}", self.input.display()));
        let data = parse_assessment_csv(BufReader::new(file), &mapping, self.direction()).map_err(in_file)?;
        let data = apply_missing_policy(&data, self.na).map_err(in_file)?;
        data.harmonize(self.intersect_algorithms).map_err(in_file)
    }

    fn multi(&self, data: &ChallengeData) -> Result<bool, Failure> {
        let m = data.tasks.len();
        match self.mode {
            ModeArg::Auto => Ok(m > 1),
            ModeArg::Multi => Ok(true),
            ModeArg::Single if m == 1 => Ok(false),
            ModeArg::Single => Err(Failure::Usage(format!(
                "--mode single needs data with one task, found {m}"
            ))),
        }
    }
}

/// Captured output streams, flushed to the caller's writers at the end.
#[derive(Default)]
struct Io {
    out: Vec<u8>,
    err: Vec<u8>,
}

fn analyze(args: &AnalyzeArgs, io: &mut Io) -> Result<(), Failure> {
    args.data.check()?;
    if args.bootstrap == 0 {
        return Err(Failure::Usage("--bootstrap must be at least 1".into()));
    }
    let data = args.data.load()?;
    let multi = args.data.multi(&data)?;
    let cfg = ReportConfig {
        method: args.data.method(),
        weights: args.data.weights.clone(),
        bootstrap: BootstrapConfig::new(args.bootstrap, args.seed).map_err(data_failure)?,
        alpha: args.data.alpha,
        adjustment: match args.adjust {
            AdjustArg::Holm => Adjustment::Holm,
            AdjustArg::None => Adjustment::None,
        },
        format: match args.format {
            FormatArg::Html => OutputFormat::Html,
            FormatArg::Md => OutputFormat::Markdown,
        },
        top_k: args.top_k,
        layout: rankscope_core::similarity::LayoutConfig {
            seed: args.seed,
            ..Default::default()
        },
        ..ReportConfig::new(&args.output)
    };
    let bundle = if multi {
        render_multi_task_report(&data, &cfg)
    } else {
        render_single_task_report(&data, &cfg)
    }
    .map_err(data_failure)?;
    bundle
        .write()
        .map_err(|e| Failure::Internal(format!("cannot write report to `{}`: {e}", args.output.display())))?;
    for w in &bundle.warnings {
        let _ = writeln!(io.err, "warning: {w}");
    }
    let _ = writeln!(io.out, "{}", bundle.index_path().display());
    Ok(())
}

fn rank(args: &RankArgs, io: &mut Io) -> Result<(), Failure> {
    let a = &args.data;
    a.check()?;
    let data = a.load()?;
    let multi = a.multi(&data)?;
    for issue in validate(&data, None) {
        let _ = writeln!(io.err, "warning: {issue}");
    }
    let method = a.method();
    let mut rankings = data
        .tasks
        .iter()
        .map(|t| rank_task(t, data.direction, &method))
        .collect::<rankscope_core::Result<Vec<_>>>()
        .map_err(data_failure)?;
    if multi {
        let w = a.weights.as_ref().map(|w| w.iter().map(|(k, v)| (k.clone(), *v)).collect());
        let c = consensus_ranking(&rankings, w.as_ref()).map_err(data_failure)?;
        rankings.push(c);
    }
    let mut buf = Vec::new();
    write_rankings_csv(&rankings, &mut buf).map_err(|e| Failure::Internal(e.to_string()))?;
    io.out.write_all(&buf).map_err(|e| Failure::Internal(e.to_string()))?;
    Ok(())
}

fn simulate(args: &SimulateArgs, io: &mut Io) -> Result<(), Failure> {
    let spec = SimSpec {
        kind: match args.kind {
            KindArg::Ideal => SimKind::Ideal,
            KindArg::Random => SimKind::Random,
        },
        n: args.cases,
        p: args.algorithms,
        tasks: args.tasks,
        seed: args.seed,
    };
    let data = generate(&spec).map_err(|e| Failure::Usage(e.to_string()))?;
    let csv = data.to_csv_string().map_err(|e| Failure::Internal(e.to_string()))?;
    match &args.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::Internal(format!("cannot write `{}`: {e}", path.display())))?,
        None => io.out.write_all(csv.as_bytes()).map_err(|e| Failure::Internal(e.to_string()))?,
    }
    Ok(())
}

fn threads(cli: &Cli) -> Option<usize> {
    match &cli.command {
        Command::Analyze(a) => a.data.threads,
        Command::Rank(r) => r.data.threads,
        Command::Simulate(_) => None,
    }
}

fn dispatch(cli: &Cli, io: &mut Io) -> Result<(), Failure> {
    let go = |io: &mut Io| match &cli.command {
        Command::Analyze(a) => analyze(a, io),
        Command::Rank(r) => rank(r, io),
        Command::Simulate(s) => simulate(s, io),
    };
    match threads(cli) {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Internal(e.to_string()))?;
            pool.install(|| go(io))
        }
        None => go(io),
    }
}

/// Runs the tool on `argv` (including the program name) and returns the exit
/// code, writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let mut io = Io::default();
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli, &mut io)));
    let code = match result {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(f)) => {
            let _ = writeln!(io.err, "error: {}", f.message());
            f.code()
        }
        Err(_) => {
            let _ = writeln!(io.err, "error: internal failure");
            EXIT_INTERNAL
        }
    };
    let _ = out.write_all(&io.out);
    let _ = err.write_all(&io.err);
    code
}

/// Runs the tool with the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
