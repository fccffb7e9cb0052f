//! Assessment data: parsing, missing-value policies and validation.
//!
//! A challenge is a set of tasks; each task is a complete grid of metric
//! values over its test cases and the participating algorithms.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether larger or smaller metric values are better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    LargerBetter,
    SmallerBetter,
}

impl Direction {
    /// Maps a value onto a scale where larger is always better.
    #[inline]
    pub fn orient(self, v: f64) -> f64 {
        match self {
            Direction::LargerBetter => v,
            Direction::SmallerBetter => -v,
        }
    }
}

/// One cell of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Observed(f64),
    /// No value and no policy applied yet.
    Missing,
    /// Missing value replaced by a fixed unfavorable value.
    Imputed(f64),
    /// Missing value that ranks last on its test case.
    WorstRank,
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Observed(v) | Cell::Imputed(v) => Some(v),
            Cell::Missing | Cell::WorstRank => None,
        }
    }

    pub fn is_imputed(self) -> bool {
        matches!(self, Cell::Imputed(_) | Cell::WorstRank)
    }
}

/// How missing values are resolved before ranking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MissingPolicy {
    WorstValue(f64),
    WorstRank,
    Error,
}

/// Names of the four CSV columns that carry the assessment data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub task: String,
    pub case: String,
    pub algorithm: String,
    pub value: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            task: "task".into(),
            case: "case".into(),
            algorithm: "algorithm".into(),
            value: "value".into(),
        }
    }
}

impl ColumnMapping {
    pub fn new(task: &str, case: &str, algorithm: &str, value: &str) -> Result<Self> {
        let m = Self {
            task: task.into(),
            case: case.into(),
            algorithm: algorithm.into(),
            value: value.into(),
        };
        m.check()?;
        Ok(m)
    }

    fn names(&self) -> [&str; 4] {
        [&self.task, &self.case, &self.algorithm, &self.value]
    }

    fn check(&self) -> Result<()> {
        let names = self.names();
        for (i, a) in names.iter().enumerate() {
            if names[i + 1..].contains(a) {
                return Err(Error::DuplicateColumnMapping(a.to_string()));
            }
        }
        Ok(())
    }
}

/// Values of one task laid out case-major: `values[case * p + algorithm]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskData {
    pub id: String,
    pub cases: Vec<String>,
    pub algorithms: Vec<String>,
    values: Vec<Cell>,
}

impl TaskData {
    /// Builds a task from a case-major cell vector.
    pub fn new(id: impl Into<String>, cases: Vec<String>, algorithms: Vec<String>, values: Vec<Cell>) -> Result<Self> {
        let id = id.into();
        if cases.is_empty() {
            return Err(Error::EmptyInput(format!("task `{id}` has no test cases")));
        }
        if algorithms.is_empty() {
            return Err(Error::EmptyInput(format!("task `{id}` has no algorithms")));
        }
        if values.len() != cases.len() * algorithms.len() {
            return Err(Error::InvalidConfig(format!(
                "task `{id}`: {} cells for {} cases x {} algorithms",
                values.len(),
                cases.len(),
                algorithms.len()
            )));
        }
        Ok(Self { id, cases, algorithms, values })
    }

    /// Convenience constructor from per-algorithm value columns.
    pub fn from_columns(id: impl Into<String>, columns: &[(&str, Vec<f64>)]) -> Result<Self> {
        let n = columns.first().map(|c| c.1.len()).unwrap_or(0);
        if columns.iter().any(|c| c.1.len() != n) {
            return Err(Error::InvalidConfig("columns differ in length".into()));
        }
        let cases = (1..=n).map(|i| format!("c{i}")).collect();
        let algorithms = columns.iter().map(|c| c.0.to_string()).collect();
        let mut values = Vec::with_capacity(n * columns.len());
        for i in 0..n {
            for c in columns {
                values.push(Cell::Observed(c.1[i]));
            }
        }
        Self::new(id, cases, algorithms, values)
    }

    pub fn n_cases(&self) -> usize {
        self.cases.len()
    }

    pub fn n_algorithms(&self) -> usize {
        self.algorithms.len()
    }

    pub fn cell(&self, case: usize, algorithm: usize) -> Cell {
        self.values[case * self.algorithms.len() + algorithm]
    }

    pub fn cells(&self) -> &[Cell] {
        &self.values
    }

    pub fn algorithm_index(&self, name: &str) -> Option<usize> {
        self.algorithms.iter().position(|a| a == name)
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(|c| matches!(c, Cell::Missing))
    }

    /// Values of one algorithm across cases; unresolved cells are `None`.
    pub fn column(&self, algorithm: usize) -> Vec<Option<f64>> {
        (0..self.n_cases()).map(|c| self.cell(c, algorithm).value()).collect()
    }

    /// Dense grid of the values used for ranking.
    ///
    /// Cells flagged [`Cell::WorstRank`] get a value strictly worse than every
    /// resolved value of the task, so they take the last rank on their case.
    /// Fails if any cell is still [`Cell::Missing`].
    pub fn grid(&self, direction: Direction) -> Result<Grid> {
        if let Some(pos) = self.values.iter().position(|c| matches!(c, Cell::Missing)) {
            let p = self.algorithms.len();
            let count = self.values.iter().filter(|c| matches!(c, Cell::Missing)).count();
            return Err(Error::MissingPresent {
                count,
                task: self.id.clone(),
                case: self.cases[pos / p].clone(),
                algorithm: self.algorithms[pos % p].clone(),
            });
        }
        let resolved: Vec<f64> = self.values.iter().filter_map(|c| c.value()).collect();
        let sentinel = if resolved.is_empty() {
            0.0
        } else {
            let lo = resolved.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = resolved.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo + 1.0;
            match direction {
                Direction::LargerBetter => lo - span,
                Direction::SmallerBetter => hi + span,
            }
        };
        let data = self.values.iter().map(|c| c.value().unwrap_or(sentinel)).collect();
        Ok(Grid {
            n_cases: self.n_cases(),
            n_algorithms: self.n_algorithms(),
            data,
        })
    }

    /// Restricts the task to the named algorithms, in the given order.
    pub fn select_algorithms(&self, names: &[String]) -> Result<TaskData> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| self.algorithm_index(n).ok_or(Error::AlgorithmSetMismatch))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(self.n_cases() * idx.len());
        for c in 0..self.n_cases() {
            for &a in &idx {
                values.push(self.cell(c, a));
            }
        }
        TaskData::new(self.id.clone(), self.cases.clone(), names.to_vec(), values)
    }
}

/// Dense case-major matrix of resolved metric values for one task.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_cases: usize,
    n_algorithms: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_algorithms = rows.first().map(Vec::len).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == n_algorithms), "ragged rows");
        Self {
            n_cases: rows.len(),
            n_algorithms,
            data: rows.concat(),
        }
    }

    pub fn n_cases(&self) -> usize {
        self.n_cases
    }

    pub fn n_algorithms(&self) -> usize {
        self.n_algorithms
    }

    pub fn get(&self, case: usize, algorithm: usize) -> f64 {
        self.data[case * self.n_algorithms + algorithm]
    }

    /// Values of every algorithm on one case.
    pub fn row(&self, case: usize) -> &[f64] {
        let start = case * self.n_algorithms;
        &self.data[start..start + self.n_algorithms]
    }

    /// Values of one algorithm on every case.
    pub fn column(&self, algorithm: usize) -> Vec<f64> {
        (0..self.n_cases).map(|c| self.get(c, algorithm)).collect()
    }

    /// New grid made of the given case rows (repetitions allowed).
    pub fn resample(&self, cases: &[usize]) -> Grid {
        let mut data = Vec::with_capacity(cases.len() * self.n_algorithms);
        for &c in cases {
            data.extend_from_slice(self.row(c));
        }
        Grid {
            n_cases: cases.len(),
            n_algorithms: self.n_algorithms,
            data,
        }
    }

    /// Applies `f` to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid {
        Grid {
            n_cases: self.n_cases,
            n_algorithms: self.n_algorithms,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// A full challenge: one or more tasks sharing a metric direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ChallengeData {
    pub tasks: Vec<TaskData>,
    /// Union of algorithms over all tasks, in order of first appearance.
    pub algorithms: Vec<String>,
    pub direction: Direction,
}

/// Diagnostics reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Issue {
    NonFiniteValue {
        task: String,
        case: String,
        algorithm: String,
        value: f64,
    },
    DifferingAlgorithmSets {
        task: String,
        missing: Vec<String>,
    },
    SmallSampleWarning {
        task: String,
        n: usize,
    },
    RangeViolation {
        task: String,
        case: String,
        algorithm: String,
        value: f64,
    },
    UnresolvedMissing {
        task: String,
        count: usize,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NonFiniteValue { task, case, algorithm, value } => {
                write!(f, "non-finite value {value} (task {task}, case {case}, algorithm {algorithm})")
            }
            Issue::DifferingAlgorithmSets { task, missing } => {
                write!(f, "task {task} lacks algorithms: {}", missing.join(", "))
            }
            Issue::SmallSampleWarning { task, n } => {
                write!(f, "task {task} has only {n} test cases; rankings and bootstrap results are unstable")
            }
            Issue::RangeViolation { task, case, algorithm, value } => {
                write!(f, "value {value} outside the declared range (task {task}, case {case}, algorithm {algorithm})")
            }
            Issue::UnresolvedMissing { task, count } => {
                write!(f, "task {task} has {count} missing value(s) without a policy")
            }
        }
    }
}

/// Tasks with fewer cases than this get a [`Issue::SmallSampleWarning`].
pub const SMALL_SAMPLE_THRESHOLD: usize = 5;

impl ChallengeData {
    pub fn new(tasks: Vec<TaskData>, direction: Direction) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::EmptyInput("no tasks".into()));
        }
        let mut algorithms: IndexSet<String> = IndexSet::new();
        for t in &tasks {
            algorithms.extend(t.algorithms.iter().cloned());
        }
        if algorithms.len() < 2 {
            return Err(Error::TooFewAlgorithms {
                required: 2,
                found: algorithms.len(),
            });
        }
        Ok(Self {
            tasks,
            algorithms: algorithms.into_iter().collect(),
            direction,
        })
    }

    pub fn task(&self, id: &str) -> Result<&TaskData> {
        self.tasks
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::UnknownTask(id.to_string()))
    }

    pub fn task_ids(&self) -> Vec<String> {
        self.tasks.iter().map(|t| t.id.clone()).collect()
    }

    pub fn same_algorithm_sets(&self) -> bool {
        self.tasks.iter().all(|t| t.algorithms.len() == self.algorithms.len())
    }

    /// Makes every task use the same algorithm set in the same order.
    ///
    /// Without `intersect`, differing sets are an error. With it, each task is
    /// restricted to the algorithms present in all tasks.
    pub fn harmonize(self, intersect: bool) -> Result<Self> {
        let common: Vec<String> = self
            .algorithms
            .iter()
            .filter(|a| self.tasks.iter().all(|t| t.algorithm_index(a).is_some()))
            .cloned()
            .collect();
        if common.len() != self.algorithms.len() && !intersect {
            let task = self
                .tasks
                .iter()
                .find(|t| t.algorithms.len() != self.algorithms.len())
                .map(|t| t.id.clone())
                .unwrap_or_default();
            return Err(Error::DifferingAlgorithmSets { task });
        }
        let tasks = self
            .tasks
            .iter()
            .map(|t| t.select_algorithms(&common))
            .collect::<Result<Vec<_>>>()?;
        ChallengeData::new(tasks, self.direction)
    }

    /// Restricts every task to the named algorithms.
    pub fn select_algorithms(&self, names: &[String]) -> Result<Self> {
        let tasks = self
            .tasks
            .iter()
            .map(|t| t.select_algorithms(names))
            .collect::<Result<Vec<_>>>()?;
        ChallengeData::new(tasks, self.direction)
    }

    /// Writes `task,case,algorithm,value,imputed` rows. Unresolved cells are `NA`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["task", "case", "algorithm", "value", "imputed"])
            .map_err(csv_io)?;
        for t in &self.tasks {
            for (c, case) in t.cases.iter().enumerate() {
                for (a, alg) in t.algorithms.iter().enumerate() {
                    let cell = t.cell(c, a);
                    let value = cell.value().map(format_value).unwrap_or_else(|| "NA".into());
                    let imputed = if cell.is_imputed() { "true" } else { "false" };
                    w.write_record([t.id.as_str(), case, alg, &value, imputed])
                        .map_err(csv_io)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedCsv {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

fn parse_cell(raw: &str, line: u64) -> Result<Option<f64>> {
    let s = raw.trim();
    if s.is_empty() || s == "NA" {
        return Ok(None);
    }
    // Only `.` as decimal separator; `str::parse` already rejects `,`.
    s.parse::<f64>().map(Some).map_err(|_| Error::NonNumericValue {
        line,
        value: raw.to_string(),
    })
}

/// Reads assessment data from CSV.
///
/// Tasks, cases and algorithms are ordered by first appearance. Every
/// (case, algorithm) pair of a task that has no row, or whose value is `NA`
/// or empty, becomes [`Cell::Missing`].
pub fn parse_assessment_csv<R: Read>(source: R, mapping: &ColumnMapping, direction: Direction) -> Result<ChallengeData> {
    mapping.check()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::Headers)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };
    let (ti, ci, ai, vi) = (col(&mapping.task)?, col(&mapping.case)?, col(&mapping.algorithm)?, col(&mapping.value)?);

    struct Partial {
        cases: IndexSet<String>,
        algorithms: IndexSet<String>,
        cells: HashMap<(usize, usize), Option<f64>>,
    }
    let mut tasks: IndexMap<String, Partial> = IndexMap::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_err(e)),
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let task = record[ti].trim().to_string();
        let case = record[ci].trim().to_string();
        let alg = record[ai].trim().to_string();
        let value = parse_cell(&record[vi], line)?;
        let partial = tasks.entry(task.clone()).or_insert_with(|| Partial {
            cases: IndexSet::new(),
            algorithms: IndexSet::new(),
            cells: HashMap::new(),
        });
        let (c, _) = partial.cases.insert_full(case.clone());
        let (a, _) = partial.algorithms.insert_full(alg.clone());
        if partial.cells.insert((c, a), value).is_some() {
            return Err(Error::DuplicateCell {
                task,
                case,
                algorithm: alg,
            });
        }
    }
    if tasks.is_empty() {
        return Err(Error::EmptyInput("CSV contains no data rows".into()));
    }

    let mut global: IndexSet<String> = IndexSet::new();
    for p in tasks.values() {
        global.extend(p.algorithms.iter().cloned());
    }
    let mut out = Vec::with_capacity(tasks.len());
    for (id, p) in tasks {
        // Keep algorithm order consistent with the global first-appearance order.
        let algs: Vec<String> = global.iter().filter(|a| p.algorithms.contains(*a)).cloned().collect();
        let mut values = Vec::with_capacity(p.cases.len() * algs.len());
        for c in 0..p.cases.len() {
            for alg in &algs {
                let a = p.algorithms.get_index_of(alg).expect("algorithm seen in task");
                values.push(match p.cells.get(&(c, a)) {
                    Some(Some(v)) => Cell::Observed(*v),
                    _ => Cell::Missing,
                });
            }
        }
        out.push(TaskData::new(id, p.cases.into_iter().collect(), algs, values)?);
    }
    ChallengeData::new(out, direction)
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::MalformedCsv {
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        csv::ErrorKind::Utf8 { err, .. } => Error::MalformedCsv {
            line,
            message: err.to_string(),
        },
        other => Error::MalformedCsv {
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Resolves missing cells. Applying the same policy twice is a no-op.
pub fn apply_missing_policy(data: &ChallengeData, policy: MissingPolicy) -> Result<ChallengeData> {
    if let MissingPolicy::WorstValue(v) = policy {
        if !v.is_finite() {
            return Err(Error::NonFiniteWorstValue(v));
        }
    }
    let mut out = data.clone();
    if policy == MissingPolicy::Error {
        let mut count = 0;
        let mut first = None;
        for t in &data.tasks {
            let p = t.n_algorithms();
            for (i, c) in t.values.iter().enumerate() {
                if matches!(c, Cell::Missing) {
                    count += 1;
                    first.get_or_insert_with(|| (t.id.clone(), t.cases[i / p].clone(), t.algorithms[i % p].clone()));
                }
            }
        }
        if let Some((task, case, algorithm)) = first {
            return Err(Error::MissingPresent {
                count,
                task,
                case,
                algorithm,
            });
        }
        return Ok(out);
    }
    for t in &mut out.tasks {
        for c in &mut t.values {
            if matches!(c, Cell::Missing) {
                *c = match policy {
                    MissingPolicy::WorstValue(v) => Cell::Imputed(v),
                    _ => Cell::WorstRank,
                };
            }
        }
    }
    Ok(out)
}

/// Diagnostics for the data. `range` is the declared metric range, if any.
pub fn validate(data: &ChallengeData, range: Option<(f64, f64)>) -> Vec<Issue> {
    let mut issues = Vec::new();
    for t in &data.tasks {
        let missing_algs: Vec<String> = data
            .algorithms
            .iter()
            .filter(|a| t.algorithm_index(a).is_none())
            .cloned()
            .collect();
        if !missing_algs.is_empty() {
            issues.push(Issue::DifferingAlgorithmSets {
                task: t.id.clone(),
                missing: missing_algs,
            });
        }
        if t.n_cases() < SMALL_SAMPLE_THRESHOLD {
            issues.push(Issue::SmallSampleWarning {
                task: t.id.clone(),
                n: t.n_cases(),
            });
        }
        let unresolved = t.values.iter().filter(|c| matches!(c, Cell::Missing)).count();
        if unresolved > 0 {
            issues.push(Issue::UnresolvedMissing {
                task: t.id.clone(),
                count: unresolved,
            });
        }
        for c in 0..t.n_cases() {
            for a in 0..t.n_algorithms() {
                let Some(v) = t.cell(c, a).value() else { continue };
                let at = || (t.id.clone(), t.cases[c].clone(), t.algorithms[a].clone());
                if !v.is_finite() {
                    let (task, case, algorithm) = at();
                    issues.push(Issue::NonFiniteValue { task, case, algorithm, value: v });
                } else if let Some((lo, hi)) = range {
                    if v < lo || v > hi {
                        let (task, case, algorithm) = at();
                        issues.push(Issue::RangeViolation { task, case, algorithm, value: v });
                    }
                }
            }
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ChallengeData> {
        parse_assessment_csv(s.as_bytes(), &ColumnMapping::default(), Direction::LargerBetter)
    }

    const FULL: &str = "task,case,algorithm,value
T1,c1,A1,0.9
T1,c1,A2,0.8
T1,c2,A1,0.7
T1,c2,A2,0.6
T2,c1,A1,0.5
T2,c1,A2,0.4
T2,c2,A1,0.3
T2,c2,A2,0.2
";

    #[test]
    fn complete_grid() {
        let d = parse(FULL).unwrap();
        assert_eq!(d.tasks.len(), 2);
        assert_eq!(d.algorithms, vec!["A1", "A2"]);
        for t in &d.tasks {
            assert_eq!(t.n_cases(), 2);
            assert!(!t.has_missing());
        }
        assert_eq!(d.tasks[1].cell(1, 0), Cell::Observed(0.3));
    }

    #[test]
    fn absent_row_is_missing() {
        let src = FULL.replace("T1,c2,A2,0.6\n", "");
        let d = parse(&src).unwrap();
        assert_eq!(d.tasks[0].cell(1, 1), Cell::Missing);
        let src = FULL.replace("T1,c2,A2,0.6", "T1,c2,A2,NA").replace("T2,c1,A1,0.5", "T2,c1,A1,");
        let d = parse(&src).unwrap();
        assert_eq!(d.tasks[0].cell(1, 1), Cell::Missing);
        assert_eq!(d.tasks[1].cell(0, 0), Cell::Missing);
    }

    #[test]
    fn duplicate_cell_rejected() {
        let src = format!("{FULL}T1,c1,A1,0.1\n");
        assert!(matches!(parse(&src), Err(Error::DuplicateCell { .. })));
    }

    #[test]
    fn malformed_and_unknown_columns() {
        assert!(matches!(parse("task,case,algorithm,value\nT1,c1,A1\n"), Err(Error::MalformedCsv { .. })));
        assert!(matches!(parse("task,case,algo,value\nT1,c1,A1,1\n"), Err(Error::UnknownColumn(c)) if c == "algorithm"));
        assert!(matches!(
            parse("task,case,algorithm,value\nT1,c1,A1,0,5\n"),
            Err(Error::MalformedCsv { .. })
        ));
        assert!(matches!(
            parse("task,case,algorithm,value\nT1,c1,A1,\"0,5\"\nT1,c1,A2,1\n"),
            Err(Error::NonNumericValue { .. })
        ));
        assert!(ColumnMapping::new("a", "b", "a", "c").is_err());
    }

    #[test]
    fn custom_mapping() {
        let src = "metric,algo,id,challenge\n0.5,X,1,T\n0.7,Y,1,T\n";
        let m = ColumnMapping::new("challenge", "id", "algo", "metric").unwrap();
        let d = parse_assessment_csv(src.as_bytes(), &m, Direction::SmallerBetter).unwrap();
        assert_eq!(d.algorithms, vec!["X", "Y"]);
        assert_eq!(d.tasks[0].cell(0, 1), Cell::Observed(0.7));
    }

    #[test]
    fn worst_value_imputation() {
        let src = FULL.replace("T1,c2,A2,0.6\n", "");
        let d = parse(&src).unwrap();
        let fixed = apply_missing_policy(&d, MissingPolicy::WorstValue(0.0)).unwrap();
        assert_eq!(fixed.tasks[0].cell(1, 1), Cell::Imputed(0.0));
        assert_eq!(fixed.tasks[0].cell(1, 1).value(), Some(0.0));
        let again = apply_missing_policy(&fixed, MissingPolicy::WorstValue(0.0)).unwrap();
        assert_eq!(again, fixed);
        assert!(apply_missing_policy(&d, MissingPolicy::WorstValue(f64::NAN)).is_err());
    }

    #[test]
    fn policies_are_noops_on_complete_data() {
        let d = parse(FULL).unwrap();
        for p in [MissingPolicy::WorstValue(0.0), MissingPolicy::WorstRank, MissingPolicy::Error] {
            assert_eq!(apply_missing_policy(&d, p).unwrap(), d);
        }
    }

    #[test]
    fn error_policy_fails_on_missing() {
        let d = parse(&FULL.replace("T2,c2,A1,0.3\n", "")).unwrap();
        match apply_missing_policy(&d, MissingPolicy::Error) {
            Err(Error::MissingPresent { count, task, .. }) => {
                assert_eq!(count, 1);
                assert_eq!(task, "T2");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn worst_rank_sentinel_is_worst() {
        let t = TaskData::new(
            "T",
            vec!["c1".into()],
            vec!["A".into(), "B".into(), "C".into()],
            vec![Cell::Observed(0.2), Cell::WorstRank, Cell::Observed(0.1)],
        )
        .unwrap();
        let g = t.grid(Direction::LargerBetter).unwrap();
        assert!(g.get(0, 1) < 0.1);
        let g = t.grid(Direction::SmallerBetter).unwrap();
        assert!(g.get(0, 1) > 0.2);
        let unresolved = TaskData::new("T", vec!["c".into()], vec!["A".into()], vec![Cell::Missing]).unwrap();
        assert!(unresolved.grid(Direction::LargerBetter).is_err());
    }

    #[test]
    fn validation_issues() {
        let d = parse(FULL).unwrap();
        let issues = validate(&d, Some((0.0, 1.0)));
        assert!(issues.iter().all(|i| matches!(i, Issue::SmallSampleWarning { n: 2, .. })));

        let src = FULL.replace("T1,c1,A1,0.9", "T1,c1,A1,1.2");
        let issues = validate(&parse(&src).unwrap(), Some((0.0, 1.0)));
        assert!(issues.iter().any(|i| matches!(i, Issue::RangeViolation { value, .. } if *value == 1.2)));

        let src = FULL.replace("T1,c1,A1,0.9", "T1,c1,A1,inf");
        let issues = validate(&parse(&src).unwrap(), None);
        assert!(issues.iter().any(|i| matches!(i, Issue::NonFiniteValue { .. })));
    }

    #[test]
    fn three_cases_warns() {
        let t = TaskData::from_columns("T", &[("A", vec![1.0, 2.0, 3.0]), ("B", vec![1.0, 2.0, 3.0])]).unwrap();
        let d = ChallengeData::new(vec![t], Direction::LargerBetter).unwrap();
        assert_eq!(
            validate(&d, None),
            vec![Issue::SmallSampleWarning { task: "T".into(), n: 3 }]
        );
    }

    #[test]
    fn differing_algorithm_sets() {
        let src = format!("{FULL}T1,c1,A3,0.1\nT1,c2,A3,0.1\n");
        let d = parse(&src).unwrap();
        assert!(validate(&d, None)
            .iter()
            .any(|i| matches!(i, Issue::DifferingAlgorithmSets { task, .. } if task == "T2")));
        assert!(matches!(d.clone().harmonize(false), Err(Error::DifferingAlgorithmSets { .. })));
        let h = d.harmonize(true).unwrap();
        assert_eq!(h.algorithms, vec!["A1", "A2"]);
        assert!(h.tasks.iter().all(|t| t.algorithms == h.algorithms));
    }

    #[test]
    fn export_marks_imputed() {
        let d = parse(&FULL.replace("T1,c2,A2,0.6\n", "")).unwrap();
        let d = apply_missing_policy(&d, MissingPolicy::WorstRank).unwrap();
        let csv = d.to_csv_string().unwrap();
        assert!(csv.starts_with("task,case,algorithm,value,imputed\n"));
        assert!(csv.contains("T1,c2,A2,NA,true\n"));
        assert!(csv.contains("T1,c1,A1,0.9,false\n"));
    }
}
