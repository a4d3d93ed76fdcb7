//! Factorial experiment harness.
//!
//! A grid crosses problems, measures, distribution kinds, probability
//! choices, oracle strategies and leading-set sizes. Every cell runs a fixed
//! number of sessions; runs whose final diagnosis repeats an earlier run of
//! the same cell, and aborted runs, are left out of the statistics.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generator::instantiate_fault_models;
use crate::logic::Dpi;
use crate::oracle::OracleKind;
use crate::prob::{DistributionKind, FaultModel};
use crate::qsm::Measure;
use crate::seed::derive_seed;
use crate::session::{run_session, SessionConfig, DEFAULT_MAX_QUERIES};

/// Fraction by which a measure may exceed the best mean and still count as
/// one of the best.
pub const BEST_SET_SLACK: f64 = 0.03;

#[derive(Debug, Clone)]
pub struct FactorGrid {
    pub dpis: Vec<(String, Dpi)>,
    pub measures: Vec<Measure>,
    pub dists: Vec<DistributionKind>,
    pub prob_choices: usize,
    pub strategies: Vec<OracleKind>,
    pub ld_values: Vec<usize>,
    pub runs_per_cell: usize,
    pub master_seed: u64,
    pub max_queries: usize,
    /// Fill the `wall_ms` column. Off by default so output is reproducible
    /// byte for byte.
    pub record_timings: bool,
}

impl FactorGrid {
    /// A grid over `dpis` with every measure, distribution and strategy,
    /// three probability choices, `ld` in {6, 10, 14} and 20 runs per cell.
    pub fn new(dpis: Vec<(String, Dpi)>, master_seed: u64) -> Self {
        FactorGrid {
            dpis,
            measures: Measure::ALL.to_vec(),
            dists: DistributionKind::ALL.to_vec(),
            prob_choices: 3,
            strategies: OracleKind::ALL.to_vec(),
            ld_values: vec![6, 10, 14],
            runs_per_cell: 20,
            master_seed,
            max_queries: DEFAULT_MAX_QUERIES,
            record_timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &'static str| Error::InvalidValue {
            what,
            value: "empty".into(),
        };
        if self.dpis.is_empty() {
            return Err(empty("dpis"));
        }
        if self.measures.is_empty() {
            return Err(empty("measures"));
        }
        if self.dists.is_empty() {
            return Err(empty("dists"));
        }
        if self.strategies.is_empty() {
            return Err(empty("strategies"));
        }
        if self.ld_values.is_empty() {
            return Err(empty("ld_values"));
        }
        if let Some(&ld) = self.ld_values.iter().find(|&&ld| ld < 2) {
            return Err(Error::InvalidValue {
                what: "ld",
                value: ld.to_string(),
            });
        }
        for (what, v) in [
            ("prob_choices", self.prob_choices),
            ("runs_per_cell", self.runs_per_cell),
            ("max_queries", self.max_queries),
        ] {
            if v == 0 {
                return Err(Error::InvalidValue { what, value: "0".into() });
            }
        }
        let mut names = HashSet::new();
        if let Some((dup, _)) = self.dpis.iter().find(|(n, _)| !names.insert(n)) {
            return Err(Error::InvalidValue {
                what: "dpi name (duplicate)",
                value: dup.clone(),
            });
        }
        Ok(())
    }

    /// All cells in grid order.
    pub fn cells(&self) -> Vec<CellKey> {
        let mut out = Vec::new();
        for (dpi, _) in &self.dpis {
            for &dist in &self.dists {
                for prob_choice in 0..self.prob_choices {
                    for &strategy in &self.strategies {
                        for &ld in &self.ld_values {
                            for &measure in &self.measures {
                                out.push(CellKey {
                                    dpi: dpi.clone(),
                                    measure,
                                    dist,
                                    prob_choice,
                                    strategy,
                                    ld,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Seed of fault models for `dpi`, shared by all measures, strategies
    /// and leading-set sizes.
    fn fault_model_seed(&self, dpi: &str) -> u64 {
        derive_seed(&format!("fault-models/{}/{dpi}", self.master_seed))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub dpi: String,
    pub measure: Measure,
    pub dist: DistributionKind,
    pub prob_choice: usize,
    pub strategy: OracleKind,
    pub ld: usize,
}

impl CellKey {
    fn canonical(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}",
            self.dpi, self.measure, self.dist, self.prob_choice, self.strategy, self.ld
        )
    }

    pub fn scenario(&self) -> ScenarioKey {
        ScenarioKey {
            dpi: self.dpi.clone(),
            measure: self.measure,
            dist: self.dist,
            strategy: self.strategy,
            ld: self.ld,
        }
    }
}

/// Session seed of run `run` in `cell`.
pub fn run_seed(master_seed: u64, cell: &CellKey, run: usize) -> u64 {
    derive_seed(&format!("run/{master_seed}/{}/{run}", cell.canonical()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub key: CellKey,
    pub run: usize,
    pub seed: u64,
    pub n_queries: usize,
    /// Distinct final diagnoses among the non-aborted runs of the cell up to
    /// and including this one.
    pub n_distinct_target: usize,
    pub aborted: bool,
    pub wall_ms: Option<f64>,
    /// Sorted labels of the final diagnosis joined by `;`.
    pub target: String,
}

/// Statistics of one cell over its deduplicated, non-aborted runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub key: CellKey,
    pub queries: Vec<usize>,
    pub n_runs_total: usize,
    pub n_aborted: usize,
}

fn mean_of(v: &[usize]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<usize>() as f64 / v.len() as f64)
}

impl ScenarioResult {
    pub fn n_distinct(&self) -> usize {
        self.queries.len()
    }
    pub fn mean(&self) -> Option<f64> {
        mean_of(&self.queries)
    }
    pub fn min(&self) -> Option<usize> {
        self.queries.iter().copied().min()
    }
    pub fn max(&self) -> Option<usize> {
        self.queries.iter().copied().max()
    }
}

#[derive(Debug, Clone)]
pub struct GridOutput {
    pub runs: Vec<RunRecord>,
    pub cells: Vec<ScenarioResult>,
}

struct RunOutcome {
    n_queries: usize,
    aborted: bool,
    wall: Duration,
    target: String,
}

fn target_key(labels: &[String]) -> String {
    let mut sorted = labels.to_vec();
    sorted.sort();
    sorted.join(";")
}

fn execute(dpi: &Dpi, fm: &FaultModel, key: &CellKey, seed: u64, max_queries: usize) -> RunOutcome {
    let mut cfg = SessionConfig::new(key.measure, key.ld, key.strategy, seed);
    cfg.max_queries = max_queries;
    match run_session(dpi, fm, &cfg) {
        Ok(r) => RunOutcome {
            n_queries: r.n_queries,
            aborted: r.aborted,
            wall: r.wall_time,
            target: target_key(&r.target_labels),
        },
        // A failed session is reported like an aborted one.
        Err(_) => RunOutcome {
            n_queries: 0,
            aborted: true,
            wall: Duration::ZERO,
            target: String::new(),
        },
    }
}

type ModelTable = HashMap<(String, DistributionKind, usize), FaultModel>;

fn fault_models(grid: &FactorGrid) -> ModelTable {
    let mut table = HashMap::new();
    for (name, dpi) in &grid.dpis {
        for (kind, choice, fm) in instantiate_fault_models(dpi, &grid.dists, grid.prob_choices, grid.fault_model_seed(name)) {
            table.insert((name.clone(), kind, choice), fm);
        }
    }
    table
}

/// Runs every cell of `grid` on `jobs` worker threads. The output does not
/// depend on `jobs`.
pub fn run_grid(grid: &FactorGrid, jobs: usize) -> Result<GridOutput> {
    grid.validate()?;
    let models = fault_models(grid);
    let dpis: HashMap<&str, &Dpi> = grid.dpis.iter().map(|(n, d)| (n.as_str(), d)).collect();
    let tasks: Vec<(CellKey, usize)> = grid
        .cells()
        .into_iter()
        .flat_map(|c| (0..grid.runs_per_cell).map(move |r| (c.clone(), r)))
        .collect();

    let run_task = |(key, run): &(CellKey, usize)| {
        let seed = run_seed(grid.master_seed, key, *run);
        let fm = &models[&(key.dpi.clone(), key.dist, key.prob_choice)];
        (seed, execute(dpis[key.dpi.as_str()], fm, key, seed, grid.max_queries))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidValue {
            what: "jobs",
            value: e.to_string(),
        })?;
    let outcomes: Vec<(u64, RunOutcome)> = pool.install(|| tasks.par_iter().map(run_task).collect());

    let mut runs = Vec::with_capacity(tasks.len());
    let mut seen: HashMap<&CellKey, HashSet<String>> = HashMap::new();
    for ((key, run), (seed, out)) in tasks.iter().zip(outcomes) {
        let distinct = seen.entry(key).or_default();
        if !out.aborted {
            distinct.insert(out.target.clone());
        }
        runs.push(RunRecord {
            key: key.clone(),
            run: *run,
            seed,
            n_queries: out.n_queries,
            n_distinct_target: distinct.len(),
            aborted: out.aborted,
            wall_ms: grid.record_timings.then(|| out.wall.as_secs_f64() * 1e3),
            target: out.target,
        });
    }
    let cells = summarize_runs(&runs);
    Ok(GridOutput { runs, cells })
}

/// Runs a single cell in isolation; matches the corresponding entry of
/// [`run_grid`].
pub fn run_cell(grid: &FactorGrid, key: &CellKey) -> Result<ScenarioResult> {
    let dpi = grid
        .dpis
        .iter()
        .find(|(n, _)| *n == key.dpi)
        .map(|(_, d)| d)
        .ok_or_else(|| Error::UnknownLabel(key.dpi.clone()))?;
    let fm = instantiate_fault_models(dpi, &[key.dist], key.prob_choice + 1, grid.fault_model_seed(&key.dpi))
        .pop()
        .expect("at least one model")
        .2;
    let mut runs = Vec::new();
    let mut distinct = HashSet::new();
    for run in 0..grid.runs_per_cell {
        let seed = run_seed(grid.master_seed, key, run);
        let out = execute(dpi, &fm, key, seed, grid.max_queries);
        if !out.aborted {
            distinct.insert(out.target.clone());
        }
        runs.push(RunRecord {
            key: key.clone(),
            run,
            seed,
            n_queries: out.n_queries,
            n_distinct_target: distinct.len(),
            aborted: out.aborted,
            wall_ms: None,
            target: out.target,
        });
    }
    Ok(summarize_runs(&runs).remove(0))
}

/// Per-cell statistics, keeping for each cell the first non-aborted run of
/// every distinct target. Cells appear in order of first occurrence.
pub fn summarize_runs(runs: &[RunRecord]) -> Vec<ScenarioResult> {
    let mut order: Vec<CellKey> = Vec::new();
    let mut by_cell: HashMap<CellKey, (ScenarioResult, HashSet<&str>)> = HashMap::new();
    for r in runs {
        let (cell, seen) = by_cell.entry(r.key.clone()).or_insert_with(|| {
            order.push(r.key.clone());
            (
                ScenarioResult {
                    key: r.key.clone(),
                    queries: Vec::new(),
                    n_runs_total: 0,
                    n_aborted: 0,
                },
                HashSet::new(),
            )
        });
        cell.n_runs_total += 1;
        if r.aborted {
            cell.n_aborted += 1;
        } else if seen.insert(&r.target) {
            cell.queries.push(r.n_queries);
        }
    }
    order.into_iter().map(|k| by_cell.remove(&k).expect("recorded").0).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScenarioKey {
    pub dpi: String,
    pub measure: Measure,
    pub dist: DistributionKind,
    pub strategy: OracleKind,
    pub ld: usize,
}

/// Statistics pooled over probability choices.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub key: ScenarioKey,
    pub mean_q: Option<f64>,
    pub min_q: Option<usize>,
    pub max_q: Option<usize>,
    pub n_runs: usize,
}

/// Pools the deduplicated runs of all probability choices of a scenario.
pub fn pool_scenarios(cells: &[ScenarioResult]) -> Vec<ScenarioSummary> {
    let mut pooled: BTreeMap<ScenarioKey, Vec<usize>> = BTreeMap::new();
    for c in cells {
        pooled.entry(c.key.scenario()).or_default().extend(&c.queries);
    }
    pooled
        .into_iter()
        .map(|(key, qs)| ScenarioSummary {
            key,
            mean_q: mean_of(&qs),
            min_q: qs.iter().copied().min(),
            max_q: qs.iter().copied().max(),
            n_runs: qs.len(),
        })
        .collect()
}

/// `(worst / best - 1) * 100` over the mean query counts of a scenario.
pub fn criticality_overhead(cell_means: &BTreeMap<Measure, f64>) -> Result<f64> {
    if cell_means.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} measure(s); at least 2 are needed",
            cell_means.len()
        )));
    }
    let best = cell_means.values().copied().fold(f64::INFINITY, f64::min);
    let worst = cell_means.values().copied().fold(f64::NEG_INFINITY, f64::max);
    if best <= 0.0 {
        return Err(Error::ZeroMean);
    }
    Ok((worst / best - 1.0) * 100.0)
}

/// Measures within `slack` of the best mean, and the strict minimizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestSet {
    pub members: Vec<Measure>,
    pub best: Vec<Measure>,
}

pub fn best_qsm_set(cell_means: &BTreeMap<Measure, f64>, slack: f64) -> BestSet {
    let min = cell_means.values().copied().fold(f64::INFINITY, f64::min);
    let members = cell_means
        .iter()
        .filter(|(_, &m)| m <= (1.0 + slack) * min)
        .map(|(&k, _)| k)
        .collect();
    let best = cell_means.iter().filter(|(_, &m)| m == min).map(|(&k, _)| k).collect();
    BestSet { members, best }
}

/// Coefficient of variation in percent, using the sample standard deviation.
pub fn scenario_cv(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientData(format!("{} value(s); at least 2 are needed", values.len())));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt() / mean * 100.0)
}

pub const RUNS_HEADER: [&str; 13] = [
    "dpi",
    "measure",
    "dist",
    "prob_choice",
    "strategy",
    "ld",
    "run",
    "seed",
    "n_queries",
    "n_distinct_target",
    "aborted",
    "wall_ms",
    "target",
];

pub const SCENARIO_HEADER: [&str; 9] = ["dpi", "measure", "dist", "strategy", "ld", "mean_q", "min_q", "max_q", "n_runs"];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_runs_csv(runs: &[RunRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(RUNS_HEADER).map_err(|e| Error::csv(path, e))?;
    for r in runs {
        w.write_record([
            r.key.dpi.clone(),
            r.key.measure.to_string(),
            r.key.dist.to_string(),
            r.key.prob_choice.to_string(),
            r.key.strategy.to_string(),
            r.key.ld.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            r.n_queries.to_string(),
            r.n_distinct_target.to_string(),
            r.aborted.to_string(),
            r.wall_ms.map(|ms| format!("{ms:.3}")).unwrap_or_default(),
            r.target.clone(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_scenario_csv(summaries: &[ScenarioSummary], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(SCENARIO_HEADER).map_err(|e| Error::csv(path, e))?;
    for s in summaries {
        w.write_record([
            s.key.dpi.clone(),
            s.key.measure.to_string(),
            s.key.dist.to_string(),
            s.key.strategy.to_string(),
            s.key.ld.to_string(),
            opt(s.mean_q),
            opt(s.min_q),
            opt(s.max_q),
            s.n_runs.to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn new(header: &csv::StringRecord, expected: &[&str], path: &Path) -> Result<Self> {
        let index: HashMap<String, usize> = header.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
        if let Some(missing) = expected.iter().find(|c| !index.contains_key(**c)) {
            return Err(Error::InvalidValue {
                what: "csv column (missing)",
                value: format!("{missing} in {}", path.display()),
            });
        }
        Ok(Columns { index })
    }

    fn get<'r>(&self, rec: &'r csv::StringRecord, col: &str) -> &'r str {
        rec.get(self.index[col]).unwrap_or("")
    }

    fn parse<T: std::str::FromStr>(&self, rec: &csv::StringRecord, col: &'static str) -> Result<T> {
        let v = self.get(rec, col);
        v.trim().parse().map_err(|_| Error::InvalidValue {
            what: col,
            value: v.to_string(),
        })
    }

    fn parse_opt<T: std::str::FromStr>(&self, rec: &csv::StringRecord, col: &'static str) -> Result<Option<T>> {
        if self.get(rec, col).trim().is_empty() {
            Ok(None)
        } else {
            self.parse(rec, col).map(Some)
        }
    }
}

fn open_csv(path: &Path, expected: &[&str]) -> Result<(csv::Reader<fs::File>, Columns)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    let cols = Columns::new(&header, expected, path)?;
    Ok((r, cols))
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let (mut r, c) = open_csv(path, &RUNS_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        out.push(RunRecord {
            key: CellKey {
                dpi: c.get(&rec, "dpi").to_string(),
                measure: c.parse(&rec, "measure")?,
                dist: c.parse(&rec, "dist")?,
                prob_choice: c.parse(&rec, "prob_choice")?,
                strategy: c.parse(&rec, "strategy")?,
                ld: c.parse(&rec, "ld")?,
            },
            run: c.parse(&rec, "run")?,
            seed: c.parse(&rec, "seed")?,
            n_queries: c.parse(&rec, "n_queries")?,
            n_distinct_target: c.parse(&rec, "n_distinct_target")?,
            aborted: c.parse(&rec, "aborted")?,
            wall_ms: c.parse_opt(&rec, "wall_ms")?,
            target: c.get(&rec, "target").to_string(),
        });
    }
    Ok(out)
}

pub fn read_scenario_csv(path: &Path) -> Result<Vec<ScenarioSummary>> {
    let (mut r, c) = open_csv(path, &SCENARIO_HEADER)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        out.push(ScenarioSummary {
            key: ScenarioKey {
                dpi: c.get(&rec, "dpi").to_string(),
                measure: c.parse(&rec, "measure")?,
                dist: c.parse(&rec, "dist")?,
                strategy: c.parse(&rec, "strategy")?,
                ld: c.parse(&rec, "ld")?,
            },
            mean_q: c.parse_opt(&rec, "mean_q")?,
            min_q: c.parse_opt(&rec, "min_q")?,
            max_q: c.parse_opt(&rec, "max_q")?,
            n_runs: c.parse(&rec, "n_runs")?,
        });
    }
    Ok(out)
}

/// Mean queries per measure for every `(dpi, strategy, dist, ld)`.
pub fn scenario_means(
    summaries: &[ScenarioSummary],
) -> BTreeMap<(usize, String, OracleKind, DistributionKind), BTreeMap<Measure, f64>> {
    let mut out: BTreeMap<_, BTreeMap<Measure, f64>> = BTreeMap::new();
    for s in summaries {
        if let Some(m) = s.mean_q {
            out.entry((s.key.ld, s.key.dpi.clone(), s.key.strategy, s.key.dist))
                .or_default()
                .insert(s.key.measure, m);
        }
    }
    out
}

/// Markdown report: per leading-set size, a matrix of criticality overheads
/// (rows are problems, columns are strategy and distribution) with a
/// coefficient-of-variation line, followed by the best-measure sets. The
/// strict best measure of a scenario is marked with `*`.
pub fn render_report(summaries: &[ScenarioSummary]) -> String {
    let means = scenario_means(summaries);
    let mut lds: Vec<usize> = means.keys().map(|k| k.0).collect();
    lds.dedup();
    let mut out = String::from("# Query selection benchmark\n");
    if means.is_empty() {
        out.push_str("\nNo completed runs.\n");
        return out;
    }
    for ld in lds {
        let rows: Vec<&String> = {
            let mut r: Vec<&String> = means.keys().filter(|k| k.0 == ld).map(|k| &k.1).collect();
            r.dedup();
            r
        };
        let mut cols: Vec<(OracleKind, DistributionKind)> =
            means.keys().filter(|k| k.0 == ld).map(|k| (k.2, k.3)).collect();
        cols.sort();
        cols.dedup();
        let header: Vec<String> = cols.iter().map(|(s, d)| format!("{s}/{}", d.name().to_uppercase())).collect();
        let _ = writeln!(out, "\n## Criticality overhead in % (ld = {ld})\n");
        let _ = writeln!(out, "| DPI | {} |", header.join(" | "));
        let _ = writeln!(out, "|---|{}", "---:|".repeat(cols.len()));
        let mut per_col: Vec<Vec<f64>> = vec![Vec::new(); cols.len()];
        for dpi in &rows {
            let cells: Vec<String> = cols
                .iter()
                .enumerate()
                .map(|(ci, (s, d))| {
                    match means.get(&(ld, (*dpi).clone(), *s, *d)).map(criticality_overhead) {
                        Some(Ok(v)) => {
                            per_col[ci].push(v);
                            format!("{v:.0}")
                        }
                        _ => "n/a".to_string(),
                    }
                })
                .collect();
            let _ = writeln!(out, "| {dpi} | {} |", cells.join(" | "));
        }
        let cv: Vec<String> = per_col
            .iter()
            .map(|v| scenario_cv(v).map(|c| format!("{c:.1}")).unwrap_or_else(|_| "n/a".into()))
            .collect();
        let _ = writeln!(out, "| CV (%) | {} |", cv.join(" | "));

        let _ = writeln!(out, "\n## Measures within 3% of the best (ld = {ld}, * = best)\n");
        let _ = writeln!(out, "| DPI | {} |", header.join(" | "));
        let _ = writeln!(out, "|---|{}", "---|".repeat(cols.len()));
        for dpi in &rows {
            let cells: Vec<String> = cols
                .iter()
                .map(|(s, d)| match means.get(&(ld, (*dpi).clone(), *s, *d)) {
                    Some(m) if !m.is_empty() => {
                        let set = best_qsm_set(m, BEST_SET_SLACK);
                        set.members
                            .iter()
                            .map(|x| {
                                let star = if set.best.contains(x) { "*" } else { "" };
                                format!("{star}{}", x.designator())
                            })
                            .collect::<Vec<_>>()
                            .join(" ")
                    }
                    _ => "n/a".to_string(),
                })
                .collect();
            let _ = writeln!(out, "| {dpi} | {} |", cells.join(" | "));
        }
    }
    out
}

pub fn write_report(summaries: &[ScenarioSummary], path: &Path) -> Result<()> {
    fs::write(path, render_report(summaries)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn means(v: &[(Measure, f64)]) -> BTreeMap<Measure, f64> {
        v.iter().copied().collect()
    }

    #[test]
    fn overhead_examples() {
        assert_eq!(criticality_overhead(&means(&[(Measure::Ent, 4.0), (Measure::Spl, 10.0)])).unwrap(), 150.0);
        assert_eq!(criticality_overhead(&means(&[(Measure::Ent, 4.0), (Measure::Spl, 4.0)])).unwrap(), 0.0);
        assert!(matches!(criticality_overhead(&means(&[(Measure::Ent, 4.0)])), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn best_set_examples() {
        let s = best_qsm_set(&means(&[(Measure::Ent, 4.0), (Measure::Spl, 4.1), (Measure::Kl, 4.5)]), 0.03);
        assert_eq!(s.members, [Measure::Ent, Measure::Spl]);
        assert_eq!(s.best, [Measure::Ent]);
        let s = best_qsm_set(&means(&[(Measure::Mps, 7.0)]), 0.03);
        assert_eq!(s.members, [Measure::Mps]);
        let s = best_qsm_set(&means(&[(Measure::Ent, 4.0), (Measure::Spl, 4.13)]), 0.03);
        assert_eq!(s.members, [Measure::Ent]);
    }

    #[test]
    fn cv_examples() {
        assert_eq!(scenario_cv(&[10.0, 10.0, 10.0]).unwrap(), 0.0);
        assert!((scenario_cv(&[10.0, 20.0]).unwrap() - 47.14).abs() < 0.1);
        assert!((scenario_cv(&[63.0, 59.0, 64.0, 62.0]).unwrap() - 3.47).abs() < 0.05);
        assert!(matches!(scenario_cv(&[0.0, 0.0]), Err(Error::ZeroMean)));
        assert!(matches!(scenario_cv(&[1.0]), Err(Error::InsufficientData(_))));
    }

    fn record(dpi: &str, run: usize, target: &str, q: usize, aborted: bool) -> RunRecord {
        RunRecord {
            key: CellKey {
                dpi: dpi.into(),
                measure: Measure::Ent,
                dist: DistributionKind::Eq,
                prob_choice: 0,
                strategy: OracleKind::Plausible,
                ld: 6,
            },
            run,
            seed: run as u64,
            n_queries: q,
            n_distinct_target: 0,
            aborted,
            wall_ms: None,
            target: target.into(),
        }
    }

    #[test]
    fn dedup_keeps_first_occurrence_and_skips_aborted() {
        let runs = [
            record("a", 0, "ax1", 3, false),
            record("a", 1, "ax1", 5, false),
            record("a", 2, "ax2", 4, true),
            record("a", 3, "ax2", 6, false),
        ];
        let cells = summarize_runs(&runs);
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].queries, [3, 6]);
        assert_eq!(cells[0].n_aborted, 1);
        assert_eq!(cells[0].n_runs_total, 4);
        assert_eq!(cells[0].mean(), Some(4.5));
    }

    #[test]
    fn report_renders_overhead_layout() {
        let mk = |m, mean| ScenarioSummary {
            key: ScenarioKey {
                dpi: "M".into(),
                measure: m,
                dist: DistributionKind::Eq,
                strategy: OracleKind::Plausible,
                ld: 6,
            },
            mean_q: Some(mean),
            min_q: Some(1),
            max_q: Some(9),
            n_runs: 20,
        };
        let report = render_report(&[mk(Measure::Ent, 10.0), mk(Measure::Rnd, 16.3)]);
        assert!(report.contains("| DPI | plausible/EQ |"), "{report}");
        assert!(report.contains("| M | 63 |"), "{report}");
        assert!(report.contains("| M | *ENT |"), "{report}");
    }
}
