mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use diagseq::bench::{
    pool_scenarios, read_runs_csv, read_scenario_csv, render_report, run_grid, summarize_runs, write_report,
    write_runs_csv, write_scenario_csv, FactorGrid,
};
use diagseq::generator::{instantiate_fault_models, write_dpi_set, DpiParams};
use diagseq::logic::{parse_dpi_file, Dpi};
use diagseq::oracle::OracleKind;
use diagseq::prob::DistributionKind;
use diagseq::qsm::Measure;
use diagseq::session::{run_session, SessionConfig, DEFAULT_MAX_QUERIES};

use crate::config::{collect_dpi_files, GridConfig};

#[derive(Parser)]
#[command(name = "diagseq", version, about = "Sequential diagnosis with simulated oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random diagnosis problems and a manifest.
    Gen(GenArgs),
    /// Run one diagnosis session and print the result.
    Session(SessionArgs),
    /// Run a factorial benchmark grid.
    Bench(BenchArgs),
    /// Render the criticality report from benchmark CSVs.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    axioms: usize,
    /// Atoms available to filler axioms [default: number of axioms]
    #[arg(long)]
    atoms: Option<usize>,
    #[arg(long)]
    conflicts: usize,
    #[arg(long, default_value_t = 3)]
    min_size: usize,
    #[arg(long, default_value_t = 6)]
    max_size: usize,
    /// Probability that a ladder reuses an earlier root fact.
    #[arg(long, default_value_t = 0.5)]
    share: f64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SessionArgs {
    #[arg(long)]
    dpi: PathBuf,
    #[arg(long)]
    measure: Measure,
    #[arg(long, default_value = "eq")]
    dist: DistributionKind,
    /// Which of the seeded probability assignments to use.
    #[arg(long, default_value_t = 0)]
    choice: usize,
    #[arg(long, default_value = "plausible")]
    oracle: OracleKind,
    #[arg(long, default_value_t = 10)]
    ld: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_QUERIES)]
    max_queries: usize,
    /// Print one record per answered query.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Flat TOML grid description; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem files or directories of `.dpi` files.
    #[arg(long = "dpi")]
    dpis: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    measures: Vec<Measure>,
    #[arg(long, value_delimiter = ',')]
    dists: Vec<DistributionKind>,
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<OracleKind>,
    #[arg(long, value_delimiter = ',')]
    ld: Vec<usize>,
    #[arg(long)]
    prob_choices: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_queries: Option<usize>,
    #[arg(long, env = "DIAGSEQ_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Record per-run wall-clock times (makes the runs CSV nondeterministic).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ReportSource {
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    runs: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    source: ReportSource,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_dpi(path: &Path) -> Result<Dpi> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dpi_file(&text).with_context(|| format!("parsing {}", path.display()))
}

fn dpi_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn gen(args: GenArgs) -> Result<()> {
    let params = DpiParams {
        n_axioms: args.axioms,
        n_atoms: args.atoms.unwrap_or(args.axioms),
        n_conflicts: args.conflicts,
        conflict_size: (args.min_size, args.max_size),
        share: args.share,
        seed: args.seed,
    };
    let written = write_dpi_set(&args.out, &params, args.count)?;
    println!("wrote {} problem(s) and manifest.csv to {}", written.len(), args.out.display());
    Ok(())
}

fn session(args: SessionArgs) -> Result<()> {
    let dpi = read_dpi(&args.dpi)?;
    let fm = instantiate_fault_models(&dpi, &[args.dist], args.choice + 1, args.seed)
        .pop()
        .expect("one model per choice")
        .2;
    let mut cfg = SessionConfig::new(args.measure, args.ld, args.oracle, args.seed);
    cfg.max_queries = args.max_queries;
    let result = run_session(&dpi, &fm, &cfg)?;
    println!("queries: {}", result.n_queries);
    println!("target: {{{}}}", result.target_labels.join(", "));
    println!("aborted: {}", result.aborted);
    println!("wall_ms: {:.3}", result.wall_time.as_secs_f64() * 1e3);
    let answers: Vec<String> = result.answers.iter().map(|(q, a)| format!("{q}={a}")).collect();
    println!("answers: {}", answers.join(" "));
    if args.trace {
        print!("{}", result.trace_text());
    }
    Ok(())
}

fn build_grid(args: &BenchArgs) -> Result<FactorGrid> {
    let cfg = match &args.config {
        Some(p) => GridConfig::load(p)?,
        None => GridConfig::default(),
    };
    let dpi_paths = if !args.dpis.is_empty() {
        args.dpis.clone()
    } else {
        cfg.dpis.clone().unwrap_or_default()
    };
    if dpi_paths.is_empty() {
        bail!("no problems given; use --dpi or the `dpis` config key");
    }
    let dpis = collect_dpi_files(&dpi_paths)?
        .into_iter()
        .map(|p| Ok((dpi_name(&p), read_dpi(&p)?)))
        .collect::<Result<Vec<_>>>()?;

    fn parse_all<T: std::str::FromStr>(values: &[String]) -> Result<Vec<T>>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        values.iter().map(|v| Ok(v.parse::<T>()?)).collect()
    }
    let seed = args.seed.or(cfg.seed).context("no master seed; use --seed or the `seed` config key")?;
    let mut grid = FactorGrid::new(dpis, seed);
    if !args.measures.is_empty() {
        grid.measures = args.measures.clone();
    } else if let Some(v) = &cfg.measures {
        grid.measures = parse_all(v)?;
    }
    if !args.dists.is_empty() {
        grid.dists = args.dists.clone();
    } else if let Some(v) = &cfg.dists {
        grid.dists = parse_all(v)?;
    }
    if !args.strategies.is_empty() {
        grid.strategies = args.strategies.clone();
    } else if let Some(v) = &cfg.strategies {
        grid.strategies = parse_all(v)?;
    }
    if !args.ld.is_empty() {
        grid.ld_values = args.ld.clone();
    } else if let Some(v) = &cfg.ld {
        grid.ld_values = v.clone();
    }
    if let Some(v) = args.prob_choices.or(cfg.prob_choices) {
        grid.prob_choices = v;
    }
    if let Some(v) = args.runs.or(cfg.runs) {
        grid.runs_per_cell = v;
    }
    if let Some(v) = args.max_queries.or(cfg.max_queries) {
        grid.max_queries = v;
    }
    grid.record_timings = args.timings || cfg.timings.unwrap_or(false);
    grid.validate()?;
    Ok(grid)
}

fn bench(args: BenchArgs) -> Result<()> {
    let grid = build_grid(&args)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let output = run_grid(&grid, args.jobs)?;
    let summaries = pool_scenarios(&output.cells);
    write_runs_csv(&output.runs, &args.out.join("runs.csv"))?;
    write_scenario_csv(&summaries, &args.out.join("scenario.csv"))?;
    write_report(&summaries, &args.out.join("report.md"))?;
    let aborted: usize = output.cells.iter().map(|c| c.n_aborted).sum();
    println!(
        "{} runs in {} cells ({} aborted); results in {}",
        output.runs.len(),
        output.cells.len(),
        aborted,
        args.out.display()
    );
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let summaries = match (&args.source.scenario, &args.source.runs) {
        (Some(p), _) => read_scenario_csv(p)?,
        (None, Some(p)) => pool_scenarios(&summarize_runs(&read_runs_csv(p)?)),
        (None, None) => unreachable!("clap enforces one source"),
    };
    match &args.out {
        Some(path) => write_report(&summaries, path)?,
        None => print!("{}", render_report(&summaries)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Session(a) => session(a),
        Command::Bench(a) => bench(a),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
