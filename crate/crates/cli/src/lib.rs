//! Command-line front end for `robustcover`.
//!
//! Subcommands: `maxmin`, `robust` and `oracle` read an instance file (see
//! [`robustcover::io`]); `gen` writes seeded random instances; `bench` runs
//! experiments and emits one CSV row per instance, solver and λ.
//!
//! Exit codes: 0 on success, 1 when a solver refuses (budget, enumeration
//! cap, non-termination), 2 on bad input.

pub mod error;
pub mod generate;
pub mod report;
pub mod solve;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use robustcover::io::{Instance, InstanceDoc};
use robustcover::maxmin::{SplitMode, DEFAULT_ENUMERATION_CAP};
use robustcover::robust::UnionCommit;
use robustcover::{parse_rational, Cost, Rational};

pub use error::{CliError, CliResult};
use generate::{BenchSpec, ExperimentSpec, Family, Solver, UncertaintySpec};
use report::{to_human, to_json, write_csv, RatioRow};
use solve::{solve_maxmin, solve_robust, MaxMinOptions, RobustOptions};

/// Environment variable replacing every experiment seed.
pub const SEED_ENV: &str = "ROBUSTCOVER_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Deterministic,
    Randomized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Commit {
    Winner,
    All,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn cost(s: &str) -> Result<Cost, String> {
    s.parse::<Cost>().map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "robustcover", version, about = "Max-min and two-stage robust covering")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Report wall-clock runtimes (makes output nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Greedy max-min scenario.
    Maxmin(MaxMinArgs),
    /// Two-stage robust first stage via threshold search.
    Robust(RobustArgs),
    /// Exact values by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Write random instances.
    Gen(GenArgs),
    /// Run experiments and emit ratio rows.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ReductionArgs {
    /// Knapsack reduction δ (default: smallest 1/k keeping the matroid count under the cap).
    #[arg(long, value_parser = rational)]
    pub delta: Option<Rational>,
    /// Largest number of partition matroids to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct MaxMinArgs {
    pub file: PathBuf,
    /// Compare with the exact max-min value.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub reduction: ReductionArgs,
    /// How the final knapsack part is chosen.
    #[arg(long, value_enum, default_value_t = Mode::Deterministic)]
    pub mode: Mode,
    /// Seed for `--mode randomized`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the emitted partition matroids.
    #[arg(long)]
    pub emit_matroids: bool,
}

#[derive(Debug, Args)]
pub struct RobustArgs {
    pub file: PathBuf,
    /// Compare with the exact robust optimum.
    #[arg(long)]
    pub oracle: bool,
    /// Single discriminating run at this threshold instead of a search.
    #[arg(long, value_parser = cost)]
    pub threshold: Option<Cost>,
    /// Override the instance λ.
    #[arg(long, value_parser = rational)]
    pub lambda: Option<Rational>,
    /// Grid ratio of the threshold search.
    #[arg(long, value_parser = rational, default_value = "1/10")]
    pub epsilon: Rational,
    #[command(flatten)]
    pub reduction: ReductionArgs,
    /// Union builders: commit only the winning probe, or every probe.
    #[arg(long, value_enum, default_value_t = Commit::Winner)]
    pub commit: Commit,
    /// Use the worst-case online ratio even on small instances.
    #[arg(long)]
    pub theoretical: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub file: PathBuf,
    #[arg(long, value_parser = rational)]
    pub lambda: Option<Rational>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Experiment spec file; overrides the generator flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Family::SetCover)]
    pub problem: Family,
    /// Requirements: items or terminals.
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    /// Sets, or vertices for Steiner.
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_parser = cost)]
    pub density: Option<Cost>,
    /// `uniform:K`, `partition:PARTS:BOUND`, `intersection:PARTS:BOUND`,
    /// `knapsack:Q[:K]` or `explicit:SETS:SIZE`.
    #[arg(long, default_value = "uniform:2")]
    pub uncertainty: UncertaintySpec,
    #[arg(long, value_parser = cost)]
    pub lambda: Option<Cost>,
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    /// Write one file per instance here instead of printing.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub spec: PathBuf,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Parses and validates an instance file; parse errors carry line and column.
pub fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = read(path)?;
    let doc = InstanceDoc::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    doc.build().map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

fn render<T: serde::Serialize>(format: Format, report: &T, rows: &[RatioRow]) -> CliResult<String> {
    match format {
        Format::Human => Ok(to_human(report)),
        Format::Json => Ok(to_json(report)),
        Format::Csv => write_csv(rows),
    }
}

/// Runs one command and returns what it prints on stdout. `seed_override`
/// replaces every experiment seed (see [`SEED_ENV`]).
pub fn run(cli: &Cli, seed_override: Option<u64>) -> CliResult<String> {
    match &cli.command {
        Command::Maxmin(a) => {
            let inst = load_instance(&a.file)?;
            let opts = MaxMinOptions {
                oracle: a.oracle,
                delta: a.reduction.delta,
                cap: a.reduction.cap,
                mode: match a.mode {
                    Mode::Deterministic => SplitMode::Deterministic,
                    Mode::Randomized => SplitMode::Randomized {
                        seed: seed_override.unwrap_or(a.seed),
                    },
                },
                emit_matroids: a.emit_matroids,
                timing: cli.timing,
            };
            let report = solve_maxmin(&inst, &opts)?;
            render(cli.format, &report, &[report.row(&instance_name(&a.file))])
        }
        Command::Robust(a) => {
            let inst = load_instance(&a.file)?;
            let opts = RobustOptions {
                oracle: a.oracle,
                threshold: a.threshold,
                lambda: a.lambda,
                epsilon: a.epsilon,
                delta: a.reduction.delta,
                cap: a.reduction.cap,
                commit: match a.commit {
                    Commit::Winner => UnionCommit::WinnerOnly,
                    Commit::All => UnionCommit::AllProbes,
                },
                theoretical: a.theoretical,
                timing: cli.timing,
            };
            let report = solve_robust(&inst, &opts)?;
            render(cli.format, &report, &[report.row(&instance_name(&a.file))])
        }
        Command::Oracle(a) => {
            let inst = load_instance(&a.file)?;
            let report = solve::run_oracle(&inst, a.lambda)?;
            if cli.format == Format::Csv {
                return Err(CliError::input("oracle has no csv output; use --format json or human"));
            }
            render(cli.format, &report, &[])
        }
        Command::Gen(a) => generate(cli.format, a, seed_override),
        Command::Bench(a) => {
            let mut spec: BenchSpec = load_json(&a.spec)?;
            if let Some(seed) = seed_override {
                spec.experiments.iter_mut().for_each(|e| e.seed = seed);
            }
            let rows = bench(&spec, cli.timing)?;
            match cli.format {
                Format::Csv | Format::Human => write_csv(&rows),
                Format::Json => Ok(to_json(&rows)),
            }
        }
    }
}

fn generate(format: Format, a: &GenArgs, seed_override: Option<u64>) -> CliResult<String> {
    let mut spec = match &a.spec {
        Some(path) => load_json::<ExperimentSpec>(path)?,
        None => {
            let mut s = ExperimentSpec::new(a.problem, a.n, a.m, a.seed);
            if let Some(d) = a.density {
                s.density = d;
            }
            s.uncertainty = a.uncertainty.clone();
            if let Some(l) = a.lambda {
                s.lambdas = vec![l];
            }
            s.repetitions = a.repetitions;
            s
        }
    };
    if let Some(seed) = seed_override {
        spec.seed = seed;
    }
    let instances = spec.instances()?;
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
        let mut listing = String::new();
        for (name, doc) in &instances {
            let path = dir.join(format!("{name}.json"));
            std::fs::write(&path, doc.to_json() + "\n")
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            listing.push_str(&format!("{}\n", path.display()));
        }
        return Ok(listing);
    }
    match format {
        Format::Json | Format::Human if instances.len() == 1 => Ok(instances[0].1.to_json() + "\n"),
        Format::Csv => Err(CliError::input("gen has no csv output")),
        _ => {
            let docs: Vec<_> = instances.iter().map(|(_, d)| d).collect();
            Ok(to_json(&docs))
        }
    }
}

/// One row per instance and max-min solver, and per instance, robust solver
/// and λ. Exact columns are filled whenever the oracle budget allows.
pub fn bench(spec: &BenchSpec, timing: bool) -> CliResult<Vec<RatioRow>> {
    let mut rows = Vec::new();
    for exp in &spec.experiments {
        for (name, doc) in exp.instances()? {
            let inst = doc.build()?;
            for solver in &exp.solvers {
                match solver {
                    Solver::Maxmin => {
                        let opts = MaxMinOptions {
                            oracle: true,
                            timing,
                            ..MaxMinOptions::default()
                        };
                        rows.push(solve_maxmin(&inst, &opts)?.row(&name));
                    }
                    Solver::Robust => {
                        for lambda in &exp.lambdas {
                            let opts = RobustOptions {
                                oracle: true,
                                lambda: Some(lambda.value()),
                                timing,
                                ..RobustOptions::default()
                            };
                            rows.push(solve_robust(&inst, &opts)?.row(&name));
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}
