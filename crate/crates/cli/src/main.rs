use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tlinkage::harness::{
    emit_csv, emit_plot, lambda_rule, read_records, read_summary, render_svg, run_experiment_with,
    summarize, verify_with, write_records, write_summary, Execution, ExperimentConfig, Faults,
    ParamRule, RunRecord, VerifyLevel,
};
use tlinkage::oracle::{write_reports, write_reports_to_path, ChainAlgorithm, OracleReport};
use tlinkage::{AlgorithmId, Error};

#[derive(Parser, Debug)]
#[command(
    name = "tlinkage",
    version,
    about = "Evolutionary algorithms on the time-linkage OneMax problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run seeded experiments and write the records CSV.
    Run(RunArgs),
    /// Aggregate a records CSV into a summary CSV.
    Summarize {
        /// Records CSV.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plot median evaluations with quartile bars from a summary CSV.
    Plot {
        /// Summary CSV.
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact absorption probabilities and hitting times for tiny n.
    Oracle(OracleArgs),
    /// Run the invariant and oracle self-checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Algorithm, or a comma list of them.
    #[arg(long)]
    algo: Option<String>,
    /// Comma list of problem sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    budget: Option<String>,
    /// Integer or `paper`.
    #[arg(long)]
    lambda: Option<String>,
    /// Integer or `paper`.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Records CSV; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// `opl`, `ocl` or a comma list; both by default.
    #[arg(long, default_value = "opl,ocl")]
    algo: String,
    /// Comma list of sizes, at most 4.
    #[arg(long, default_value = "1,2,3")]
    n: String,
    /// Integer or `paper`.
    #[arg(long, default_value = "1")]
    lambda: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fault {
    MissingClamp,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "fast")]
    level: Level,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<Fault>,
}

enum Failure {
    Checks,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Csv { source, .. } if source.is_io_error() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run(args) => run(args)?,
        Command::Summarize { input, out } => {
            let rows = summarize(&read_records(&input)?)?;
            match out {
                Some(path) => emit_csv(&rows, &path)?,
                None => write_summary(&rows, std::io::stdout().lock()).map_err(stdout_error)?,
            }
        }
        Command::Plot { input, out } => {
            let rows = read_summary(&input)?;
            match out {
                Some(path) => emit_plot(&rows, &path)?,
                None => {
                    let svg = render_svg(&rows)?;
                    std::io::stdout()
                        .write_all(svg.as_bytes())
                        .map_err(stdout_io)?;
                }
            }
        }
        Command::Oracle(args) => oracle(args)?,
        Command::Verify(args) => {
            let level = match args.level {
                Level::Fast => VerifyLevel::Fast,
                Level::Full => VerifyLevel::Full,
            };
            let faults = Faults {
                missing_clamp: matches!(args.inject_fault, Some(Fault::MissingClamp)),
            };
            let report = verify_with(level, faults);
            println!("{report}");
            if !report.passed() {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn stdout_io(source: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn stdout_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => stdout_io(source),
        other => Error::Parse(format!("{other:?}")),
    }
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut pairs = match &args.config {
        Some(path) => ExperimentConfig::read_pairs(path)?,
        None => Vec::new(),
    };
    let flags = [
        ("algorithm", &args.algo),
        ("sizes", &args.n),
        ("runs", &args.runs),
        ("seed", &args.seed),
        ("budget", &args.budget),
        ("lambda", &args.lambda),
        ("mu", &args.mu),
        ("alpha", &args.alpha),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            pairs.push((key.to_string(), v.clone()));
        }
    }
    if let Some(out) = &args.out {
        pairs.push(("out".into(), out.display().to_string()));
    }
    let config = ExperimentConfig::from_pairs(pairs)?;
    let execution = match args.threads {
        Some(0) => return Err(Error::Config("threads must be at least 1".into())),
        Some(t) => Execution::Threads(t),
        None => Execution::Parallel,
    };
    let records = run_experiment_with(&config, execution)?;
    match &config.out {
        Some(path) => {
            emit_csv(&records, path)?;
            report_cells(&records, path);
        }
        None => write_records(&records, std::io::stdout().lock()).map_err(stdout_error)?,
    }
    Ok(())
}

fn report_cells(records: &[RunRecord], path: &Path) {
    if let Ok(rows) = summarize(records) {
        for r in rows {
            eprintln!(
                "{} n={} param={}: {}/{} optimum, {} event1, {} event2, {} censored",
                r.algo, r.n, r.param, r.successes, r.runs, r.event1, r.event2, r.censored
            );
        }
    }
    eprintln!("wrote {} records to {}", records.len(), path.display());
}

fn oracle(args: OracleArgs) -> Result<(), Error> {
    let algorithms = args
        .algo
        .split(',')
        .map(|s| {
            let id: AlgorithmId = s.trim().parse()?;
            ChainAlgorithm::try_from(id)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sizes = args
        .n
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid size {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let lambda: ParamRule = args.lambda.parse()?;
    let mut reports = Vec::new();
    for &algorithm in &algorithms {
        for &n in &sizes {
            let lambda = match lambda {
                ParamRule::Fixed(l) => l,
                ParamRule::Rule if n >= 2 => lambda_rule(n),
                ParamRule::Rule => return Err(Error::Config("lambda = paper needs n >= 2".into())),
            };
            reports.push(OracleReport::compute(algorithm, n, lambda)?);
        }
    }
    match &args.out {
        Some(path) => write_reports_to_path(&reports, path),
        None => write_reports(&reports, std::io::stdout().lock()).map_err(stdout_io),
    }
}
