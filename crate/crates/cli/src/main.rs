use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use loopaction::SolverConfig;
use loopaction_cli::csv::export_available;
use loopaction_cli::{load_config, run, CliError, Command};

/// Environment variable overriding the worker thread count.
const THREADS_ENV: &str = "LOOPACTION_THREADS";

#[derive(Parser)]
#[command(
    name = "loopaction",
    version,
    about = "Counts contractible 1-periodic Hamiltonian orbits on the torus and certifies the 2n+1 lower bound"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,

    /// TOML configuration; a built-in n=1 cosine configuration is used when
    /// omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Directory for CSV exports of the report sections
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Worker threads for the multi-start search (overrides LOOPACTION_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print one line per check in addition to the report
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum CommandArg {
    /// Find all orbits, verify them against the flow, and judge the 2n+1 bound
    Solve,
    /// Track the orbit count along the shrinking homotopy of the Hamiltonian
    Homotopy,
    /// Print the ε/κ/r0/r1/R radius ledger with a randomized soundness check
    Bound,
    /// Compute cup-length certificates for the torus model (and any fixture)
    Cuplength,
    /// Group orbits by critical value and check the level-count inequality
    Filtration,
    /// Run the invariant batteries of every module
    Selfcheck,
}

impl From<&CommandArg> for Command {
    fn from(arg: &CommandArg) -> Self {
        match arg {
            CommandArg::Solve => Command::Solve,
            CommandArg::Homotopy => Command::Homotopy,
            CommandArg::Bound => Command::Bound,
            CommandArg::Cuplength => Command::Cuplength,
            CommandArg::Filtration => Command::Filtration,
            CommandArg::Selfcheck => Command::Selfcheck,
        }
    }
}

fn configure_threads(flag: Option<usize>) {
    let from_env = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(threads) = flag.or(from_env) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    configure_threads(cli.threads);
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => SolverConfig::for_catalog("cosine-morse", 1, 8),
    };
    let command = Command::from(&cli.command);
    let report = run(command, &config)?;

    if cli.verbose {
        if let Some(battery) = &report.selfcheck {
            for check in &battery.checks {
                let flag = if check.pass { "PASS" } else { "FAIL" };
                eprintln!("{flag} {} — {}", check.name, check.detail);
            }
        }
        eprintln!(
            "verdict: {} (found {}, required {})",
            if report.verdict.pass { "PASS" } else { "FAIL" },
            report.verdict.found,
            report.verdict.required
        );
    }

    let body = report.to_toml();
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &body)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            println!(
                "{}: verdict {} → {}",
                command.name(),
                if report.verdict.pass { "PASS" } else { "FAIL" },
                path.display()
            );
        }
        None => print!("{body}"),
    }
    if let Some(dir) = &cli.csv {
        for path in export_available(&report, dir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
