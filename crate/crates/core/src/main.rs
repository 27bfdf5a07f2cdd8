use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use transforma::report::{
    check_scenario, solve_scenario, OutputFormat, SolveOptions, SolverChoice, DEFAULT_DIGITS,
    DEFAULT_TOLERANCE,
};
use transforma::sweep::{parse_sweep_spec, run_sweep, sweep_csv};
use transforma::{parse_scenario, validate, Error};

/// Transforms labor values into market production prices for an n-branch
/// simple-reproduction economy.
#[derive(Parser)]
#[command(name = "transforma", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Direct,
    Iterative,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and print the value, distribution, price, and
    /// quantity tables.
    Solve {
        /// Scenario file.
        file: PathBuf,
        /// Allocation route; zero-surplus scenarios reroute automatically.
        #[arg(long, value_enum, default_value = "direct")]
        solver: SolverArg,
        /// Significant digits in the rendered tables.
        #[arg(long, default_value_t = DEFAULT_DIGITS as u8, value_parser = clap::value_parser!(u8).range(1..=17))]
        digits: u8,
        /// Output format.
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Rescale the report to this total capital (homothety).
        #[arg(long)]
        normalize_to: Option<f64>,
        /// Also write the report to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every solver and cross-check; exit 0 only if all residuals pass.
    Check {
        /// Scenario file.
        file: PathBuf,
    },
    /// Solve a family of wage baskets and emit one CSV row per sample.
    Sweep {
        /// Scenario file.
        file: PathBuf,
        /// Sweep specification file.
        #[arg(long)]
        spec: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn tolerance_from_env() -> Result<f64, Error> {
    match std::env::var("TRANSFORMA_TOL") {
        Err(_) => Ok(DEFAULT_TOLERANCE),
        Ok(raw) => {
            let tol: f64 = raw
                .parse()
                .map_err(|_| Error::Parse(format!("TRANSFORMA_TOL is not a number: {raw:?}")))?;
            if tol > 0.0 && tol.is_finite() {
                Ok(tol)
            } else {
                Err(Error::Parse(format!(
                    "TRANSFORMA_TOL must be positive and finite, got {raw:?}"
                )))
            }
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(Error::from)
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    let tolerance = tolerance_from_env()?;
    match cli.command {
        Command::Solve {
            file,
            solver,
            digits,
            format,
            normalize_to,
            output,
        } => {
            let economy = validate(parse_scenario(&read_to_string(&file)?)?)?;
            let options = SolveOptions {
                solver: match solver {
                    SolverArg::Direct => SolverChoice::Direct,
                    SolverArg::Iterative => SolverChoice::Iterative,
                    SolverArg::Both => SolverChoice::Both,
                },
                digits: digits as usize,
                format: match format {
                    FormatArg::Text => OutputFormat::Text,
                    FormatArg::Csv => OutputFormat::Csv,
                },
                normalize_to,
                tolerance,
            };
            let report = solve_scenario(&economy, &options)?;
            let rendered = report.render(&options);
            print!("{rendered}");
            if let Some(path) = output {
                std::fs::write(path, &rendered)?;
            }
            Ok(true)
        }
        Command::Check { file } => {
            let economy = validate(parse_scenario(&read_to_string(&file)?)?)?;
            let report = check_scenario(&economy, tolerance)?;
            print!("{}", report.render());
            Ok(report.all_pass())
        }
        Command::Sweep { file, spec, output } => {
            let economy = validate(parse_scenario(&read_to_string(&file)?)?)?;
            let sweep_spec = parse_sweep_spec(&read_to_string(&spec)?)?;
            let rows = run_sweep(&economy, &sweep_spec)?;
            let csv = sweep_csv(&rows, economy.branch_count());
            match output {
                Some(path) => {
                    std::fs::write(&path, &csv)?;
                    println!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => print!("{csv}"),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Io(e)) => {
            eprintln!("error: io: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
