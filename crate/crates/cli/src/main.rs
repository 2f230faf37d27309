use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use typgraph_cli::config::ConfigError;
use typgraph_cli::report::ReportError;
use typgraph_cli::{run, CsvReport, ExperimentConfig, RunError, Severity, CSV_COLUMNS_HELP};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "typgraph", version, about = "Run seeded random-graph experiments and write CSV reports")]
#[command(after_help = CSV_COLUMNS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override `master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override `trials`.
    #[arg(long, global = true)]
    trials: Option<i64>,
    /// Write the CSV here instead of `output_path` (or stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a long-format (experiment, row, column, value) CSV.
    #[arg(long, global = true, value_name = "PATH")]
    emit_plot_data: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Check a config file and list every problem found.
    Validate { config: PathBuf },
}

fn load(cli: &Cli, path: &Path) -> Result<ExperimentConfig, u8> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| {
        eprintln!("{e}");
        match e {
            ConfigError::Io { .. } => EXIT_IO,
            _ => EXIT_CONFIG,
        }
    })?;
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    Ok(cfg)
}

fn write_report(report: &CsvReport, path: Option<&Path>, long: bool) -> Result<(), ReportError> {
    let emit = |w: &mut dyn Write| if long { report.write_long(w) } else { report.write(w) };
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            emit(&mut w)?;
            w.flush()?;
        }
        None => emit(&mut io::stdout().lock())?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), u8> {
    match &cli.command {
        Command::Validate { config } => {
            let cfg = load(cli, config)?;
            let diagnostics = cfg.validate();
            for d in &diagnostics {
                println!("{d}");
            }
            if diagnostics.iter().any(|d| d.severity == Severity::Error) {
                return Err(EXIT_CONFIG);
            }
            if diagnostics.is_empty() {
                println!("ok");
            }
            Ok(())
        }
        Command::Run { config } => {
            let cfg = load(cli, config)?;
            for d in cfg.validate().iter().filter(|d| d.severity == Severity::Warning) {
                eprintln!("{d}");
            }
            let report = run(&cfg).map_err(|e| {
                eprintln!("{e}");
                match e {
                    RunError::Config(ConfigError::Io { .. }) => EXIT_IO,
                    RunError::Config(_) => EXIT_CONFIG,
                    RunError::Library(_) => EXIT_FAILURE,
                }
            })?;
            let out = cli.out.as_deref().or(cfg.output_path.as_deref());
            let io_fail = |path: Option<&Path>, e: ReportError| {
                match path {
                    Some(p) => eprintln!("cannot write {}: {e}", p.display()),
                    None => eprintln!("cannot write to stdout: {e}"),
                }
                match e {
                    ReportError::Io(_) => EXIT_IO,
                    ReportError::Csv(ref c) if c.is_io_error() => EXIT_IO,
                    _ => EXIT_FAILURE,
                }
            };
            write_report(&report, out, false).map_err(|e| io_fail(out, e))?;
            if let Some(path) = &cli.emit_plot_data {
                write_report(&report, Some(path), true).map_err(|e| io_fail(Some(path), e))?;
            }
            eprintln!("{}: {} rows", report.experiment, report.rows.len());
            for note in &report.notes {
                eprintln!("  {note}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
