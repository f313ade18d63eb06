//! Thin command-line front end over the `nexus` library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nexus::io::fmt_sig;
use nexus::output::Format;
use nexus::pipeline::{self, RunOptions, Through};
use nexus::psi::{cross_validate_global, HYPERSCALE_SHARE, IEA_GLOBAL_DC_2030_TWH, TOP_FIRM_SHARE};
use nexus::{Error, RunConfig, ScenarioId};

#[derive(Parser)]
#[command(
    name = "nexus",
    version,
    about = "Data-center electricity demand and regional power stress"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check inputs and configuration without computing anything.
    Validate { config: PathBuf },
    /// Firm trajectories and global ensembles.
    Forecast(RunArgs),
    /// Forecast plus regional allocation.
    Allocate(RunArgs),
    /// Full run: forecast, allocation, stress index and validation summary.
    Psi(RunArgs),
    /// Implied six-firm consumption from a global forecast.
    Crosscheck {
        #[arg(long, default_value_t = IEA_GLOBAL_DC_2030_TWH)]
        global_twh: f64,
        #[arg(long, default_value_t = HYPERSCALE_SHARE)]
        hyperscale_share: f64,
        #[arg(long, default_value_t = TOP_FIRM_SHARE)]
        top_firm_share: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    #[arg(long)]
    scenario: Option<ScenarioId>,
    #[arg(long)]
    year: Option<i32>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Output directory; NEXUS_OUT_DIR takes precedence.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_io() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    RunConfig::load(path)
}

fn run(args: RunArgs, through: Through) -> Result<(), Error> {
    let cfg = load(&args.config)?;
    let out_dir = std::env::var_os("NEXUS_OUT_DIR")
        .map(PathBuf::from)
        .or(args.out)
        .or_else(|| cfg.output_dir.as_ref().map(|p| cfg.resolve(p)))
        .unwrap_or_else(|| PathBuf::from("out"));
    let opts = RunOptions {
        scenario: args.scenario,
        year: args.year,
        format: args.format,
    };
    let (_, written) = match pipeline::run_pipeline(&cfg, through, &opts, &out_dir) {
        Err(Error::Stage { source, .. }) if matches!(*source, Error::Validation(_)) => {
            // print the individual violations before failing
            let (_, report) = pipeline::prepare(&cfg)?;
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            return Err(*source);
        }
        other => other?,
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { config } => load(&config).and_then(|cfg| {
            let (_, report) = pipeline::prepare(&cfg)?;
            for a in &report.advisories {
                eprintln!("advisory: {a}");
            }
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            if report.is_valid() {
                println!("ok");
                Ok(())
            } else {
                Err(Error::Validation(report.violations.len()))
            }
        }),
        Command::Forecast(a) => run(a, Through::Forecast),
        Command::Allocate(a) => run(a, Through::Allocate),
        Command::Psi(a) => run(a, Through::Psi),
        Command::Crosscheck {
            global_twh,
            hyperscale_share,
            top_firm_share,
        } => cross_validate_global(global_twh, hyperscale_share, top_firm_share).map(|v| {
            println!("{}", fmt_sig(v));
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
