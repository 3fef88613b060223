use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use mouldkit::commands;
use mouldkit::prenormal::Report;

/// Exact mould calculus for prenormal forms of local diffeomorphisms.
#[derive(Parser)]
#[command(name = "mouldkit", version)]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "MOULDKIT_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate simplification to the trimmed form.
    Trim(RunArgs),
    /// Run the Poincaré procedure to the Poincaré-Dulac form.
    Dulac(RunArgs),
    /// Linearize with the universal linearization mould.
    Linearize(RunArgs),
    /// Print a named mould for the spec's alphabets.
    Mould {
        #[arg(long)]
        spec: PathBuf,
        /// Dem, dem, Sem, sem, Den, Poin, poin, Trem, trem, Dulac, dulac or
        /// LinearizationTheta.
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
        /// Truncation degree used to extract the alphabets.
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Re-check a stored trace.
    Verify {
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Truncation degree N; overrides the spec (default 6).
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
}

fn print_report(report: &Report) -> ExitCode {
    print!("{report}");
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let code = match cli.command {
        Command::Trim(a) => print_report(&commands::run_trim(&a.spec, a.degree, &a.out)?),
        Command::Dulac(a) => print_report(&commands::run_dulac(&a.spec, a.degree, &a.out)?),
        Command::Linearize(a) => print_report(&commands::run_linearize(&a.spec, a.degree, &a.out)?),
        Command::Mould {
            spec,
            name,
            max_weight,
            degree,
            format: Format::Tsv,
        } => {
            print!(
                "{}",
                commands::mould_table(&spec, &name, max_weight, degree)?
            );
            ExitCode::SUCCESS
        }
        Command::Verify { trace } => print_report(&commands::run_verify(&trace)?),
    };
    Ok(code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
