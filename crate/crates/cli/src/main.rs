use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use semicross::reflexivity::Method;
use semicross::semicrossed::Form;
use semicross_cli::commands::{self, emit, CliError, CliResult, RefArgs};
use semicross_cli::report::Tolerances;

#[derive(Parser)]
#[command(name = "semicross", version, about = "Truncated semicrossed products and their verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Commutant of a set of matrices.
    Commutant {
        #[arg(long)]
        generators: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Over-approximation of the reflexive cover of a subspace.
    Ref {
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Sample budget for the sampled engine.
        #[arg(long)]
        budget: Option<usize>,
        /// Start count for the rank-one engine.
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gap below which the estimate certifies reflexivity.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated semicrossed products.
    Semicrossed {
        #[command(subcommand)]
        action: SemicrossedCommand,
    },
    /// Orbit decomposition and structure check of a finite dynamical system.
    Orbit {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a verification suite (or `all`) and writes reports.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = Tolerances::default().gap)]
        gap_tol: f64,
        #[arg(long, default_value_t = Tolerances::default().residual)]
        residual_tol: f64,
        #[arg(long, default_value_t = Tolerances::default().quadrature)]
        quadrature_tol: f64,
        /// Report directory; defaults to the environment setting or `reports`.
        #[arg(long)]
        report_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SemicrossedCommand {
    Build {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = FormArg::W)]
        form: FormArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sampled,
    Rankone,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    W,
    Beta,
}

fn levels_at_least_one(levels: usize) -> CliResult<usize> {
    if levels == 0 {
        return Err(CliError::Input("--levels must be at least 1".into()));
    }
    Ok(levels)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Commutant { generators, out } => emit(&commands::commutant(&generators)?, out.as_deref()),
        Command::Ref { subspace, method, budget, starts, seed, tol, out } => {
            let method = match method {
                MethodArg::Sampled => Method::Sampled,
                MethodArg::Rankone => Method::Rankone,
                MethodArg::Auto => Method::Auto,
            };
            let report = commands::reflexive_cover(&subspace, &RefArgs { method, budget, starts, seed, tol })?;
            emit(&report, out.as_deref())
        }
        Command::Semicrossed { action: SemicrossedCommand::Build { system, levels, form, out } } => {
            let form = match form {
                FormArg::W => Form::W,
                FormArg::Beta => Form::Beta,
            };
            emit(&commands::semicrossed_build(&system, levels_at_least_one(levels)?, form)?, out.as_deref())
        }
        Command::Orbit { system, levels, out } => {
            emit(&commands::orbit(&system, levels_at_least_one(levels)?)?, out.as_deref())
        }
        Command::Verify { suite, seed, gap_tol, residual_tol, quadrature_tol, report_dir } => {
            let tol = Tolerances { gap: gap_tol, residual: residual_tol, quadrature: quadrature_tol };
            let dir = report_dir.unwrap_or_else(commands::report_dir);
            let reports = commands::verify(&suite, seed, tol, &dir)?;
            commands::summarize(&reports)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semicross: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
