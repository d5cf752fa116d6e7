use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qsat::pipeline::{
    self, emit, render, AmplifierKind, Mode, OutputFormat, PipelineConfig, PipelineError,
};

#[derive(Parser)]
#[command(name = "qsat", version, about = "Quantum-circuit SAT decision lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one DIMACS CNF file.
    Solve(SolveArgs),
    /// Run every corpus file through both amplifiers and compare with brute force.
    SelfCheck {
        #[arg(long)]
        corpus: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Oracle,
    Statevector,
}

#[derive(Clone, Copy, ValueEnum)]
enum AmpArg {
    Chaos,
    Stochastic,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "oracle")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "chaos")]
    amplifier: AmpArg,
    #[arg(long, default_value_t = qsat::chaos::DEFAULT_A)]
    a: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    gamma_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gamma_im: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    e0: i64,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    e1: i64,
    #[arg(long, default_value_t = qsat::stochastic::DEFAULT_HORIZON_FACTOR)]
    horizon_factor: f64,
    #[arg(long, default_value_t = qsat::stochastic::DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Write the report (json) or amplifier trace (csv) here instead of stdout.
    #[arg(long)]
    emit: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Exit with 10 for SAT and 20 for UNSAT.
    #[arg(long)]
    exit_verdict: bool,
}

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_DISAGREE: u8 = 1;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_NOINPUT: u8 = 66;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

fn exit_code(e: &PipelineError) -> u8 {
    match e {
        PipelineError::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => {
            EXIT_NOINPUT
        }
        PipelineError::Io { .. } => EXIT_IO,
        PipelineError::Parse { .. } | PipelineError::Cnf(_) | PipelineError::EmptyCorpus(_) => {
            EXIT_DATA
        }
        PipelineError::Config(_)
        | PipelineError::Chaos(_)
        | PipelineError::NothingToEmit
        | PipelineError::Circuit(qsat::circuit::CircuitError::QubitCap { .. }) => EXIT_USAGE,
        PipelineError::Stochastic(qsat::stochastic::StochasticError::Config(_))
        | PipelineError::Stochastic(qsat::stochastic::StochasticError::EnergyOrder { .. })
        | PipelineError::Stochastic(
            qsat::stochastic::StochasticError::NonDampingSusceptibility { .. },
        ) => EXIT_USAGE,
        _ => EXIT_SOFTWARE,
    }
}

fn solve(args: SolveArgs) -> Result<u8, PipelineError> {
    let cfg = PipelineConfig {
        input_path: args.input,
        mode: match args.mode {
            ModeArg::Oracle => Mode::Oracle,
            ModeArg::Statevector => Mode::Statevector,
        },
        amplifier: match args.amplifier {
            AmpArg::Chaos => AmplifierKind::Chaos,
            AmpArg::Stochastic => AmplifierKind::Stochastic,
            AmpArg::None => AmplifierKind::None,
        },
        a: args.a,
        gamma_re: args.gamma_re,
        gamma_im: args.gamma_im,
        e0: args.e0,
        e1: args.e1,
        horizon_factor: args.horizon_factor,
        threshold: args.threshold,
        format: match args.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        },
        emit_path: args.emit,
    };
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let report = pipeline::run_pipeline(&cfg)?;
    match &cfg.emit_path {
        Some(path) => emit(&report, cfg.format, path)?,
        None => print!("{}", render(&report, cfg.format)?),
    }
    Ok(match (args.exit_verdict, report.satisfiable) {
        (true, Some(true)) => EXIT_SAT,
        (true, Some(false)) => EXIT_UNSAT,
        _ => 0,
    })
}

fn self_check(corpus: PathBuf) -> Result<u8, PipelineError> {
    let summary = pipeline::self_check(&corpus)?;
    println!("{:<12} {:<11} {:>9}", "mode", "amplifier", "agree");
    for (mode, amp, agree, total) in summary.matrix() {
        println!(
            "{:<12} {:<11} {:>4}/{:<4}",
            mode.to_string(),
            amp.to_string(),
            agree,
            total
        );
    }
    for d in &summary.disagreements {
        println!("DISAGREE {d}");
    }
    println!(
        "{} files, {} runs, {} disagreements",
        summary.entries.len(),
        summary.runs,
        summary.disagreements.len()
    );
    Ok(if summary.all_agree() {
        0
    } else {
        EXIT_DISAGREE
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve(args),
        Command::SelfCheck { corpus } => self_check(corpus),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
