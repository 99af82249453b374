//! `pvkit`: command-line front end.
//!
//! Exit codes: 0 for YES or success, 1 for NO, 2 for BOUNDED-NO or an
//! inconclusive result, 3 for errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// `print!` that ignores a closed stdout, so piping into `head` is quiet.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

mod commands;
mod input;

#[derive(Parser, Debug)]
#[command(name = "pvkit", version, about = "Reachability checks and reductions for anonymous-process protocols")]
struct Cli {
    /// Worker threads for the engine (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Maximum number of configurations stored by one search.
    #[arg(long, global = true, default_value_t = pvkit::engine::DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reachability questions.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Compile a model into another formalism.
    Reduce {
        kind: ReduceKind,
        file: PathBuf,
        #[arg(long)]
        model: Option<String>,
    },
    /// Seeded random walk from a configuration.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        model: Option<String>,
        /// Configuration literal, e.g. `tok=2,a1=1` (ASMS: add `reg=#`).
        #[arg(long)]
        from: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scan almost-sure coverage over a range of populations.
    Cutoff {
        file: PathBuf,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        init: String,
        #[arg(long)]
        target: String,
        /// Populations to check, `a..b`.
        #[arg(long, default_value = "1..6")]
        range: String,
        /// Number of agreeing populations needed at the end of the range.
        #[arg(long, default_value_t = 3)]
        window: usize,
        /// Initial register value (ASMS only).
        #[arg(long)]
        register: Option<String>,
    },
    /// Cardinality reachability from an unbounded source support.
    Crp {
        file: PathBuf,
        #[arg(long)]
        model: Option<String>,
        /// Comma-separated source states, each with any number of processes.
        #[arg(long, default_value = "")]
        support: String,
        /// Target cube name or configuration literal.
        #[arg(long)]
        dst: String,
        #[arg(long, value_enum, default_value_t = Variant::AtLeastOne)]
        variant: Variant,
        /// Largest source population searched for a witness.
        #[arg(long, default_value_t = 6)]
        k_max: u64,
    },
    /// Normalize a run of an RBN compiled to ASMS and decode it.
    NormalizeRun {
        /// Document holding the source RBN.
        file: PathBuf,
        #[arg(long)]
        model: Option<String>,
        /// Run of the compiled ASMS.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Print a built-in example as a document.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Can some member of SRC reach a member of DST?
    Reach(ReachArgs),
    /// Run every `reach` directive of a document and compare expectations.
    All {
        /// Document file; `-` or absent reads standard input.
        file: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ReachArgs {
    /// Document file; `-` or absent reads standard input.
    file: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Cube name with optional `+state=n` overrides, or a configuration literal.
    #[arg(long)]
    src: String,
    #[arg(long)]
    dst: String,
    /// Source populations to try, `a..b`.
    #[arg(long)]
    pop: Option<String>,
    /// Do not print the witness run.
    #[arg(long)]
    no_witness: bool,
}

#[derive(Subcommand, Debug)]
enum GenerateCommand {
    /// The counter network with n stages.
    Counter {
        #[arg(short = 'n', default_value_t = 3)]
        n: usize,
    },
    /// The ten-state register protocol where a4 is never covered.
    Fig2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReduceKind {
    RbnToAsms,
    AsmsToRbn,
    IoToRbn,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    AtLeastOne,
    AtLeastOneOrZero,
    General,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.is::<input::Diagnostics>() => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let cap = cli.cap;
    match cli.command {
        Command::Check(CheckCommand::Reach(a)) => commands::check_reach(&a, cap),
        Command::Check(CheckCommand::All { file }) => commands::check_all(file.as_deref(), cap),
        Command::Reduce { kind, file, model } => commands::reduce(kind, &file, model.as_deref()),
        Command::Simulate {
            file,
            model,
            from,
            steps,
            seed,
        } => commands::simulate(&file, model.as_deref(), &from, steps, seed),
        Command::Cutoff {
            file,
            model,
            init,
            target,
            range,
            window,
            register,
        } => commands::cutoff(
            &file,
            model.as_deref(),
            &init,
            &target,
            &range,
            window,
            register.as_deref(),
            cap,
        ),
        Command::Crp {
            file,
            model,
            support,
            dst,
            variant,
            k_max,
        } => commands::crp(&file, model.as_deref(), &support, &dst, variant, k_max, cap),
        Command::NormalizeRun { file, model, trace } => {
            commands::normalize_run(&file, model.as_deref(), &trace)
        }
        Command::Generate(GenerateCommand::Counter { n }) => commands::generate_counter(n),
        Command::Generate(GenerateCommand::Fig2) => commands::generate_fig2(),
    }
}
