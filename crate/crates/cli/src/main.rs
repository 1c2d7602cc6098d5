use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod error;

use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "oim", version, about = "Oscillator Ising machine simulation and stability analysis")]
struct Cli {
    /// Worker threads (default: all cores). Never changes output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded random graph.
    Gen {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive histogram of Ising energies.
    Enumerate {
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Count mirror images separately (2^n configurations).
        #[arg(long)]
        full_count: bool,
    },
    /// Largest Lyapunov exponent of binarized states over a K_s grid.
    Stability {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        k: f64,
        #[arg(long, allow_negative_numbers = true)]
        ks_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        ks_max: f64,
        #[arg(long, allow_negative_numbers = true)]
        ks_step: f64,
        /// Only the ground-state representatives.
        #[arg(long)]
        ground_only: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-energy min/max of the largest Lyapunov exponent.
    Levels {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        k: f64,
        #[arg(long, allow_negative_numbers = true)]
        ks: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Injection strength at which each binarized state becomes stable.
    CriticalKs {
        graph: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        k: f64,
        #[arg(long)]
        ground_only: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate a single trajectory and record the phases.
    Trace {
        graph: PathBuf,
        #[command(flatten)]
        dyn_args: DynArgs,
        #[arg(long, allow_negative_numbers = true)]
        ks: f64,
        /// Samples are written every this many steps.
        #[arg(long, default_value_t = 10)]
        stride: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run trial campaigns, one per K_s, with paired initial conditions.
    Simulate {
        graph: PathBuf,
        #[command(flatten)]
        dyn_args: DynArgs,
        /// Comma-separated injection strengths.
        #[arg(long, allow_negative_numbers = true, value_delimiter = ',', required = true)]
        ks: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        /// Output directory; one subdirectory per K_s.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the numerical self-checks on a graph, or on built-in graphs.
    Verify {
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct DynArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    k: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.005)]
    kn: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    }
    match cli.command {
        Command::Gen { nodes, edges, seed, out } => commands::gen(nodes, edges, seed, &out),
        Command::Enumerate { graph, out, full_count } => commands::enumerate(&graph, &out, full_count),
        Command::Stability { graph, k, ks_min, ks_max, ks_step, ground_only, out } => {
            commands::stability(&graph, k, (ks_min, ks_max, ks_step), ground_only, &out)
        }
        Command::Levels { graph, k, ks, out } => commands::levels(&graph, k, ks, &out),
        Command::CriticalKs { graph, k, ground_only, out } => commands::critical_ks(&graph, k, ground_only, &out),
        Command::Trace { graph, dyn_args, ks, stride, out } => commands::trace(&graph, &dyn_args, ks, stride, &out),
        Command::Simulate { graph, dyn_args, ks, trials, out } => {
            commands::simulate(&graph, &dyn_args, &ks, trials, &out)
        }
        Command::Verify { graph, seed } => commands::verify(graph.as_deref(), seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
