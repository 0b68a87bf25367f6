mod analyze;
mod code;
mod design;
mod io;
mod sim;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use io::Failure;

#[derive(Parser)]
#[command(name = "regcode", version, about = "Block-design regenerating codes: build, encode, repair, analyze")]
struct Cli {
    /// Worker threads for parallel verification and sweeps (0 = all cores).
    #[arg(long, global = true, env = "RGC_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or verify block designs.
    #[command(subcommand)]
    Design(design::DesignCmd),
    /// Build or inspect code specs.
    #[command(subcommand)]
    Code(code::CodeCmd),
    /// Encode a message into one share file per disk.
    Encode(code::EncodeArgs),
    /// Rebuild one disk's share from the other share files.
    Repair(code::RepairArgs),
    /// Recover the message from at least k share files.
    Reconstruct(code::ReconstructArgs),
    /// Tradeoff sweeps, design comparison and exponent checks.
    #[command(subcommand)]
    Analyze(analyze::AnalyzeCmd),
    /// Cluster simulation.
    #[command(subcommand)]
    Sim(sim::SimCmd),
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Design(c) => design::run(c),
        Command::Code(c) => code::run(c),
        Command::Encode(a) => code::encode(a),
        Command::Repair(a) => code::repair(a),
        Command::Reconstruct(a) => code::reconstruct(a),
        Command::Analyze(c) => analyze::run(c),
        Command::Sim(c) => sim::run(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
