use std::path::PathBuf;

use clap::Subcommand;
use regcode::storesim::{random_failure_soak, run_scenario, Scenario};
use serde_json::json;

use crate::code::random_message;
use crate::io::{emit, load_message, load_spec, pretty, read_text, Failure};

#[derive(Subcommand)]
pub enum SimCmd {
    /// Replay a JSON scenario of fail/repair/read/assert events.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        /// Stored message; a seeded random one is used otherwise.
        #[arg(long)]
        message: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random fail-then-repair cycles, checking the cluster after each.
    Soak {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print only totals instead of the full event log.
        #[arg(long)]
        summary: bool,
    },
}

pub fn run(cmd: SimCmd) -> Result<(), Failure> {
    match cmd {
        SimCmd::Run { spec, scenario, message, seed } => {
            let spec = load_spec(&spec)?;
            let sc = Scenario::from_json(&read_text(&scenario)?)?;
            let msg = match message {
                Some(p) => load_message(&p)?,
                None => random_message(&spec, seed),
            };
            let report = run_scenario(&spec, &msg, &sc)?;
            let failed = report.failed_events;
            emit(None, &pretty(&report))?;
            if failed > 0 {
                return Err(regcode::Error::Scenario(format!("{failed} event(s) failed")).into());
            }
            Ok(())
        }
        SimCmd::Soak { spec, steps, seed, summary } => {
            let spec = load_spec(&spec)?;
            let msg = random_message(&spec, seed);
            let report = random_failure_soak(&spec, &msg, steps, seed)?;
            let mismatches = report.mismatches;
            if summary {
                emit(
                    None,
                    &pretty(&json!({
                        "steps": steps,
                        "repairs": report.repairs,
                        "total_moved": report.total_moved,
                        "expected_per_repair": report.expected_per_repair,
                        "mismatches": report.mismatches,
                        "final_state_intact": report.final_state_intact,
                    })),
                )?;
            } else {
                emit(None, &pretty(&report))?;
            }
            if mismatches > 0 {
                return Err(regcode::Error::Scenario(format!("{mismatches} cycle(s) left the cluster inconsistent")).into());
            }
            Ok(())
        }
    }
}
