use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use regcode::analysis::{
    compare_designs, exponent_point, exponents_csv, fmt_ratio, parse_ratio,
    sweep_tradeoff, tradeoff_csv,
};
use regcode::designs::gen_complete_design;
use serde_json::json;

use crate::io::{emit, load_design, pretty, Failure};

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
pub enum AnalyzeCmd {
    /// Normalized (ᾱ, M̄) of complete designs for every admissible r, against
    /// the cut-set bound and MSR-MBR time sharing.
    Tradeoff {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repair and storage exponents with r = ceil(n^ε), k = n - τ1, d = n - τ2.
    Exponents {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        /// Values such as `1/2` or `0.25`.
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<String>,
        #[arg(long, default_value_t = 2)]
        tau1: u32,
        #[arg(long, default_value_t = 1)]
        tau2: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a design with the complete design of the same (t, r, n).
    Compare {
        #[arg(long)]
        design: PathBuf,
        /// Complete design file; generated when omitted.
        #[arg(long)]
        complete: Option<PathBuf>,
        #[arg(long)]
        k: u32,
    },
}

pub fn run(cmd: AnalyzeCmd) -> Result<(), Failure> {
    match cmd {
        AnalyzeCmd::Tradeoff { n, k, d, format, out } => {
            let rows = sweep_tradeoff(n, k, d)?;
            for row in rows.iter().filter(|r| r.beyond_msr_range) {
                eprintln!("warning: r = {} lies beyond the MSR end of the range", row.r);
            }
            let text = match format {
                Format::Csv => tradeoff_csv(&rows),
                Format::Json => pretty(
                    &rows
                        .iter()
                        .map(|r| {
                            json!({
                                "n": r.n, "k": r.k, "d": r.d, "r": r.r,
                                "alpha_bar": fmt_ratio(&r.point.alpha_bar),
                                "M_bar": fmt_ratio(&r.point.m_bar),
                                "cutset_M": fmt_ratio(&r.cutset_m),
                                "timesharing_M": r.timesharing_m.as_ref().map(fmt_ratio),
                                "above_timesharing": r.above_timesharing(),
                                "beyond_msr_range": r.beyond_msr_range,
                            })
                        })
                        .collect::<Vec<_>>(),
                ),
            };
            emit(out.as_deref(), &text)
        }
        AnalyzeCmd::Exponents { n, epsilon, tau1, tau2, format, out } => {
            let mut eps = Vec::with_capacity(epsilon.len());
            for e in &epsilon {
                eps.push(parse_ratio(e).ok_or_else(|| Failure::Usage(format!("bad --epsilon value {e:?}")))?);
            }
            let mut points = Vec::new();
            for &nn in &n {
                for e in &eps {
                    points.push(exponent_point(nn, tau1, tau2, e)?);
                }
            }
            let text = match format {
                Format::Csv => exponents_csv(&points),
                Format::Json => pretty(
                    &points
                        .iter()
                        .map(|p| {
                            json!({
                                "n": p.n, "tau1": p.tau1, "tau2": p.tau2,
                                "epsilon": fmt_ratio(&p.epsilon), "r": p.r,
                                "alpha_bar": fmt_ratio(&p.alpha_bar),
                                "M_bar": fmt_ratio(&p.m_bar),
                                "Er": p.er, "Ed": p.ed,
                                "storage_bound_holds": p.storage_bound_holds,
                                "redundancy_bound_holds": p.redundancy_bound_holds,
                                "region": p.membership(),
                            })
                        })
                        .collect::<Vec<_>>(),
                ),
            };
            emit(out.as_deref(), &text)
        }
        AnalyzeCmd::Compare { design, complete, k } => {
            let d1 = load_design(&design)?;
            let d2 = match complete {
                Some(p) => load_design(&p)?,
                None => gen_complete_design(d1.t, d1.r, d1.n)?,
            };
            emit(None, &pretty(&compare_designs(&d1, &d2, k)?))
        }
    }
}
