use std::path::PathBuf;

use clap::{ArgGroup, Args, Subcommand, ValueEnum};
use regcode::designs::{gen_complete_design, gen_steiner_triple, tables, BlockDesign};

use crate::io::{emit, load_design, pretty, Failure};

#[derive(Subcommand)]
pub enum DesignCmd {
    /// Print a design as JSON.
    Gen(GenArgs),
    /// Check that every t-subset lies in exactly λ blocks.
    Verify {
        #[arg(long)]
        design: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Table {
    /// S(2,3,7)
    S7,
    /// S(2,3,9), the block order used by the worked (9,7,8) example
    S9,
    /// S(2,4,13)
    S13,
}

#[derive(Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["steiner_triple", "complete", "table"])))]
pub struct GenArgs {
    /// Steiner triple system S(2,3,n), n ≡ 1 or 3 (mod 6).
    #[arg(long)]
    steiner_triple: bool,
    /// All r-subsets of n points, as a t-design.
    #[arg(long)]
    complete: bool,
    /// A fixed published design.
    #[arg(long, value_enum)]
    table: Option<Table>,
    #[arg(long)]
    n: Option<u32>,
    /// Block size for --complete.
    #[arg(long)]
    r: Option<u32>,
    /// Strength for --complete.
    #[arg(long, default_value_t = 2)]
    t: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn need(v: Option<u32>, name: &str) -> Result<u32, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this design kind")))
}

fn generate(a: &GenArgs) -> Result<BlockDesign, Failure> {
    if let Some(t) = a.table {
        return Ok(match t {
            Table::S7 => tables::steiner_2_3_7(),
            Table::S9 => tables::steiner_2_3_9(),
            Table::S13 => tables::steiner_2_4_13(),
        });
    }
    let n = need(a.n, "n")?;
    if a.steiner_triple {
        Ok(gen_steiner_triple(n)?)
    } else {
        Ok(gen_complete_design(a.t, need(a.r, "r")?, n)?)
    }
}

pub fn run(cmd: DesignCmd) -> Result<(), Failure> {
    match cmd {
        DesignCmd::Gen(a) => emit(a.out.as_deref(), &generate(&a)?.to_json()),
        DesignCmd::Verify { design } => {
            let d = load_design(&design)?;
            let report = d.verify();
            emit(None, &pretty(&report))?;
            match report.violation {
                None => Ok(()),
                Some(v) => Err(regcode::Error::DesignViolation(v).into()),
            }
        }
    }
}
