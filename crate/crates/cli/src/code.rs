use std::path::PathBuf;

use clap::{Args, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regcode::analysis::{cutset_max_m, fmt_ratio_decimal};
use regcode::codec::{self, read_share, write_share, DiskShare};
use regcode::construction::{
    build_code, build_explicit_steiner_code_with_layout, smallest_explicit_field, verify_s,
    BuildOptions, CodeSpec, Layout, LongParity, VerifyOptions, DEFAULT_SUBSET_CAP,
};
use regcode::ffield::PrimeField;
use serde_json::json;

use crate::io::{
    emit, load_design, load_message, load_spec, pretty, read_bytes, read_text, share_path, write_bytes,
    Failure,
};

#[derive(Subcommand)]
pub enum CodeCmd {
    /// Build a code spec from a design.
    Build(BuildArgs),
    /// Show parameters of a spec, optionally re-verifying decodability.
    Inspect {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        check: CheckArgs,
    },
}

#[derive(Args)]
pub struct CheckArgs {
    /// Enumerate all erasure sets up to this many.
    #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
    cap: u128,
    /// Above the cap, check this many seeded random erasure sets instead
    /// (verification is then incomplete).
    #[arg(long)]
    sample: Option<usize>,
}

impl CheckArgs {
    fn options(&self, seed: u64) -> VerifyOptions {
        VerifyOptions {
            cap: self.cap,
            allow_sampling: self.sample.is_some(),
            sample_size: self.sample.unwrap_or(0),
            sample_seed: seed,
        }
    }
}

#[derive(Args)]
pub struct BuildArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    k: u32,
    /// Field modulus, or `auto` for the smallest prime above C(n,k)·T·M.
    #[arg(long, default_value = "auto")]
    q: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random S candidates tried after the structured one.
    #[arg(long, default_value_t = 64)]
    budget: usize,
    /// Use the explicit single-parity construction (Steiner systems S(2,r,n), k = n-2).
    #[arg(long)]
    explicit: bool,
    /// JSON list of per-group disk orders; default is ascending.
    #[arg(long)]
    layout: Option<PathBuf>,
    #[command(flatten)]
    check: CheckArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_q(s: &str) -> Result<Option<u64>, Failure> {
    if s == "auto" {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Failure::Usage(format!("--q must be a prime or `auto`, got {s:?}")))
}

pub fn build_spec(a: &BuildArgs) -> Result<CodeSpec, Failure> {
    let design = load_design(&a.design)?;
    let layout = match &a.layout {
        Some(p) => {
            let placement: Vec<Vec<u32>> = serde_json::from_str(&read_text(p)?)
                .map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            Some(Layout::with_placement(&design, placement)?)
        }
        None => None,
    };
    let q = parse_q(&a.q)?;
    if a.explicit {
        if a.k + 2 != design.n {
            return Err(Failure::Usage(format!(
                "--explicit builds k = n - 2 = {}, got --k {}",
                design.n.saturating_sub(2),
                a.k
            )));
        }
        let field = match q {
            Some(q) => PrimeField::new(q)?,
            None => smallest_explicit_field(design.r)?,
        };
        let layout = layout.unwrap_or_else(|| Layout::ascending(&design));
        return Ok(build_explicit_steiner_code_with_layout(&design, field, layout)?);
    }
    let opts = BuildOptions {
        q,
        seed: a.seed,
        budget: a.budget,
        verify: a.check.options(a.seed),
        layout,
    };
    Ok(build_code(&design, a.k, &opts)?)
}

fn inspect(spec: &CodeSpec, verify: Option<VerifyOptions>) -> Result<serde_json::Value, Failure> {
    let p = &spec.params;
    let (alpha_bar, m_bar) = spec.normalized();
    let cutset = cutset_max_m(p.n, p.k, p.d, &alpha_bar)?;
    let mut v = json!({
        "hash": spec.hash_hex(),
        "q": spec.field.modulus(),
        "case": p.case(),
        "params": p,
        "alpha_bar": fmt_ratio_decimal(&alpha_bar),
        "M_bar": fmt_ratio_decimal(&m_bar),
        "cutset_M": fmt_ratio_decimal(&cutset),
        "long_parity": match &spec.long_parity {
            LongParity::Phi(phi) => json!({ "phi": phi }),
            LongParity::Matrix(s) => json!({ "S_rows": s.rows(), "S_cols": s.cols() }),
        },
    });
    if let Some(opts) = verify {
        v["verify"] = serde_json::to_value(verify_s(spec, &opts)?).expect("report serializes");
    }
    Ok(v)
}

pub fn run(cmd: CodeCmd) -> Result<(), Failure> {
    match cmd {
        CodeCmd::Build(a) => {
            let spec = build_spec(&a)?;
            emit(a.out.as_deref(), &spec.to_json())
        }
        CodeCmd::Inspect { spec, verify, check } => {
            let spec = load_spec(&spec)?;
            let v = inspect(&spec, verify.then(|| check.options(0)))?;
            let failed = v["verify"]["failures"].as_array().map_or(0, |f| f.len());
            emit(None, &pretty(&v))?;
            if failed > 0 {
                return Err(regcode::Error::InvalidParams(format!(
                    "rank condition fails for {failed} erasure set(s)"
                ))
                .into());
            }
            Ok(())
        }
    }
}

#[derive(Args)]
pub struct EncodeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// JSON array of M field elements.
    #[arg(long, conflicts_with = "random")]
    message: Option<PathBuf>,
    /// Encode a seeded uniform random message (also written as message.json).
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for disk_<i>.rgc files.
    #[arg(long)]
    out_dir: PathBuf,
}

pub fn random_message(spec: &CodeSpec, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = spec.field.modulus();
    (0..spec.params.m).map(|_| rng.gen_range(0..q)).collect()
}

pub fn encode(a: EncodeArgs) -> Result<(), Failure> {
    let spec = load_spec(&a.spec)?;
    let msg = match (&a.message, a.random) {
        (Some(p), _) => load_message(p)?,
        (None, true) => random_message(&spec, a.seed),
        (None, false) => return Err(Failure::Usage("give --message FILE or --random".into())),
    };
    let shares = codec::encode(&spec, &msg)?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Failure::Io(format!("{}: {e}", a.out_dir.display())))?;
    if a.random {
        write_bytes(&a.out_dir.join("message.json"), serde_json::to_string(&msg).expect("json").as_bytes())?;
    }
    let mut bytes = 0;
    for share in &shares.shares {
        let data = write_share(&spec, share)?;
        bytes += data.len();
        write_bytes(&share_path(&a.out_dir, share.disk), &data)?;
    }
    emit(None, &pretty(&json!({ "disks": shares.shares.len(), "bytes": bytes, "spec_hash": spec.hash_hex() })))
}

/// Reads every `disk_<i>.rgc` present in `dir`, skipping `except`.
fn read_dir_shares(spec: &CodeSpec, dir: &std::path::Path, except: &[u32]) -> Result<Vec<DiskShare>, Failure> {
    let mut out = Vec::new();
    for disk in (1..=spec.params.n).filter(|d| !except.contains(d)) {
        let path = share_path(dir, disk);
        if path.exists() {
            let share = read_share(spec, &read_bytes(&path)?)?;
            if share.disk != disk {
                return Err(Failure::Io(format!("{} holds disk {}", path.display(), share.disk)));
            }
            out.push(share);
        }
    }
    Ok(out)
}

#[derive(Args)]
pub struct RepairArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    failed: u32,
    /// Directory holding the surviving disk_<i>.rgc files.
    #[arg(long)]
    dir: PathBuf,
    /// Where to write the rebuilt share; default <dir>/disk_<failed>.rgc.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn repair(a: RepairArgs) -> Result<(), Failure> {
    let spec = load_spec(&a.spec)?;
    let helpers = read_dir_shares(&spec, &a.dir, &[a.failed])?;
    let (share, transcript) = codec::repair(&spec, a.failed, &helpers)?;
    let out = a.out.unwrap_or_else(|| share_path(&a.dir, a.failed));
    write_bytes(&out, &write_share(&spec, &share)?)?;
    emit(None, &pretty(&transcript))
}

#[derive(Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Directory of disk_<i>.rgc files.
    #[arg(long, required_unless_present = "share")]
    dir: Option<PathBuf>,
    /// Restrict --dir to these disks (comma separated).
    #[arg(long, value_delimiter = ',')]
    disks: Vec<u32>,
    /// Individual share files.
    #[arg(long, conflicts_with = "dir")]
    share: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn reconstruct(a: ReconstructArgs) -> Result<(), Failure> {
    let spec = load_spec(&a.spec)?;
    let shares = match &a.dir {
        Some(dir) => {
            let all = read_dir_shares(&spec, dir, &[])?;
            if a.disks.is_empty() {
                all
            } else {
                all.into_iter().filter(|s| a.disks.contains(&s.disk)).collect()
            }
        }
        None => a
            .share
            .iter()
            .map(|p| Ok(read_share(&spec, &read_bytes(p)?)?))
            .collect::<Result<_, Failure>>()?,
    };
    let msg = codec::reconstruct(&spec, &shares)?;
    emit(a.out.as_deref(), &serde_json::to_string(&msg).expect("json"))
}
