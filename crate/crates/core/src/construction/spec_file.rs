//! JSON form of a [`CodeSpec`]. Field elements are written as decimal strings
//! so moduli up to 2^61 survive JSON readers that parse numbers as doubles.

use serde::{Deserialize, Serialize};

use super::{CodeParams, CodeSpec, Layout, LongParity};
use crate::designs::BlockDesign;
use crate::error::{Error, Result};
use crate::ffield::{FieldMatrix, PrimeField};

const FORMAT: &str = "regcode-spec/1";

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ParityFile {
    Phi(Vec<String>),
    S(MatrixFile),
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    format: String,
    q: u64,
    params: CodeParams,
    design: BlockDesign,
    layout: Layout,
    short_gen: MatrixFile,
    long_parity: ParityFile,
}

fn matrix_out(m: &FieldMatrix) -> MatrixFile {
    MatrixFile {
        rows: m.rows(),
        cols: m.cols(),
        data: (0..m.rows())
            .map(|r| m.row(r).iter().map(u64::to_string).collect())
            .collect(),
    }
}

fn parse_elem(s: &str, q: u64) -> Result<u64> {
    let v: u64 = s
        .parse()
        .map_err(|_| Error::Format(format!("field element {s:?} is not a decimal integer")))?;
    if v >= q {
        return Err(Error::Format(format!("field element {v} is not reduced mod {q}")));
    }
    Ok(v)
}

fn matrix_in(m: &MatrixFile, q: u64) -> Result<FieldMatrix> {
    if m.data.len() != m.rows || m.data.iter().any(|r| r.len() != m.cols) {
        return Err(Error::Format(format!("matrix data does not match {}x{}", m.rows, m.cols)));
    }
    let entries = m
        .data
        .iter()
        .flatten()
        .map(|s| parse_elem(s, q))
        .collect::<Result<Vec<_>>>()?;
    FieldMatrix::from_entries(m.rows, m.cols, entries)
}

impl CodeSpec {
    /// Canonical JSON; the spec hash is taken over exactly these bytes.
    pub fn to_json(&self) -> String {
        let file = SpecFile {
            format: FORMAT.into(),
            q: self.field.modulus(),
            params: self.params.clone(),
            design: self.design.clone(),
            layout: self.layout.clone(),
            short_gen: matrix_out(&self.short_gen),
            long_parity: match &self.long_parity {
                LongParity::Phi(phi) => ParityFile::Phi(phi.iter().map(u64::to_string).collect()),
                LongParity::Matrix(s) => ParityFile::S(matrix_out(s)),
            },
        };
        serde_json::to_string(&file).expect("spec serializes")
    }

    /// Parses and structurally validates a spec. Decodability is not re-verified.
    pub fn from_json(s: &str) -> Result<CodeSpec> {
        let file: SpecFile = serde_json::from_str(s)?;
        if file.format != FORMAT {
            return Err(Error::Format(format!("unknown spec format {:?}", file.format)));
        }
        let field = PrimeField::new(file.q)?;
        let q = file.q;
        let design = BlockDesign::new(
            file.design.n,
            file.design.t,
            file.design.r,
            file.design.lambda,
            file.design.blocks,
        );
        let report = design.verify();
        if !report.valid {
            return Err(Error::DesignViolation(report.violation.unwrap_or_default()));
        }
        let layout = Layout::with_placement(&design, file.layout.placement().to_vec())?;
        let p = file.params;
        let w = (design.r + 1).saturating_sub(design.t) as usize;
        let consistent = p.n == design.n
            && p.t == design.t
            && p.r == design.r
            && p.lambda == design.lambda
            && p.d == design.n + 1 - design.t
            && p.n_blocks == design.num_blocks()
            && p.alpha == design.replication()?
            && p.gamma == w as u64 * p.alpha
            && p.m + p.parity_count == w * p.n_blocks
            && p.k >= 1
            && p.k <= p.d;
        if !consistent {
            return Err(Error::Format("params do not match the embedded design".into()));
        }
        let short_gen = matrix_in(&file.short_gen, q)?;
        if (short_gen.rows(), short_gen.cols()) != (p.r as usize, w) {
            return Err(Error::Format(format!(
                "short generator is {}x{}, expected {}x{w}",
                short_gen.rows(),
                short_gen.cols(),
                p.r
            )));
        }
        let long_parity = match &file.long_parity {
            ParityFile::Phi(phi) => {
                if p.parity_count != 1 || phi.len() != w {
                    return Err(Error::Format("phi form needs T = 1 and r - 1 coefficients".into()));
                }
                LongParity::Phi(phi.iter().map(|s| parse_elem(s, q)).collect::<Result<_>>()?)
            }
            ParityFile::S(m) => {
                let s = matrix_in(m, q)?;
                if (s.rows(), s.cols()) != (p.parity_count, p.m) {
                    return Err(Error::Format(format!(
                        "S is {}x{}, expected {}x{}",
                        s.rows(),
                        s.cols(),
                        p.parity_count,
                        p.m
                    )));
                }
                LongParity::Matrix(s)
            }
        };
        Ok(CodeSpec {
            params: p,
            field,
            design,
            layout,
            short_gen,
            long_parity,
        })
    }
}
