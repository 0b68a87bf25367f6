//! From a block design and `(n, k)` to a complete code description.
//!
//! The data matrix `D` has `w = r - t + 1` rows and one column per block. Its
//! first `M` entries (column-major) hold the message and the last `T` hold the
//! long-layer parities `S·d`. Each column is extended by the short MDS code into
//! an `r`-symbol parity group whose symbols go one per disk of the block.

mod generator;
mod layout;
mod rank;
mod spec_file;
mod synth;
mod witness;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::combin::{binom, mask_of, subset_masks};
use crate::designs::BlockDesign;
use crate::error::{Error, Result};
use crate::ffield::{next_prime_above, FieldMatrix, PrimeField};

pub use generator::{is_mds, short_mds_generator};
pub use layout::Layout;
pub use rank::{assemble_qa, qa_g_rank, rank_condition_holds, verify_s, ErasureView, VerifyOptions, VerifyReport};
pub use synth::{random_s, synthesize_s, SynthesisOutcome, SynthesisStrategy};
pub use witness::rank_witness;

/// Default cap on the number of erasure sets enumerated exhaustively.
pub const DEFAULT_SUBSET_CAP: u128 = 1_000_000;

/// Which family of the construction a parameter set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionCase {
    /// `S(2, r, n)` with `k = n - 2`: a single long parity.
    Steiner,
    /// `t = 2`, `d = n - 1`.
    Bibd,
    /// `t > 2`, `d = n - t + 1`.
    TDesign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: u32,
    pub k: u32,
    pub d: u32,
    pub t: u32,
    pub r: u32,
    pub lambda: u64,
    pub alpha: u64,
    /// Per-helper repair symbols; only defined when `t = 2`.
    pub beta: Option<u64>,
    /// Total repair symbols, `(r - t + 1) α`.
    pub gamma: u64,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "T")]
    pub parity_count: usize,
    #[serde(rename = "Nstar")]
    pub n_blocks: usize,
}

impl CodeParams {
    /// Rows of the data matrix, `r - t + 1`.
    pub fn width(&self) -> usize {
        (self.r - self.t + 1) as usize
    }

    pub fn case(&self) -> ConstructionCase {
        if self.t > 2 {
            ConstructionCase::TDesign
        } else if self.lambda == 1 && self.k + 2 == self.n {
            ConstructionCase::Steiner
        } else {
            ConstructionCase::Bibd
        }
    }

    /// `C(n,k)·T·M`, the field size above which a valid `S` is guaranteed to exist.
    pub fn existence_threshold(&self) -> u128 {
        binom(self.n as u64, self.k as u64)
            .saturating_mul(self.parity_count as u128)
            .saturating_mul(self.m as u128)
    }
}

fn block_masks(design: &BlockDesign) -> Vec<u128> {
    design.blocks.iter().map(|b| mask_of(b)).collect()
}

fn ta_from_masks(masks: &[u128], a: u128, t: u32) -> u64 {
    masks
        .iter()
        .map(|b| (b & a).count_ones())
        .filter(|&c| c >= t)
        .map(|c| (c - t + 1) as u64)
        .sum()
}

/// `T(A) = Σ_{B : |B∩A| ≥ t} (|B∩A| - t + 1)`.
pub fn compute_ta(design: &BlockDesign, a: &[u32], t: u32) -> u64 {
    ta_from_masks(&block_masks(design), mask_of(a), t)
}

/// `T(A)` for every `(n-k)`-subset `A`, in colex order of `A`.
pub fn ta_profile(design: &BlockDesign, k: u32, t: u32, cap: u128) -> Result<Vec<u64>> {
    let n = design.n;
    if k > n {
        return Err(Error::InvalidParams(format!("k = {k} exceeds n = {n}")));
    }
    if n > 127 {
        return Err(Error::InvalidParams(format!("n = {n} exceeds the 127-disk limit")));
    }
    let count = binom(n as u64, (n - k) as u64);
    if count > cap {
        return Err(Error::BudgetExceeded { count, cap });
    }
    let masks = block_masks(design);
    Ok(subset_masks(n, n - k)
        .par_iter()
        .map(|&a| ta_from_masks(&masks, a, t))
        .collect())
}

/// `T = max_A T(A)` over all `(n-k)`-subsets, exhaustively.
pub fn compute_t(design: &BlockDesign, k: u32, t: u32, cap: u128) -> Result<u64> {
    if k > design.n.saturating_sub(1) {
        return Err(Error::InvalidParams(format!(
            "k = {k} must be at most n - 1 = {}",
            design.n.saturating_sub(1)
        )));
    }
    Ok(ta_profile(design, k, t, cap)?.into_iter().max().unwrap_or(0))
}

/// Parameters of the code built from `design` for the given `k`; `d = n - t + 1`.
pub fn derive_params(design: &BlockDesign, k: u32) -> Result<CodeParams> {
    derive_params_with_cap(design, k, DEFAULT_SUBSET_CAP)
}

pub fn derive_params_with_cap(design: &BlockDesign, k: u32, cap: u128) -> Result<CodeParams> {
    let (n, t, r) = (design.n, design.t, design.r);
    if t < 2 {
        return Err(Error::InvalidParams(format!(
            "design strength t = {t}; repair from d = n - t + 1 <= n - 1 helpers needs t >= 2"
        )));
    }
    let d = n + 1 - t;
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= d = n - t + 1 = {d}, got k = {k}"
        )));
    }
    let report = design.verify();
    if !report.valid {
        return Err(Error::DesignViolation(report.violation.unwrap_or_default()));
    }
    let alpha = design.replication()?;
    let n_blocks = design.num_blocks();
    let w = (r - t + 1) as usize;
    let parity_count = compute_t(design, k, t, cap)? as usize;
    if parity_count >= w * n_blocks {
        return Err(Error::InvalidParams(format!(
            "T = {parity_count} leaves no room for data in {} symbols",
            w * n_blocks
        )));
    }
    Ok(CodeParams {
        n,
        k,
        d,
        t,
        r,
        lambda: design.lambda,
        alpha,
        beta: (t == 2).then_some(design.lambda),
        gamma: w as u64 * alpha,
        m: w * n_blocks - parity_count,
        parity_count,
        n_blocks,
    })
}

/// Long-layer parity description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LongParity {
    /// Coefficients `φ_1..φ_{r-1}` of the single explicit parity symbol.
    Phi(Vec<u64>),
    /// General `T × M` parity matrix.
    Matrix(FieldMatrix),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub params: CodeParams,
    pub field: PrimeField,
    pub design: BlockDesign,
    pub layout: Layout,
    pub short_gen: FieldMatrix,
    pub long_parity: LongParity,
}

impl CodeSpec {
    /// `S` as a `T × M` matrix regardless of how it is stored.
    pub fn parity_matrix(&self) -> FieldMatrix {
        match &self.long_parity {
            LongParity::Matrix(s) => s.clone(),
            LongParity::Phi(phi) => phi_to_matrix(phi, &self.params),
        }
    }

    /// Disk ids holding the symbols of group `j`.
    pub fn group_disks(&self, j: usize) -> &[u32] {
        &self.layout.placement()[j]
    }

    /// Normalized `(α/β, M/β)` with `β = γ/d`.
    pub fn normalized(&self) -> (num_rational::BigRational, num_rational::BigRational) {
        crate::analysis::realized_point(&self.params)
    }

    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.to_json().as_bytes()).into()
    }

    pub fn hash_hex(&self) -> String {
        self.hash().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn phi_to_matrix(phi: &[u64], params: &CodeParams) -> FieldMatrix {
    let w = params.width();
    let mut s = FieldMatrix::zeros(1, params.m);
    for p in 0..params.m {
        s.set(0, p, phi[p % w]);
    }
    s
}

/// Lexicographically smallest `φ`: distinct, nonzero, `φ_i + 1 ≠ 0` for `i ≤ r-2`.
pub fn choose_phi(r: u32, field: &PrimeField) -> Result<Vec<u64>> {
    fn extend(pos: usize, len: usize, q: u64, cur: &mut Vec<u64>) -> bool {
        if pos == len {
            return true;
        }
        for v in 1..q {
            // the last coefficient is exempt from the φ + 1 ≠ 0 rule
            if cur.contains(&v) || (pos + 1 < len && v + 1 == q) {
                continue;
            }
            cur.push(v);
            if extend(pos + 1, len, q, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let len = (r - 1) as usize;
    let mut phi = Vec::with_capacity(len);
    if extend(0, len, field.modulus(), &mut phi) {
        Ok(phi)
    } else {
        Err(Error::FieldTooSmall {
            q: field.modulus(),
            reason: format!("no {len} distinct nonzero coefficients with φ_i + 1 ≠ 0"),
        })
    }
}

/// Smallest prime field with `q >= r` that admits a valid `φ`.
pub fn smallest_explicit_field(r: u32) -> Result<PrimeField> {
    let mut q = (r as u64).max(2);
    loop {
        if crate::ffield::is_prime(q) {
            let field = PrimeField::new(q)?;
            if choose_phi(r, &field).is_ok() {
                return Ok(field);
            }
        }
        q += 1;
    }
}

/// The explicit `(n, n-2, n-1)` construction on a Steiner system `S(2, r, n)`.
pub fn build_explicit_steiner_code(design: &BlockDesign, field: PrimeField) -> Result<CodeSpec> {
    build_explicit_steiner_code_with_layout(design, field, Layout::ascending(design))
}

pub fn build_explicit_steiner_code_with_layout(
    design: &BlockDesign,
    field: PrimeField,
    layout: Layout,
) -> Result<CodeSpec> {
    if design.t != 2 || design.lambda != 1 {
        return Err(Error::InvalidParams(format!(
            "explicit construction needs a Steiner system S(2,r,n), got S_{}({},{},{})",
            design.lambda, design.t, design.r, design.n
        )));
    }
    if design.n < 3 {
        return Err(Error::InvalidParams("need n >= 3".into()));
    }
    if field.modulus() < design.r as u64 {
        return Err(Error::FieldTooSmall {
            q: field.modulus(),
            reason: format!("explicit construction needs q >= r = {}", design.r),
        });
    }
    let params = derive_params(design, design.n - 2)?;
    debug_assert_eq!(params.parity_count, 1);
    let phi = choose_phi(design.r, &field)?;
    let short_gen = short_mds_generator(design.r, 2, &field)?;
    Ok(CodeSpec {
        params,
        field,
        design: design.clone(),
        layout,
        short_gen,
        long_parity: LongParity::Phi(phi),
    })
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    /// Field modulus; `None` picks the smallest prime above `C(n,k)·T·M` (and `>= r`).
    pub q: Option<u64>,
    pub seed: u64,
    /// Random `S` candidates to try after the structured one.
    pub budget: usize,
    pub verify: VerifyOptions,
    pub layout: Option<Layout>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            q: None,
            seed: 0,
            budget: 64,
            verify: VerifyOptions::default(),
            layout: None,
        }
    }
}

/// Default field: smallest prime exceeding the existence threshold, at least `r`.
pub fn default_field(params: &CodeParams) -> Result<PrimeField> {
    let floor = params.existence_threshold().max(params.r as u128 - 1);
    PrimeField::new(next_prime_above(floor)?)
}

/// General construction with a synthesized and verified long-layer matrix `S`.
pub fn build_code(design: &BlockDesign, k: u32, opts: &BuildOptions) -> Result<CodeSpec> {
    let params = derive_params_with_cap(design, k, opts.verify.cap)?;
    let field = match opts.q {
        Some(q) => PrimeField::new(q)?,
        None => default_field(&params)?,
    };
    let short_gen = short_mds_generator(params.r, params.t, &field)?;
    let layout = match &opts.layout {
        Some(l) => Layout::with_placement(design, l.placement().to_vec())?,
        None => Layout::ascending(design),
    };
    let outcome = synth::synthesize_with(&params, &layout, &field, opts.seed, opts.budget, &opts.verify, true)?;
    Ok(CodeSpec {
        params,
        field,
        design: design.clone(),
        layout,
        short_gen,
        long_parity: LongParity::Matrix(outcome.s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{gen_complete_design, tables};

    #[test]
    fn ta_examples() {
        let s9 = tables::steiner_2_3_9();
        assert_eq!(compute_ta(&s9, &[1, 2], 2), 1);
        let complete = gen_complete_design(2, 3, 9).unwrap();
        assert_eq!(compute_ta(&complete, &[4, 7], 2), 7);
        // a single erased disk never hits a block twice
        assert_eq!(compute_ta(&s9, &[5], 2), 0);
    }

    #[test]
    fn t_examples() {
        let c = gen_complete_design(2, 5, 9).unwrap();
        // closed form: i = 2 term (2-1)·C(2,2)·C(7,3)
        assert_eq!(compute_t(&c, 7, 2, DEFAULT_SUBSET_CAP).unwrap(), 35);
        assert_eq!(compute_t(&tables::steiner_2_3_9(), 7, 2, DEFAULT_SUBSET_CAP).unwrap(), 1);
        let pairs = gen_complete_design(2, 2, 9).unwrap();
        assert_eq!(compute_t(&pairs, 7, 2, DEFAULT_SUBSET_CAP).unwrap(), 1);
        assert!(matches!(
            compute_t(&c, 7, 2, 10),
            Err(Error::BudgetExceeded { count: 36, cap: 10 })
        ));
    }

    #[test]
    fn params_examples() {
        let p = derive_params(&tables::steiner_2_3_9(), 7).unwrap();
        assert_eq!((p.alpha, p.beta, p.m), (4, Some(1), 23));
        assert_eq!(p.case(), ConstructionCase::Steiner);

        let p = derive_params(&gen_complete_design(2, 3, 9).unwrap(), 7).unwrap();
        assert_eq!((p.alpha, p.beta, p.m, p.parity_count), (28, Some(7), 161, 7));
        assert_eq!(p.case(), ConstructionCase::Bibd);

        let p = derive_params(&gen_complete_design(2, 2, 9).unwrap(), 7).unwrap();
        assert_eq!((p.alpha, p.beta, p.m), (8, Some(1), 35));

        let p = derive_params(&gen_complete_design(3, 4, 7).unwrap(), 4).unwrap();
        assert_eq!(p.d, 5);
        assert_eq!(p.beta, None);
        assert_eq!(p.gamma, 2 * p.alpha);
        assert_eq!(p.case(), ConstructionCase::TDesign);

        assert!(derive_params(&tables::steiner_2_3_9(), 9).is_err());
    }

    #[test]
    fn steiner_parameters_are_integral() {
        for d in [
            tables::steiner_2_3_7(),
            tables::steiner_2_3_9(),
            tables::steiner_2_4_13(),
            crate::designs::gen_steiner_triple(15).unwrap(),
        ] {
            let (n, r) = (d.n as usize, d.r as usize);
            assert_eq!((n * (n - 1)) % (r * (r - 1)), 0);
            let p = derive_params(&d, d.n - 2).unwrap();
            assert_eq!(p.m, n * (n - 1) / r - 1);
            assert_eq!(p.alpha as usize, (n - 1) / (r - 1));
        }
    }

    #[test]
    fn steiner_facts_hold() {
        let d = tables::steiner_2_3_9();
        let alpha = d.replication().unwrap() as usize;
        for m in 1..=d.n {
            let blocks: Vec<&Vec<u32>> = d.blocks_containing(m).map(|(_, b)| b).collect();
            assert_eq!(blocks.len(), alpha);
            for (i, a) in blocks.iter().enumerate() {
                for b in &blocks[i + 1..] {
                    let shared: Vec<_> = a.iter().filter(|e| b.contains(e)).collect();
                    assert_eq!(shared, vec![&m]);
                }
            }
            for other in m + 1..=d.n {
                assert_eq!(d.count_blocks_containing(&[m, other]).unwrap(), 1);
            }
        }
    }

    #[test]
    fn phi_selection() {
        let gf3 = PrimeField::new(3).unwrap();
        assert_eq!(choose_phi(3, &gf3).unwrap(), vec![1, 2]);
        let gf5 = PrimeField::new(5).unwrap();
        assert_eq!(choose_phi(4, &gf5).unwrap(), vec![1, 2, 3]);
        assert_eq!(choose_phi(5, &gf5).unwrap(), vec![1, 2, 3, 4]);
        let gf2 = PrimeField::new(2).unwrap();
        assert!(choose_phi(3, &gf2).is_err());
        assert_eq!(smallest_explicit_field(3).unwrap().modulus(), 3);
        assert_eq!(smallest_explicit_field(4).unwrap().modulus(), 5);
        assert_eq!(smallest_explicit_field(6).unwrap().modulus(), 7);
    }

    #[test]
    fn explicit_code_on_table_designs() {
        let gf3 = PrimeField::new(3).unwrap();
        let spec = build_explicit_steiner_code(&tables::steiner_2_3_9(), gf3).unwrap();
        assert_eq!(spec.long_parity, LongParity::Phi(vec![1, 2]));
        let s = spec.parity_matrix();
        // d_24 = Σ d_odd + 2 Σ d_even
        for p in 0..23 {
            assert_eq!(s.get(0, p), if p % 2 == 0 { 1 } else { 2 });
        }
        let s7 = build_explicit_steiner_code(&tables::steiner_2_3_7(), gf3).unwrap();
        assert_eq!(s7.params.m, 13);
        assert!(build_explicit_steiner_code(
            &tables::steiner_2_3_9(),
            PrimeField::new(2).unwrap()
        )
        .is_err());
    }

    #[test]
    fn default_field_is_threshold_prime() {
        let p = derive_params(&gen_complete_design(2, 3, 9).unwrap(), 7).unwrap();
        assert_eq!(p.existence_threshold(), 40572);
        assert_eq!(default_field(&p).unwrap().modulus(), 40577);
    }
}
