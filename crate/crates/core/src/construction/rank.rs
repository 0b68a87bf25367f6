//! Decodability of a code for every erasure set `A`, `|A| = n - k`.
//!
//! `Q_A` is block diagonal, one `r × w` block per parity group, so its kernel
//! splits per group and has dimension `T(A)`. A message `d` is lost exactly
//! when `(d, S·d)` lies in that kernel, i.e. when `S·K_data - K_par` has a
//! nontrivial kernel. [`rank_condition_holds`] checks that `T × T(A)` matrix;
//! [`qa_g_rank`] forms `Q_A·G` and reduces it directly.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CodeParams, CodeSpec, Layout};
use crate::combin::{binom, elems_of, mask_of, subset_masks};
use crate::error::{Error, Result};
use crate::ffield::{FieldMatrix, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Enumerate all erasure sets when there are at most this many.
    pub cap: u128,
    /// Above the cap, check a seeded random sample instead of failing.
    pub allow_sampling: bool,
    pub sample_size: usize,
    pub sample_seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: super::DEFAULT_SUBSET_CAP,
            allow_sampling: false,
            sample_size: 10_000,
            sample_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub total_sets: u128,
    pub checked: usize,
    /// False when only a random sample of erasure sets was checked.
    pub exhaustive: bool,
    /// Erasure sets (1-based disk ids) for which `rank(Q_A·G) < M`.
    pub failures: Vec<Vec<u32>>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupView {
    pub erased: u32,
    /// Short-code rows kept in `R_j`.
    pub kept: Vec<usize>,
    /// At most `t - 1` symbols erased, so the whole column is recoverable.
    pub recovered: bool,
}

/// Per-group view of an erasure set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureView {
    pub erased_mask: u128,
    pub groups: Vec<GroupView>,
}

impl ErasureView {
    pub fn new(params: &CodeParams, layout: &Layout, erased: &[u32]) -> ErasureView {
        Self::from_mask(params, layout, mask_of(erased))
    }

    pub fn from_mask(params: &CodeParams, layout: &Layout, erased_mask: u128) -> ErasureView {
        let w = params.width();
        let groups = layout
            .placement()
            .iter()
            .map(|disks| {
                let lost: Vec<bool> = disks
                    .iter()
                    .map(|&d| erased_mask & (1u128 << (d - 1)) != 0)
                    .collect();
                let erased = lost.iter().filter(|&&l| l).count() as u32;
                let recovered = erased < params.t;
                let kept = if recovered {
                    (0..w).collect()
                } else {
                    (0..disks.len()).filter(|&i| !lost[i]).collect()
                };
                GroupView {
                    erased,
                    kept,
                    recovered,
                }
            })
            .collect();
        ErasureView {
            erased_mask,
            groups,
        }
    }

    /// `T(A)`: total rank deficit over the groups.
    pub fn deficit(&self, w: usize) -> usize {
        self.groups.iter().map(|g| w - g.kept.len()).sum()
    }
}

/// The `(r·N*) × (w·N*)` block-diagonal matrix `Q_A`.
pub fn assemble_qa(spec: &CodeSpec, erased: &[u32]) -> FieldMatrix {
    let view = ErasureView::new(&spec.params, &spec.layout, erased);
    qa_from_view(&spec.params, &spec.short_gen, &view)
}

pub(crate) fn qa_from_view(params: &CodeParams, short_gen: &FieldMatrix, view: &ErasureView) -> FieldMatrix {
    let (r, w) = (params.r as usize, params.width());
    let mut q = FieldMatrix::zeros(r * params.n_blocks, w * params.n_blocks);
    for (j, g) in view.groups.iter().enumerate() {
        for &i in &g.kept {
            for c in 0..w {
                q.set(j * r + i, j * w + c, short_gen.get(i, c));
            }
        }
    }
    q
}

/// `Q_A·G` with `G = [I; S]`.
pub(crate) fn qa_times_g(field: &PrimeField, m: usize, qa: &FieldMatrix, s: &FieldMatrix) -> FieldMatrix {
    let mut out = FieldMatrix::zeros(qa.rows(), m);
    for row in 0..qa.rows() {
        let q_row = qa.row(row);
        let mut acc: Vec<u64> = q_row[..m].to_vec();
        for (tau, &coef) in q_row[m..].iter().enumerate() {
            if coef != 0 {
                for (a, &sv) in acc.iter_mut().zip(s.row(tau)) {
                    *a = field.add(*a, field.mul(coef, sv));
                }
            }
        }
        out.row_mut(row).copy_from_slice(&acc);
    }
    out
}

/// `rank(Q_A·G)` by direct elimination.
pub fn qa_g_rank(spec: &CodeSpec, erased: &[u32]) -> usize {
    let qa = assemble_qa(spec, erased);
    qa_times_g(&spec.field, spec.params.m, &qa, &spec.parity_matrix()).rank(&spec.field)
}

pub(crate) struct RankContext<'a> {
    pub params: &'a CodeParams,
    pub field: &'a PrimeField,
    pub short_gen: &'a FieldMatrix,
    pub layout: &'a Layout,
}

impl RankContext<'_> {
    pub(crate) fn holds(&self, s: &FieldMatrix, erased_mask: u128) -> bool {
        let view = ErasureView::from_mask(self.params, self.layout, erased_mask);
        let (w, m, t_rows) = (self.params.width(), self.params.m, self.params.parity_count);
        let f = self.field;
        let mut columns: Vec<Vec<u64>> = Vec::new();
        for (j, g) in view.groups.iter().enumerate() {
            if g.kept.len() == w {
                continue;
            }
            let kernel = self.short_gen.select_rows(&g.kept).nullspace(f);
            for kc in 0..kernel.cols() {
                let mut col = vec![0u64; t_rows];
                for c in 0..w {
                    let v = kernel.get(c, kc);
                    if v == 0 {
                        continue;
                    }
                    let pos = j * w + c;
                    if pos < m {
                        for (tau, x) in col.iter_mut().enumerate() {
                            *x = f.add(*x, f.mul(s.get(tau, pos), v));
                        }
                    } else {
                        let tau = pos - m;
                        col[tau] = f.sub(col[tau], v);
                    }
                }
                columns.push(col);
            }
        }
        if columns.is_empty() {
            return true;
        }
        if columns.len() > t_rows {
            return false;
        }
        let mut c = FieldMatrix::zeros(t_rows, columns.len());
        for (k, col) in columns.iter().enumerate() {
            for (tau, &v) in col.iter().enumerate() {
                c.set(tau, k, v);
            }
        }
        c.rank(f) == columns.len()
    }

    /// Erasure sets to check, or an error if the cap is exceeded without sampling.
    pub(crate) fn erasure_sets(&self, opts: &VerifyOptions) -> Result<(u128, bool, Vec<u128>)> {
        let (n, k) = (self.params.n, self.params.k);
        let total = binom(n as u64, (n - k) as u64);
        if total <= opts.cap {
            return Ok((total, true, subset_masks(n, n - k)));
        }
        if !opts.allow_sampling {
            return Err(Error::BudgetExceeded {
                count: total,
                cap: opts.cap,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.sample_seed);
        let sets = (0..opts.sample_size)
            .map(|_| {
                sample(&mut rng, n as usize, (n - k) as usize)
                    .iter()
                    .fold(0u128, |m, i| m | (1u128 << i))
            })
            .collect();
        Ok((total, false, sets))
    }

    pub(crate) fn verify(&self, s: &FieldMatrix, opts: &VerifyOptions) -> Result<VerifyReport> {
        let (total, exhaustive, sets) = self.erasure_sets(opts)?;
        let mut failures: Vec<u128> = sets
            .par_iter()
            .filter(|&&a| !self.holds(s, a))
            .copied()
            .collect();
        failures.sort_unstable();
        failures.dedup();
        Ok(VerifyReport {
            total_sets: total,
            checked: sets.len(),
            exhaustive,
            failures: failures.into_iter().map(elems_of).collect(),
        })
    }
}

/// `rank(Q_A·G) = M` for one erasure set, via the kernel of `Q_A`.
pub fn rank_condition_holds(spec: &CodeSpec, erased: &[u32]) -> bool {
    let ctx = RankContext {
        params: &spec.params,
        field: &spec.field,
        short_gen: &spec.short_gen,
        layout: &spec.layout,
    };
    ctx.holds(&spec.parity_matrix(), mask_of(erased))
}

/// Checks `rank(Q_A·G) = M` for every erasure set (or a seeded sample above the cap).
pub fn verify_s(spec: &CodeSpec, opts: &VerifyOptions) -> Result<VerifyReport> {
    let ctx = RankContext {
        params: &spec.params,
        field: &spec.field,
        short_gen: &spec.short_gen,
        layout: &spec.layout,
    };
    ctx.verify(&spec.parity_matrix(), opts)
}
