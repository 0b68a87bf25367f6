use std::collections::BTreeSet;

use super::{check_share, DiskShare};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::ffield::FieldMatrix;

/// Decoder for one set of available disks, reusable across messages.
///
/// Every available symbol is a known linear form in the message, namely a row
/// of `Q_A·G`. The plan keeps `M` independent forms, the inverse of the
/// `M × M` system they span, and the remaining forms for consistency checks.
#[derive(Debug, Clone)]
pub struct DecodePlan {
    disks: Vec<u32>,
    /// `(group, row)` of every available symbol, in share order.
    coords: Vec<(u32, u32)>,
    forms: FieldMatrix,
    basis: Vec<usize>,
    inverse: FieldMatrix,
}

impl DecodePlan {
    pub fn new(spec: &CodeSpec, available: &[u32]) -> Result<DecodePlan> {
        let p = &spec.params;
        let disks: BTreeSet<u32> = available.iter().copied().collect();
        if disks.len() != available.len() {
            return Err(Error::InvalidParams("duplicate disk ids".into()));
        }
        if let Some(&bad) = disks.iter().find(|&&d| d == 0 || d > p.n) {
            return Err(Error::InvalidParams(format!("disk {bad} does not exist")));
        }
        if disks.len() < p.k as usize {
            return Err(Error::ShareCount {
                expected: p.k as usize,
                got: disks.len(),
            });
        }
        let (m, w) = (p.m, p.width());
        let f = &spec.field;
        let s = spec.parity_matrix();
        let coords: Vec<(u32, u32)> = disks
            .iter()
            .flat_map(|&d| spec.layout.slots(d).iter().copied())
            .collect();
        let mut forms = FieldMatrix::zeros(coords.len(), m);
        for (idx, &(group, row)) in coords.iter().enumerate() {
            let g_row = spec.short_gen.row(row as usize);
            let out = forms.row_mut(idx);
            for (c, &coef) in g_row.iter().enumerate() {
                if coef == 0 {
                    continue;
                }
                let pos = group as usize * w + c;
                if pos < m {
                    out[pos] = f.add(out[pos], coef);
                } else {
                    for (x, &sv) in out.iter_mut().zip(s.row(pos - m)) {
                        *x = f.add(*x, f.mul(coef, sv));
                    }
                }
            }
        }
        let basis = forms.independent_rows(f);
        if basis.len() < m {
            return Err(Error::RankDeficient { rank: basis.len(), m });
        }
        let inverse = forms.select_rows(&basis).inverse(f)?;
        Ok(DecodePlan {
            disks: disks.into_iter().collect(),
            coords,
            forms,
            basis,
            inverse,
        })
    }

    pub fn disks(&self) -> &[u32] {
        &self.disks
    }

    /// Recovers the message from shares of exactly the planned disks.
    pub fn decode(&self, spec: &CodeSpec, shares: &[DiskShare]) -> Result<Vec<u64>> {
        let mut ordered: Vec<&DiskShare> = shares.iter().collect();
        ordered.sort_by_key(|s| s.disk);
        if ordered.iter().map(|s| s.disk).ne(self.disks.iter().copied()) {
            return Err(Error::InvalidParams("shares do not match the decode plan".into()));
        }
        let mut values = Vec::with_capacity(self.coords.len());
        for share in ordered {
            check_share(spec, share)?;
            values.extend(share.slots.iter().map(|s| s.value));
        }
        let f = &spec.field;
        let z: Vec<u64> = self.basis.iter().map(|&i| values[i]).collect();
        let msg = self.inverse.mul_vec(f, &z)?;
        // symbols outside the basis must agree with the decoded message
        let predicted = self.forms.mul_vec(f, &msg)?;
        if let Some(i) = (0..values.len()).find(|&i| predicted[i] != values[i]) {
            let (g, r) = self.coords[i];
            return Err(Error::CorruptShare(format!(
                "symbol (group {}, row {}) is inconsistent with the other shares",
                g + 1,
                r + 1
            )));
        }
        Ok(msg)
    }
}

/// Recovers the message from at least `k` distinct shares.
pub fn reconstruct(spec: &CodeSpec, shares: &[DiskShare]) -> Result<Vec<u64>> {
    let disks: Vec<u32> = shares.iter().map(|s| s.disk).collect();
    DecodePlan::new(spec, &disks)?.decode(spec, shares)
}
