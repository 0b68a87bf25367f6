//! Encoding into disk shares, single-disk repair by uncoded transfer, and
//! reconstruction of the message from any `k` disks.

mod reconstruct;
mod repair;
mod share_file;

use serde::{Deserialize, Serialize};

use crate::construction::{CodeSpec, LongParity};
use crate::error::{Error, Result};

pub use reconstruct::{reconstruct, DecodePlan};
pub use repair::{repair, RepairTranscript, Transfer};
pub use share_file::{read_share, symbol_width, write_share, SHARE_MAGIC};

/// One stored symbol: row `row` of parity group `group` (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub group: u32,
    pub row: u32,
    pub value: u64,
}

/// Everything stored on one disk, slots in layout order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskShare {
    pub disk: u32,
    pub slots: Vec<Slot>,
}

/// Shares of all `n` disks, `shares[i].disk == i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareSet {
    pub shares: Vec<DiskShare>,
}

impl ShareSet {
    pub fn disk(&self, id: u32) -> Option<&DiskShare> {
        self.shares.get(id.checked_sub(1)? as usize)
    }

    /// Shares of every disk except those listed.
    pub fn without(&self, erased: &[u32]) -> Vec<DiskShare> {
        self.shares
            .iter()
            .filter(|s| !erased.contains(&s.disk))
            .cloned()
            .collect()
    }
}

/// Long-layer parities `S·d`.
pub fn long_parities(spec: &CodeSpec, msg: &[u64]) -> Result<Vec<u64>> {
    let f = &spec.field;
    match &spec.long_parity {
        LongParity::Phi(phi) => {
            let w = spec.params.width();
            let v = msg
                .iter()
                .enumerate()
                .fold(0, |acc, (p, &d)| f.add(acc, f.mul(phi[p % w], d)));
            Ok(vec![v])
        }
        LongParity::Matrix(s) => s.mul_vec(f, msg),
    }
}

/// The `r` symbols of every parity group, `groups[j][i]`.
pub fn encode_groups(spec: &CodeSpec, msg: &[u64]) -> Result<Vec<Vec<u64>>> {
    let p = &spec.params;
    if msg.len() != p.m {
        return Err(Error::MessageLength {
            expected: p.m,
            got: msg.len(),
        });
    }
    let q = spec.field.modulus();
    if let Some(&bad) = msg.iter().find(|&&v| v >= q) {
        return Err(Error::InvalidParams(format!("message symbol {bad} is not reduced mod {q}")));
    }
    let mut data = msg.to_vec();
    data.extend(long_parities(spec, msg)?);
    let w = p.width();
    data.chunks(w)
        .map(|col| spec.short_gen.mul_vec(&spec.field, col))
        .collect()
}

/// Encodes `msg` (length `M`) into one share per disk.
pub fn encode(spec: &CodeSpec, msg: &[u64]) -> Result<ShareSet> {
    let groups = encode_groups(spec, msg)?;
    let shares = (1..=spec.params.n)
        .map(|disk| DiskShare {
            disk,
            slots: spec
                .layout
                .slots(disk)
                .iter()
                .map(|&(group, row)| Slot {
                    group,
                    row,
                    value: groups[group as usize][row as usize],
                })
                .collect(),
        })
        .collect();
    Ok(ShareSet { shares })
}

/// Checks that a share has the coordinates the layout assigns to its disk and
/// reduced values.
pub(crate) fn check_share(spec: &CodeSpec, share: &DiskShare) -> Result<()> {
    if share.disk == 0 || share.disk > spec.params.n {
        return Err(Error::CorruptShare(format!("disk id {} out of range", share.disk)));
    }
    let expected = spec.layout.slots(share.disk);
    let q = spec.field.modulus();
    if share.slots.len() != expected.len()
        || share
            .slots
            .iter()
            .zip(expected)
            .any(|(s, &(g, r))| (s.group, s.row) != (g, r))
    {
        return Err(Error::CorruptShare(format!(
            "disk {} slots do not match the layout",
            share.disk
        )));
    }
    if let Some(s) = share.slots.iter().find(|s| s.value >= q) {
        return Err(Error::CorruptShare(format!(
            "disk {} holds {} which is not reduced mod {q}",
            share.disk, s.value
        )));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod testing {
    use crate::construction::{build_explicit_steiner_code_with_layout, CodeSpec, Layout};
    use crate::designs::tables;
    use crate::ffield::PrimeField;

    /// The worked `(9, 7, 8)` example with its published placement.
    pub fn golden_spec() -> CodeSpec {
        let design = tables::steiner_2_3_9();
        let layout = Layout::with_placement(&design, tables::steiner_2_3_9_placement()).unwrap();
        build_explicit_steiner_code_with_layout(&design, PrimeField::new(3).unwrap(), layout).unwrap()
    }
}
