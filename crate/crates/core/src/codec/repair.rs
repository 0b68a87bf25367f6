use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_share, DiskShare, Slot};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};

/// Symbols one helper sent, verbatim copies of its stored slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub helper: u32,
    pub symbols: Vec<Slot>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairTranscript {
    pub failed: u32,
    /// One entry per contacted helper, ascending disk id.
    pub transfers: Vec<Transfer>,
    pub total_symbols: usize,
}

/// Rebuilds the share of `failed` from the other disks' shares.
///
/// Each lost symbol is erasure-decoded from the `r - t + 1` lowest-indexed
/// surviving rows of its parity group, so every transferred value is a stored
/// symbol copied as is. Helpers that are not needed send nothing.
pub fn repair(spec: &CodeSpec, failed: u32, helpers: &[DiskShare]) -> Result<(DiskShare, RepairTranscript)> {
    let p = &spec.params;
    if failed == 0 || failed > p.n {
        return Err(Error::InvalidParams(format!("disk {failed} does not exist")));
    }
    let mut by_disk: BTreeMap<u32, &DiskShare> = BTreeMap::new();
    for share in helpers.iter().filter(|s| s.disk != failed) {
        check_share(spec, share)?;
        if by_disk.insert(share.disk, share).is_some() {
            return Err(Error::CorruptShare(format!("two shares for disk {}", share.disk)));
        }
    }
    let w = p.width();
    let lost = spec.layout.slots(failed).to_vec();
    let f = &spec.field;

    let per_group: Vec<(Slot, Vec<(u32, Slot)>)> = lost
        .par_iter()
        .map(|&(group, row)| {
            let j = group as usize;
            let disks = spec.group_disks(j);
            let mut chosen: Vec<(u32, Slot)> = Vec::with_capacity(w);
            for (i, &disk) in disks.iter().enumerate() {
                if chosen.len() == w {
                    break;
                }
                if disk == failed {
                    continue;
                }
                if let Some(share) = by_disk.get(&disk) {
                    let slot = *share
                        .slots
                        .iter()
                        .find(|s| s.group == group && s.row == i as u32)
                        .expect("checked against layout");
                    chosen.push((disk, slot));
                }
            }
            if chosen.len() < w {
                return Err(Error::MissingHelper(format!(
                    "group {} has only {} of the {w} symbols needed to rebuild disk {failed}",
                    j + 1,
                    chosen.len()
                )));
            }
            let rows: Vec<usize> = chosen.iter().map(|(_, s)| s.row as usize).collect();
            let sub = spec.short_gen.select_rows(&rows);
            let rhs = crate::ffield::FieldMatrix::from_entries(
                w,
                1,
                chosen.iter().map(|(_, s)| s.value).collect(),
            )?;
            let col = sub.solve(f, &rhs)?;
            let value = f.dot(spec.short_gen.row(row as usize), &col.column(0));
            Ok((Slot { group, row, value }, chosen))
        })
        .collect::<Result<_>>()?;

    let mut sent: BTreeMap<u32, Vec<Slot>> = BTreeMap::new();
    let mut slots = Vec::with_capacity(per_group.len());
    for (slot, chosen) in per_group {
        slots.push(slot);
        for (disk, s) in chosen {
            sent.entry(disk).or_default().push(s);
        }
    }
    let transfers: Vec<Transfer> = sent
        .into_iter()
        .map(|(helper, symbols)| Transfer { helper, symbols })
        .collect();
    let total_symbols = transfers.iter().map(|t| t.symbols.len()).sum();
    Ok((
        DiskShare { disk: failed, slots },
        RepairTranscript {
            failed,
            transfers,
            total_symbols,
        },
    ))
}
