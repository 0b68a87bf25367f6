use serde::{Deserialize, Serialize};

use crate::designs::BlockDesign;
use crate::error::{Error, Result};

/// Where each symbol of each parity group lives.
///
/// `placement[j][i]` is the disk (1-based) holding row `i` of parity group `j`.
/// A disk's slots are ordered by `(group, row)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct Layout {
    placement: Vec<Vec<u32>>,
    disk_slots: Vec<Vec<(u32, u32)>>,
}

impl Layout {
    /// Row `i` of group `j` goes to the `i`-th smallest disk of block `B_j`.
    pub fn ascending(design: &BlockDesign) -> Layout {
        Self::from_placement(design.blocks.clone()).expect("design blocks form a layout")
    }

    /// Uses an explicit per-group permutation, e.g. to reproduce a published table.
    pub fn with_placement(design: &BlockDesign, placement: Vec<Vec<u32>>) -> Result<Layout> {
        if placement.len() != design.blocks.len() {
            return Err(Error::InvalidParams(format!(
                "layout has {} groups, design has {} blocks",
                placement.len(),
                design.blocks.len()
            )));
        }
        for (j, (p, b)) in placement.iter().zip(&design.blocks).enumerate() {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if &sorted != b {
                return Err(Error::InvalidParams(format!(
                    "group {} is placed on {:?}, block is {:?}",
                    j + 1,
                    p,
                    b
                )));
            }
        }
        Self::from_placement(placement)
    }

    fn from_placement(placement: Vec<Vec<u32>>) -> Result<Layout> {
        let n = placement.iter().flatten().copied().max().unwrap_or(0) as usize;
        let mut disk_slots = vec![Vec::new(); n];
        for (j, disks) in placement.iter().enumerate() {
            for (i, &disk) in disks.iter().enumerate() {
                if disk == 0 {
                    return Err(Error::InvalidParams("disk ids are 1-based".into()));
                }
                disk_slots[disk as usize - 1].push((j as u32, i as u32));
            }
        }
        Ok(Layout {
            placement,
            disk_slots,
        })
    }

    pub fn placement(&self) -> &[Vec<u32>] {
        &self.placement
    }

    pub fn num_groups(&self) -> usize {
        self.placement.len()
    }

    pub fn disk_of(&self, group: usize, row: usize) -> u32 {
        self.placement[group][row]
    }

    /// Row of `group` stored on `disk`, if any.
    pub fn row_on_disk(&self, group: usize, disk: u32) -> Option<usize> {
        self.placement[group].iter().position(|&d| d == disk)
    }

    /// `(group, row)` pairs held by `disk`, 0-based, in slot order.
    pub fn slots(&self, disk: u32) -> &[(u32, u32)] {
        self.disk_slots
            .get(disk as usize - 1)
            .map_or(&[], Vec::as_slice)
    }

    pub fn disk_load(&self, disk: u32) -> usize {
        self.slots(disk).len()
    }

    pub fn num_disks(&self) -> usize {
        self.disk_slots.len()
    }
}

impl TryFrom<Vec<Vec<u32>>> for Layout {
    type Error = Error;

    fn try_from(v: Vec<Vec<u32>>) -> Result<Self> {
        Layout::from_placement(v)
    }
}

impl From<Layout> for Vec<Vec<u32>> {
    fn from(l: Layout) -> Self {
        l.placement
    }
}
