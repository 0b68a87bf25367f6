//! Binary share files.
//!
//! Layout: `RGC1`, the 32-byte spec hash, the disk id as `u32` LE, then one
//! record per slot until end of file: group `u32` LE, row `u8`, value width
//! `u8`, value as `width` little-endian bytes.

use super::{check_share, DiskShare, Slot};
use crate::construction::CodeSpec;
use crate::error::{Error, Result};

pub const SHARE_MAGIC: &[u8; 4] = b"RGC1";
const HEADER_LEN: usize = 4 + 32 + 4;

/// Bytes needed for any residue mod `q`.
pub fn symbol_width(q: u64) -> usize {
    let bits = 64 - (q - 1).leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

pub fn write_share(spec: &CodeSpec, share: &DiskShare) -> Result<Vec<u8>> {
    check_share(spec, share)?;
    let width = symbol_width(spec.field.modulus());
    let mut out = Vec::with_capacity(HEADER_LEN + share.slots.len() * (6 + width));
    out.extend_from_slice(SHARE_MAGIC);
    out.extend_from_slice(&spec.hash());
    out.extend_from_slice(&share.disk.to_le_bytes());
    for s in &share.slots {
        let row = u8::try_from(s.row)
            .map_err(|_| Error::Format(format!("row {} does not fit the share format", s.row)))?;
        out.extend_from_slice(&s.group.to_le_bytes());
        out.push(row);
        out.push(width as u8);
        out.extend_from_slice(&s.value.to_le_bytes()[..width]);
    }
    Ok(out)
}

pub fn read_share(spec: &CodeSpec, bytes: &[u8]) -> Result<DiskShare> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != SHARE_MAGIC {
        return Err(Error::Format("not a share file".into()));
    }
    if bytes[4..36] != spec.hash() {
        return Err(Error::Format("share was written for a different code spec".into()));
    }
    let disk = u32::from_le_bytes(bytes[36..40].try_into().expect("4 bytes"));
    let width = symbol_width(spec.field.modulus());
    let mut slots = Vec::new();
    let mut rest = &bytes[HEADER_LEN..];
    while !rest.is_empty() {
        if rest.len() < 6 {
            return Err(Error::Format("truncated share record".into()));
        }
        let group = u32::from_le_bytes(rest[..4].try_into().expect("4 bytes"));
        let row = rest[4] as u32;
        let w = rest[5] as usize;
        if w != width {
            return Err(Error::Format(format!("symbol width {w}, expected {width}")));
        }
        if rest.len() < 6 + w {
            return Err(Error::Format("truncated share record".into()));
        }
        let mut buf = [0u8; 8];
        buf[..w].copy_from_slice(&rest[6..6 + w]);
        slots.push(Slot {
            group,
            row,
            value: u64::from_le_bytes(buf),
        });
        rest = &rest[6 + w..];
    }
    let share = DiskShare { disk, slots };
    check_share(spec, &share)?;
    Ok(share)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode;
    use crate::codec::testing::golden_spec;
    use crate::construction::LongParity;

    #[test]
    fn widths() {
        assert_eq!(symbol_width(2), 1);
        assert_eq!(symbol_width(3), 1);
        assert_eq!(symbol_width(257), 2);
        assert_eq!(symbol_width(40577), 2);
        assert_eq!(symbol_width(65537), 3);
        assert_eq!(symbol_width((1 << 61) - 1), 8);
    }

    #[test]
    fn round_trip_and_layout() {
        let spec = golden_spec();
        let shares = encode(&spec, &(0..23).map(|i| i % 3).collect::<Vec<_>>()).unwrap();
        let bytes = write_share(&spec, shares.disk(4).unwrap()).unwrap();
        assert_eq!(&bytes[..4], b"RGC1");
        assert_eq!(bytes.len(), 40 + 4 * 7);
        assert_eq!(&bytes[36..40], &4u32.to_le_bytes());
        assert_eq!(&read_share(&spec, &bytes).unwrap(), shares.disk(4).unwrap());
    }

    #[test]
    fn rejects_other_spec_and_damage() {
        let spec = golden_spec();
        let shares = encode(&spec, &[2; 23]).unwrap();
        let bytes = write_share(&spec, shares.disk(1).unwrap()).unwrap();
        let mut other = spec.clone();
        other.long_parity = LongParity::Phi(vec![2, 1]);
        assert!(read_share(&other, &bytes).is_err());
        assert!(read_share(&spec, &bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(read_share(&spec, &bad).is_err());
        let mut bad = bytes;
        *bad.last_mut().unwrap() = 7;
        assert!(matches!(read_share(&spec, &bad), Err(Error::CorruptShare(_))));
    }
}
