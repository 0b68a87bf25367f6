//! Systematic MDS generators for the short (per parity group) and long layers.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::ffield::{FieldMatrix, PrimeField};

/// Systematic `(r, r-t+1)` MDS generator, `r × (r-t+1)`, identity on top.
///
/// For `t = 2` the single parity row is all ones. Otherwise the generator is a
/// Vandermonde matrix on the points `0..r` brought to systematic form.
pub fn short_mds_generator(r: u32, t: u32, field: &PrimeField) -> Result<FieldMatrix> {
    if t == 0 || t > r {
        return Err(Error::InvalidParams(format!(
            "short code needs 1 <= t <= r, got t={t} r={r}"
        )));
    }
    if field.modulus() < r as u64 {
        return Err(Error::FieldTooSmall {
            q: field.modulus(),
            reason: format!("short MDS code of length r = {r} needs q >= r"),
        });
    }
    let (r, w) = (r as usize, (r - t + 1) as usize);
    if t == 2 {
        let mut g = FieldMatrix::zeros(r, w);
        for i in 0..w {
            g.set(i, i, 1);
            g.set(r - 1, i, 1);
        }
        return Ok(g);
    }
    systematic_vandermonde(r, w, field)
}

/// `V · V_top⁻¹` for the `rows × cols` Vandermonde matrix on points `0..rows`.
pub(crate) fn systematic_vandermonde(
    rows: usize,
    cols: usize,
    field: &PrimeField,
) -> Result<FieldMatrix> {
    if (field.modulus() as u128) < rows as u128 {
        return Err(Error::FieldTooSmall {
            q: field.modulus(),
            reason: format!("{rows} distinct evaluation points required"),
        });
    }
    let mut v = FieldMatrix::zeros(rows, cols);
    for i in 0..rows {
        let mut p = 1u64;
        for j in 0..cols {
            v.set(i, j, p);
            p = field.mul(p, i as u64);
        }
    }
    let top: Vec<usize> = (0..cols).collect();
    let inv = v.select_rows(&top).inverse(field)?;
    let mut g = v.mul(field, &inv)?;
    // clean the top block to an exact identity
    for i in 0..cols {
        for j in 0..cols {
            g.set(i, j, u64::from(i == j));
        }
    }
    Ok(g)
}

/// Parity portion (`rows - cols` × `cols`) of a systematic Vandermonde generator.
pub(crate) fn vandermonde_parity(rows: usize, cols: usize, field: &PrimeField) -> Result<FieldMatrix> {
    let g = systematic_vandermonde(rows, cols, field)?;
    let idx: Vec<usize> = (cols..rows).collect();
    Ok(g.select_rows(&idx))
}

/// Every `cols`-row subset of `g` is invertible. Exhaustive.
pub fn is_mds(g: &FieldMatrix, field: &PrimeField) -> bool {
    let w = g.cols();
    (0..g.rows())
        .combinations(w)
        .all(|rows| g.select_rows(&rows).rank(field) == w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_parity_is_all_ones() {
        let gf3 = PrimeField::new(3).unwrap();
        let g = short_mds_generator(3, 2, &gf3).unwrap();
        assert_eq!(g.row(2), &[1, 1]);
        assert_eq!(g.row(0), &[1, 0]);
        let gf5 = PrimeField::new(5).unwrap();
        let g = short_mds_generator(4, 2, &gf5).unwrap();
        assert_eq!(g.row(3), &[1, 1, 1]);
        assert!(is_mds(&g, &gf5));
    }

    #[test]
    fn repetition_when_r_equals_t() {
        let gf = PrimeField::new(7).unwrap();
        let g = short_mds_generator(5, 5, &gf).unwrap();
        assert_eq!(g.cols(), 1);
        assert!(g.entries().iter().all(|&v| v == 1));
    }

    #[test]
    fn vandermonde_generators_are_mds() {
        let gf = PrimeField::new(13).unwrap();
        for r in 3..=12u32 {
            for t in 2..=r {
                let g = short_mds_generator(r, t, &gf).unwrap();
                assert_eq!(g.rows(), r as usize);
                assert_eq!(g.cols(), (r - t + 1) as usize);
                assert!(is_mds(&g, &gf), "r={r} t={t}");
            }
        }
    }

    #[test]
    fn too_small_field() {
        let gf2 = PrimeField::new(2).unwrap();
        assert!(matches!(
            short_mds_generator(3, 2, &gf2),
            Err(Error::FieldTooSmall { .. })
        ));
        let gf7 = PrimeField::new(7).unwrap();
        assert!(short_mds_generator(3, 4, &gf7).is_err());
    }
}
