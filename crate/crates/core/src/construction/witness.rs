//! Constructive witness that `det(Q'_A·G)` is not identically zero in `S`.
//!
//! For one erasure set `A` this builds `Q*_A` (the first `T - T(A)` nonzero rows
//! of `Q_A` zeroed), splits it at row `a·r + b` / column `M` where
//! `M = a·w + b`, chooses an auxiliary `H` that completes `Q11` to rank `M`,
//! and then solves `H = Q21 + Q22·S` one parity group at a time.

use super::rank::ErasureView;
use super::CodeSpec;
use crate::error::{Error, Result};
use crate::ffield::FieldMatrix;

/// Returns an `S` (`T × M`) with `rank(Q_A·G) = M` for this particular `A`.
pub fn rank_witness(spec: &CodeSpec, erased: &[u32]) -> Result<FieldMatrix> {
    let p = &spec.params;
    let f = &spec.field;
    let g = &spec.short_gen;
    let (r, w, m, t_rows) = (p.r as usize, p.width(), p.m, p.parity_count);
    if erased.len() != (p.n - p.k) as usize {
        return Err(Error::InvalidParams(format!(
            "erasure set must have n - k = {} disks, got {}",
            p.n - p.k,
            erased.len()
        )));
    }
    let view = ErasureView::new(p, &spec.layout, erased);
    let deficit = view.deficit(w);
    if deficit > t_rows {
        return Err(Error::Witness(format!("T(A) = {deficit} exceeds T = {t_rows}")));
    }

    // Q*: zero the first T - T(A) nonzero rows
    let mut to_zero = t_rows - deficit;
    let kept: Vec<Vec<usize>> = view
        .groups
        .iter()
        .map(|grp| {
            grp.kept
                .iter()
                .copied()
                .filter(|_| {
                    if to_zero > 0 {
                        to_zero -= 1;
                        false
                    } else {
                        true
                    }
                })
                .collect()
        })
        .collect();

    let (a, b) = (m / w, m % w);
    let placed_row = |j: usize, tmpl: &[u64]| {
        let mut v = vec![0u64; m];
        for (c, &x) in tmpl.iter().enumerate() {
            let pos = j * w + c;
            if pos < m {
                v[pos] = x;
            } else {
                debug_assert_eq!(x, 0);
            }
        }
        v
    };

    // rows of H completing each block of Q11 to full rank
    let mut h_rows: Vec<Vec<u64>> = Vec::new();
    for j in 0..a {
        let zero_rows: Vec<usize> = (0..r).filter(|i| !kept[j].contains(i)).collect();
        // e_j - (t - 1) of them
        let need = zero_rows.len() - (r - w);
        for &l in zero_rows.iter().take(need) {
            h_rows.push(placed_row(j, g.row(l)));
        }
    }
    let mut partial_h: Vec<Vec<u64>> = Vec::new();
    if b > 0 && a < p.n_blocks {
        for l in (0..b).filter(|i| !kept[a].contains(i)) {
            let mut v = vec![0u64; m];
            v[a * w + l] = 1;
            partial_h.push(v);
        }
    }

    // nonzero rows of [Q21 Q22], in order
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for j in a..p.n_blocks {
        let first = if j == a { b } else { 0 };
        slots.extend(kept[j].iter().filter(|&&i| i >= first).map(|&i| (j, i)));
    }

    // data-column part of a Q* row (nonzero only for the split group)
    let q21_row = |j: usize, i: usize| {
        let mut v = vec![0u64; m];
        if j == a {
            for c in 0..b {
                v[a * w + c] = g.get(i, c);
            }
        }
        v
    };

    // split group with more surviving rows than parity columns
    let mut designated: Option<(usize, Vec<u64>)> = None;
    if a < p.n_blocks && b > 0 {
        let bottom: Vec<usize> = kept[a].iter().copied().filter(|&i| i >= b).collect();
        let par_cols = w - b;
        if bottom.len() > par_cols {
            if bottom.len() - par_cols > 1 {
                return Err(Error::Witness(format!(
                    "group {} has {} surplus rows over its parity columns; only one is handled",
                    a + 1,
                    bottom.len() - par_cols
                )));
            }
            let mut sub = FieldMatrix::zeros(bottom.len(), par_cols);
            for (ri, &i) in bottom.iter().enumerate() {
                for c in 0..par_cols {
                    sub.set(ri, c, g.get(i, b + c));
                }
            }
            let y_basis = sub.transpose().nullspace(f);
            if y_basis.cols() != 1 {
                return Err(Error::Witness("left kernel of the split block is not one-dimensional".into()));
            }
            let y = y_basis.column(0);
            let last = bottom.len() - 1;
            if y[last] == 0 {
                return Err(Error::Witness("split block correction row has zero weight".into()));
            }
            if partial_h.pop().is_none() {
                return Err(Error::Witness("split block has no zero row to trade".into()));
            }
            designated = Some((bottom[last], y));
        }
    }
    h_rows.extend(partial_h);

    let expected = slots.len() - usize::from(designated.is_some());
    if h_rows.len() != expected {
        return Err(Error::Witness(format!(
            "{} auxiliary rows for {} free rows of [Q21 Q22]",
            h_rows.len(),
            expected
        )));
    }

    // fill H slot by slot
    let mut h_iter = h_rows.into_iter();
    let mut h_of_slot: Vec<Vec<u64>> = slots
        .iter()
        .map(|&(j, i)| match &designated {
            Some((des, _)) if j == a && i == *des => vec![0u64; m],
            _ => h_iter.next().expect("counted"),
        })
        .collect();
    if let Some((des, y)) = &designated {
        let bottom: Vec<usize> = kept[a].iter().copied().filter(|&i| i >= b).collect();
        let inv_last = f.inv(y[y.len() - 1])?;
        let mut acc = vec![0u64; m];
        for (yi, &i) in y.iter().zip(&bottom) {
            if i == *des {
                continue;
            }
            let si = slots.iter().position(|&s| s == (a, i)).expect("slot");
            let wrow = q21_row(a, i);
            for c in 0..m {
                let diff = f.sub(wrow[c], h_of_slot[si][c]);
                acc[c] = f.add(acc[c], f.mul(*yi, diff));
            }
        }
        let wdes = q21_row(a, *des);
        let si = slots.iter().position(|&s| s == (a, *des)).expect("slot");
        h_of_slot[si] = (0..m).map(|c| f.add(wdes[c], f.mul(inv_last, acc[c]))).collect();
    }

    // solve Q22_j · S_j = H_j - Q21_j group by group
    let mut s = FieldMatrix::zeros(t_rows, m);
    for j in a..p.n_blocks {
        let first_col = if j == a { b } else { 0 };
        let par_cols = w - first_col;
        if par_cols == 0 {
            continue;
        }
        let rows: Vec<usize> = (0..slots.len()).filter(|&k| slots[k].0 == j).collect();
        let mut coef = FieldMatrix::zeros(rows.len(), par_cols);
        let mut rhs = FieldMatrix::zeros(rows.len(), m);
        for (ri, &k) in rows.iter().enumerate() {
            let i = slots[k].1;
            for c in 0..par_cols {
                coef.set(ri, c, g.get(i, first_col + c));
            }
            let wrow = q21_row(j, i);
            for c in 0..m {
                rhs.set(ri, c, f.sub(h_of_slot[k][c], wrow[c]));
            }
        }
        let block = coef.solve(f, &rhs).map_err(|e| match e {
            Error::Inconsistent => Error::Witness(format!(
                "H is outside the column span of R_{} restricted to its parity columns",
                j + 1
            )),
            other => other,
        })?;
        for c in 0..par_cols {
            let tau = j * w + first_col + c - m;
            s.row_mut(tau).copy_from_slice(block.row(c));
        }
    }

    let qa = super::rank::qa_from_view(p, g, &view);
    let rank = super::rank::qa_times_g(f, m, &qa, &s).rank(f);
    if rank != m {
        return Err(Error::Witness(format!("constructed S gives rank {rank} < M = {m}")));
    }
    Ok(s)
}
