//! Prime-field arithmetic and dense linear algebra over `F(q)`.
//!
//! Every construction in this crate only needs "a large enough prime", so there
//! is no extension-field machinery. Residues are plain `u64` values in `[0, q)`
//! and products are reduced through 128-bit intermediates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps `a * b` inside a `u128`.
pub const MAX_MODULUS: u64 = 1 << 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    q: u64,
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(q: u64) -> Result<Self> {
        PrimeField::new(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.q
    }
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.q
    }

    /// Maps a signed integer into `[0, q)`.
    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.q <= u32::MAX as u64 {
            (a * b) % self.q
        } else {
            ((a as u128 * b as u128) % self.q as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.q) {
            return Err(Error::DivisionByZero(self.q));
        }
        // extended Euclid on signed 128-bit values
        let (mut r0, mut r1) = (self.q as i128, (a % self.q) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (s0, s1) = (s1, s0 - quot * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(s0.rem_euclid(self.q as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Dot product of two equal-length residue slices.
    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        if self.q <= u32::MAX as u64 {
            // accumulate a bounded number of products before reducing
            let mut acc: u128 = 0;
            for (&x, &y) in a.iter().zip(b) {
                acc += (x * y) as u128;
            }
            (acc % self.q as u128) as u64
        } else {
            a.iter()
                .zip(b)
                .fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
        }
    }
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        r
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `bound`.
pub fn next_prime_above(bound: u128) -> Result<u64> {
    let mut c = bound + 1;
    while c <= MAX_MODULUS as u128 {
        if is_prime(c as u64) {
            return Ok(c as u64);
        }
        c += 1;
    }
    Err(Error::ModulusTooLarge(c.min(u64::MAX as u128) as u64))
}

/// Dense row-major matrix of residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(FieldMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from rows, reducing every entry modulo `q`.
    pub fn from_rows(field: &PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            entries.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.entries[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            entries.extend_from_slice(self.row(r));
        }
        FieldMatrix {
            rows: idx.len(),
            cols: self.cols,
            entries,
        }
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(|&v| v == 0)
    }

    pub fn mul(&self, field: &PrimeField, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = FieldMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let lhs_row = self.row(i);
            let out_row = &mut out.entries[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in lhs_row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o = field.add(*o, field.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, field: &PrimeField, v: &[u64]) -> Result<Vec<u64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|r| field.dot(self.row(r), v)).collect())
    }

    /// Rank over `F(q)` by Gaussian elimination with first-nonzero pivoting.
    pub fn rank(&self, field: &PrimeField) -> usize {
        let mut work = self.clone();
        work.row_reduce(field, self.cols).len()
    }

    /// Indices of a maximal set of linearly independent rows, earliest first.
    pub fn independent_rows(&self, field: &PrimeField) -> Vec<usize> {
        let mut work = self.transpose();
        work.row_reduce(field, work.cols)
    }

    /// Reduces the leading `pivot_cols` columns to reduced row echelon form in
    /// place; returns pivot columns in row order.
    fn row_reduce(&mut self, field: &PrimeField, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..pivot_cols {
            if prow == self.rows {
                break;
            }
            let Some(sel) = (prow..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if sel != prow {
                for c in 0..self.cols {
                    self.entries.swap(sel * self.cols + c, prow * self.cols + c);
                }
            }
            let inv = field.inv(self.get(prow, col)).expect("pivot is nonzero");
            for v in self.row_mut(prow)[col..].iter_mut() {
                *v = field.mul(*v, inv);
            }
            let pivot_row: Vec<u64> = self.row(prow)[col..].to_vec();
            for r in 0..self.rows {
                if r == prow {
                    continue;
                }
                let f = self.get(r, col);
                if f == 0 {
                    continue;
                }
                let row = &mut self.row_mut(r)[col..];
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    if p != 0 {
                        *x = field.sub(*x, field.mul(f, p));
                    }
                }
            }
            pivots.push(col);
            prow += 1;
        }
        pivots
    }

    /// Solves `self * x = b`. Free variables are set to zero.
    pub fn solve(&self, field: &PrimeField, b: &FieldMatrix) -> Result<FieldMatrix> {
        if self.rows != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "coefficient matrix has {} rows, right-hand side {}",
                self.rows, b.rows
            )));
        }
        let n = self.cols;
        let width = n + b.cols;
        let mut aug = FieldMatrix::zeros(self.rows, width);
        for r in 0..self.rows {
            aug.row_mut(r)[..n].copy_from_slice(self.row(r));
            aug.row_mut(r)[n..].copy_from_slice(b.row(r));
        }
        let pivots = aug.row_reduce(field, n);
        for r in pivots.len()..self.rows {
            if aug.row(r)[n..].iter().any(|&v| v != 0) {
                return Err(Error::Inconsistent);
            }
        }
        let mut x = FieldMatrix::zeros(n, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            x.row_mut(pc).copy_from_slice(&aug.row(r)[n..]);
        }
        Ok(x)
    }

    /// Basis of the right null space, one basis vector per column.
    pub fn nullspace(&self, field: &PrimeField) -> FieldMatrix {
        let mut work = self.clone();
        let pivots = work.row_reduce(field, self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = FieldMatrix::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, field.neg(work.get(r, fc)));
            }
        }
        basis
    }

    /// Inverse of a square matrix, or `RankDeficient` when singular.
    pub fn inverse(&self, field: &PrimeField) -> Result<FieldMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let rank = self.rank(field);
        if rank < self.rows {
            return Err(Error::RankDeficient {
                rank,
                m: self.rows,
            });
        }
        self.solve(field, &FieldMatrix::identity(self.rows))
    }
}
