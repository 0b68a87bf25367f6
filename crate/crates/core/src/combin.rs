//! Binomials and subset enumeration shared by designs, construction and analysis.

use num_bigint::BigUint;
use num_traits::One;

/// Exact `C(n, k)` in `u128`, saturating at `u128::MAX`.
pub fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let num = (n - i) as u128;
        let g = gcd(acc, (i + 1) as u128);
        let (a, d) = (acc / g, (i + 1) as u128 / g);
        let num = num / d;
        match a.checked_mul(num) {
            Some(v) => acc = v,
            None => return u128::MAX,
        }
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Bitmask of 1-based elements.
#[inline]
pub fn mask_of(elems: &[u32]) -> u128 {
    elems.iter().fold(0u128, |m, &e| m | (1u128 << (e - 1)))
}

/// Elements (1-based, ascending) of a mask.
pub fn elems_of(mut mask: u128) -> Vec<u32> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let b = mask.trailing_zeros();
        out.push(b + 1);
        mask &= mask - 1;
    }
    out
}

/// All `k`-subsets of `{1..n}` as bitmasks, in colex order (Gosper's hack).
pub fn subset_masks(n: u32, k: u32) -> Vec<u128> {
    assert!(n <= 127, "bitmask subsets support n <= 127");
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::with_capacity(binom(n as u64, k as u64).min(1 << 24) as usize);
    let limit: u128 = 1u128 << n;
    let mut x: u128 = (1u128 << k) - 1;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// Colex rank of a sorted subset of 0-based elements.
pub fn colex_rank(sorted: &[u32]) -> usize {
    sorted
        .iter()
        .enumerate()
        .map(|(i, &e)| binom(e as u64, i as u64 + 1) as usize)
        .sum()
}
