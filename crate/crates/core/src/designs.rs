//! Combinatorial block designs `S_λ(t, r, n)` used to place parity groups on disks.
//!
//! A design is stored with every block sorted ascending. Generated designs also
//! have their block list sorted lexicographically; designs loaded from JSON keep
//! the caller's block order because parity group `j` is tied to block `j`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::combin::{binom, colex_rank};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDesign {
    pub n: u32,
    pub t: u32,
    pub r: u32,
    pub lambda: u64,
    pub blocks: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignReport {
    pub valid: bool,
    /// First violated axiom, if any.
    pub violation: Option<String>,
}

impl BlockDesign {
    /// Wraps raw blocks, sorting the elements of each block. Block order is kept.
    pub fn new(n: u32, t: u32, r: u32, lambda: u64, blocks: Vec<Vec<u32>>) -> Self {
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        BlockDesign {
            n,
            t,
            r,
            lambda,
            blocks,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: BlockDesign = serde_json::from_str(s)?;
        Ok(BlockDesign::new(raw.n, raw.t, raw.r, raw.lambda, raw.blocks))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("design serializes")
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `N_λ(t, r, n) = λ C(n,t) / C(r,t)`, or `None` if not integral.
    pub fn expected_block_count(&self) -> Option<u128> {
        let num = (self.lambda as u128).checked_mul(binom(self.n as u64, self.t as u64))?;
        let den = binom(self.r as u64, self.t as u64);
        (den != 0 && num % den == 0).then(|| num / den)
    }

    /// Blocks that contain element `e`.
    pub fn blocks_containing(&self, e: u32) -> impl Iterator<Item = (usize, &Vec<u32>)> {
        self.blocks
            .iter()
            .enumerate()
            .filter(move |(_, b)| b.binary_search(&e).is_ok())
    }

    /// Replication number `λ C(n-1,t-1) / C(r-1,t-1)`.
    pub fn replication(&self) -> Result<u64> {
        let num = self.lambda as u128 * binom(self.n as u64 - 1, self.t as u64 - 1);
        let den = binom(self.r as u64 - 1, self.t as u64 - 1);
        if den == 0 || !num.is_multiple_of(den) {
            return Err(Error::InvalidDesign(format!(
                "replication λC(n-1,t-1)/C(r-1,t-1) = {num}/{den} is not an integer"
            )));
        }
        Ok((num / den) as u64)
    }

    /// Checks block shape and t-subset coverage by exhaustive enumeration.
    pub fn verify(&self) -> DesignReport {
        match self.first_violation() {
            None => DesignReport {
                valid: true,
                violation: None,
            },
            Some(v) => DesignReport {
                valid: false,
                violation: Some(v),
            },
        }
    }

    fn first_violation(&self) -> Option<String> {
        let (n, t, r) = (self.n, self.t, self.r);
        if t == 0 || t > r || r > n {
            return Some(format!("parameters must satisfy 1 <= t <= r <= n, got t={t} r={r} n={n}"));
        }
        for (j, b) in self.blocks.iter().enumerate() {
            if b.len() != r as usize {
                return Some(format!("block {} has {} elements, expected {r}", j + 1, b.len()));
            }
            if b.iter().any(|&e| e == 0 || e > n) {
                return Some(format!("block {} has an element outside 1..{n}", j + 1));
            }
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return Some(format!("block {} is not a sorted set of distinct elements", j + 1));
            }
        }
        match self.expected_block_count() {
            Some(c) if c == self.blocks.len() as u128 => {}
            Some(c) => {
                return Some(format!(
                    "design has {} blocks, N_λ(t,r,n) = {c}",
                    self.blocks.len()
                ))
            }
            None => return Some("λC(n,t)/C(r,t) is not an integer".into()),
        }
        let total = binom(n as u64, t as u64);
        if total > 50_000_000 {
            return Some(format!("C({n},{t}) = {total} t-subsets is too many to enumerate"));
        }
        let mut counts = vec![0u64; total as usize];
        for b in &self.blocks {
            for sub in b.iter().map(|e| e - 1).combinations(t as usize) {
                counts[colex_rank(&sub)] += 1;
            }
        }
        // walk the t-subsets in the same colex order to report the first miss
        (0..n)
            .combinations(t as usize)
            .map(|sub| {
                let mut s = sub;
                s.sort_unstable();
                s
            })
            .find(|s| counts[colex_rank(s)] != self.lambda)
            .map(|s| {
                let ones: Vec<u32> = s.iter().map(|e| e + 1).collect();
                format!(
                    "t-subset {:?} lies in {} blocks, expected λ = {}",
                    ones,
                    counts[colex_rank(&s)],
                    self.lambda
                )
            })
    }

    /// Number of blocks containing `s`, checked against the closed form
    /// `λ C(n-|s|, t-|s|) / C(r-|s|, t-|s|)`.
    pub fn count_blocks_containing(&self, s: &[u32]) -> Result<u64> {
        let k = s.len() as u32;
        if k > self.t {
            return Err(Error::InvalidDesign(format!(
                "subset size {k} exceeds strength t = {}",
                self.t
            )));
        }
        let enumerated = self
            .blocks
            .iter()
            .filter(|b| s.iter().all(|e| b.binary_search(e).is_ok()))
            .count() as u64;
        let num = self.lambda as u128 * binom((self.n - k) as u64, (self.t - k) as u64);
        let den = binom((self.r - k) as u64, (self.t - k) as u64);
        if den == 0 || !num.is_multiple_of(den) || (num / den) as u64 != enumerated {
            return Err(Error::DesignViolation(format!(
                "{enumerated} blocks contain {s:?}, closed form gives {num}/{den}"
            )));
        }
        Ok(enumerated)
    }
}

/// Steiner triple system `S(2,3,n)`: Bose for `n ≡ 3 (mod 6)`, Skolem for `n ≡ 1 (mod 6)`.
pub fn gen_steiner_triple(n: u32) -> Result<BlockDesign> {
    if n < 7 || !(n % 6 == 1 || n % 6 == 3) {
        return Err(Error::InvalidDesign(format!(
            "S(2,3,n) requires n ≡ 1 or 3 (mod 6) and n >= 7, got n = {n} (n mod 6 = {})",
            n % 6
        )));
    }
    let mut blocks = if n % 6 == 3 { bose(n) } else { skolem(n) };
    for b in blocks.iter_mut() {
        b.sort_unstable();
    }
    blocks.sort();
    Ok(BlockDesign::new(n, 2, 3, 1, blocks))
}

fn bose(n: u32) -> Vec<Vec<u32>> {
    let m = n / 3;
    let half = m.div_ceil(2);
    // idempotent commutative quasigroup: x∘y = (x+y)/2 in Z_m
    let op = |x: u32, y: u32| ((x + y) * half) % m;
    let label = |x: u32, i: u32| i * m + x + 1;
    let mut blocks = Vec::new();
    for x in 0..m {
        blocks.push(vec![label(x, 0), label(x, 1), label(x, 2)]);
    }
    for i in 0..3 {
        for x in 0..m {
            for y in x + 1..m {
                blocks.push(vec![label(x, i), label(y, i), label(op(x, y), (i + 1) % 3)]);
            }
        }
    }
    blocks
}

fn skolem(n: u32) -> Vec<Vec<u32>> {
    let v = (n - 1) / 6;
    let m = 2 * v;
    // half-idempotent commutative quasigroup of order 2v from Z_{2v} addition
    let op = |x: u32, y: u32| {
        let s = (x + y) % m;
        if s.is_multiple_of(2) {
            s / 2
        } else {
            v + (s - 1) / 2
        }
    };
    let label = |x: u32, i: u32| i * m + x + 1;
    let infinity = n;
    let mut blocks = Vec::new();
    for x in 0..v {
        blocks.push(vec![label(x, 0), label(x, 1), label(x, 2)]);
    }
    for i in 0..3 {
        for x in 0..v {
            blocks.push(vec![infinity, label(x + v, i), label(x, (i + 1) % 3)]);
        }
        for x in 0..m {
            for y in x + 1..m {
                blocks.push(vec![label(x, i), label(y, i), label(op(x, y), (i + 1) % 3)]);
            }
        }
    }
    blocks
}

/// All `C(n, r)` r-subsets, with `λ = C(n-t, r-t)`.
pub fn gen_complete_design(t: u32, r: u32, n: u32) -> Result<BlockDesign> {
    if t == 0 || t > r || r > n {
        return Err(Error::InvalidDesign(format!(
            "complete design requires 1 <= t <= r <= n, got t={t} r={r} n={n}"
        )));
    }
    let count = binom(n as u64, r as u64);
    if count > 5_000_000 {
        return Err(Error::InvalidDesign(format!(
            "complete design would have C({n},{r}) = {count} blocks"
        )));
    }
    let blocks: Vec<Vec<u32>> = (1..=n).combinations(r as usize).collect();
    let lambda = binom((n - t) as u64, (r - t) as u64) as u64;
    Ok(BlockDesign::new(n, t, r, lambda, blocks))
}

/// The three Steiner systems listed as worked examples, with their published block order.
pub mod tables {
    use super::BlockDesign;

    pub fn steiner_2_3_7() -> BlockDesign {
        BlockDesign::new(
            7,
            2,
            3,
            1,
            vec![
                vec![1, 2, 3],
                vec![1, 4, 5],
                vec![1, 6, 7],
                vec![2, 4, 6],
                vec![2, 5, 7],
                vec![3, 4, 7],
                vec![3, 5, 6],
            ],
        )
    }

    pub fn steiner_2_3_9() -> BlockDesign {
        BlockDesign::new(
            9,
            2,
            3,
            1,
            vec![
                vec![2, 3, 4],
                vec![5, 6, 7],
                vec![1, 8, 9],
                vec![1, 4, 7],
                vec![1, 3, 5],
                vec![4, 6, 8],
                vec![2, 7, 9],
                vec![2, 5, 8],
                vec![1, 2, 6],
                vec![4, 5, 9],
                vec![3, 7, 8],
                vec![3, 6, 9],
            ],
        )
    }

    /// Published symbol placement for `steiner_2_3_9`: disks holding `(X_j, Y_j, P_j)`.
    /// Groups 3 and 7 are not in ascending disk order.
    pub fn steiner_2_3_9_placement() -> Vec<Vec<u32>> {
        vec![
            vec![2, 3, 4],
            vec![5, 6, 7],
            vec![8, 9, 1],
            vec![1, 4, 7],
            vec![1, 3, 5],
            vec![4, 6, 8],
            vec![2, 9, 7],
            vec![2, 5, 8],
            vec![1, 2, 6],
            vec![4, 5, 9],
            vec![3, 7, 8],
            vec![3, 6, 9],
        ]
    }

    pub fn steiner_2_4_13() -> BlockDesign {
        let blocks = (0..13u32)
            .map(|i| [0u32, 1, 3, 9].iter().map(|d| (i + d) % 13 + 1).collect())
            .collect();
        BlockDesign::new(13, 2, 4, 1, blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degree_sequence(d: &BlockDesign) -> Vec<usize> {
        let mut deg: Vec<usize> = (1..=d.n).map(|e| d.blocks_containing(e).count()).collect();
        deg.sort_unstable();
        deg
    }

    #[test]
    fn steiner_triples_match_table_shapes() {
        let s7 = gen_steiner_triple(7).unwrap();
        assert_eq!(s7.num_blocks(), 7);
        assert!(s7.verify().valid);
        assert_eq!(degree_sequence(&s7), degree_sequence(&tables::steiner_2_3_7()));

        let s9 = gen_steiner_triple(9).unwrap();
        assert_eq!(s9.num_blocks(), 12);
        assert!(s9.verify().valid);
        assert_eq!(degree_sequence(&s9), degree_sequence(&tables::steiner_2_3_9()));
    }

    #[test]
    fn steiner_triples_for_admissible_orders() {
        for n in (7..=45).filter(|n| n % 6 == 1 || n % 6 == 3) {
            let d = gen_steiner_triple(n).unwrap();
            assert!(d.verify().valid, "n = {n}: {:?}", d.verify().violation);
            assert_eq!(d.num_blocks() as u32, n * (n - 1) / 6);
        }
    }

    #[test]
    fn inadmissible_steiner_order() {
        let err = gen_steiner_triple(8).unwrap_err();
        assert!(err.to_string().contains("mod 6"));
        assert!(gen_steiner_triple(3).is_err());
    }

    #[test]
    fn table_designs_verify() {
        for d in [
            tables::steiner_2_3_7(),
            tables::steiner_2_3_9(),
            tables::steiner_2_4_13(),
        ] {
            assert!(d.verify().valid, "{:?}", d.verify());
        }
        // block order is preserved for loaded designs
        assert_eq!(tables::steiner_2_3_9().blocks[8], vec![1, 2, 6]);
        assert_eq!(tables::steiner_2_4_13().blocks[4], vec![1, 5, 6, 8]);
    }

    #[test]
    fn mutation_breaks_pair_coverage() {
        let mut d = tables::steiner_2_3_7();
        // (3,5,6) -> (3,5,7)
        d.blocks[6] = vec![3, 5, 7];
        // oracle: count pairs by brute force
        let mut bad = 0;
        for a in 1..=7u32 {
            for b in a + 1..=7 {
                let c = d
                    .blocks
                    .iter()
                    .filter(|blk| blk.contains(&a) && blk.contains(&b))
                    .count();
                if c != 1 {
                    bad += 1;
                }
            }
        }
        assert!(bad > 0);
        let report = d.verify();
        assert!(!report.valid);
        assert!(report.violation.unwrap().contains("t-subset"));
    }

    #[test]
    fn complete_designs() {
        let d = gen_complete_design(2, 3, 9).unwrap();
        assert_eq!(d.lambda, 7);
        assert_eq!(d.num_blocks(), 84);
        assert!(d.verify().valid);

        let pairs = gen_complete_design(2, 2, 6).unwrap();
        assert_eq!(pairs.lambda, 1);
        assert_eq!(pairs.num_blocks(), 15);
        assert!(pairs.verify().valid);

        let one = gen_complete_design(2, 9, 9).unwrap();
        assert_eq!(one.num_blocks(), 1);
        assert!(one.verify().valid);

        assert!(gen_complete_design(3, 2, 9).is_err());
        assert!(gen_complete_design(2, 10, 9).is_err());
    }

    #[test]
    fn block_counts_through_subsets() {
        let s7 = tables::steiner_2_3_7();
        assert_eq!(s7.count_blocks_containing(&[1]).unwrap(), 3);
        let s9 = tables::steiner_2_3_9();
        assert_eq!(s9.count_blocks_containing(&[2, 3]).unwrap(), 1);
        assert_eq!(s9.count_blocks_containing(&[]).unwrap(), 12);
        assert!(s9.count_blocks_containing(&[1, 2, 3]).is_err());
        let c = gen_complete_design(3, 4, 7).unwrap();
        assert_eq!(c.count_blocks_containing(&[]).unwrap(), 35);
    }

    #[test]
    fn replication_matches_degree() {
        for d in [
            tables::steiner_2_3_9(),
            gen_complete_design(2, 3, 8).unwrap(),
            gen_complete_design(3, 4, 7).unwrap(),
            gen_steiner_triple(13).unwrap(),
        ] {
            let rep = d.replication().unwrap();
            for e in 1..=d.n {
                assert_eq!(d.blocks_containing(e).count() as u64, rep);
            }
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let text = r#"{"n":9,"t":2,"r":3,"lambda":1,"blocks":[[2,3,4],[5,6,7],[1,8,9],[1,4,7],[1,3,5],[4,6,8],[2,7,9],[2,5,8],[1,2,6],[4,5,9],[3,7,8],[3,6,9]]}"#;
        let d = BlockDesign::from_json(text).unwrap();
        assert_eq!(d, tables::steiner_2_3_9());
        assert_eq!(d.to_json(), text);
    }

    #[test]
    fn repeated_blocks_are_allowed() {
        let base = tables::steiner_2_3_7();
        let mut blocks = base.blocks.clone();
        blocks.extend(base.blocks.clone());
        let doubled = BlockDesign::new(7, 2, 3, 2, blocks);
        assert!(doubled.verify().valid);
    }
}
