use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::bounds::{cutset_max_m, msr_mbr_points, t_c, timesharing_m};
use super::{fmt_ratio, int, Provenance, TradeoffPoint};
use crate::combin::binom_big;
use crate::construction::{derive_params_with_cap, ta_profile, CodeParams, DEFAULT_SUBSET_CAP};
use crate::designs::BlockDesign;
use crate::error::{Error, Result};

/// `(α·d/γ, M·d/γ)` for a built code; with `t = 2` this is `(α/β, M/β)`.
pub fn realized_point(params: &CodeParams) -> (BigRational, BigRational) {
    let scale = BigRational::new(BigInt::from(params.d), BigInt::from(params.gamma));
    (
        int(params.alpha) * &scale,
        int(params.m as u64) * scale,
    )
}

/// Operating point of the code on the complete design with block size `r`:
/// `ᾱ = d/(r-n+d)`, `M̄ = nd/r - d·T_c/((r+d-n)·C(n-1, r-1))`.
pub fn complete_tradeoff_point(n: u32, k: u32, d: u32, r: u32) -> Result<TradeoffPoint> {
    if k == 0 || k > d || d >= n {
        return Err(Error::Analysis(format!(
            "need 1 <= k <= d <= n - 1, got (n, k, d) = ({n}, {k}, {d})"
        )));
    }
    if r + d < n + 1 || r > n {
        return Err(Error::Analysis(format!(
            "block size r = {r} must lie in [n - d + 1, n] = [{}, {n}]",
            n - d + 1
        )));
    }
    let t = n - d + 1;
    let (nn, dd, rr) = (BigInt::from(n), BigInt::from(d), BigInt::from(r));
    let excess = BigInt::from(r + d - n);
    let alpha_bar = BigRational::new(dd.clone(), excess.clone());
    let lead = BigRational::new(&nn * &dd, rr);
    let corr = BigRational::new(
        &dd * t_c(n, k, r, t),
        excess * BigInt::from(binom_big((n - 1) as u64, (r - 1) as u64)),
    );
    Ok(TradeoffPoint::new(alpha_bar, lead - corr, Provenance::Constructed))
}

/// `r > n - d + d/(d-k+1)`: storage already exceeds the MSR level, so the
/// point is valid but not useful for efficiency.
pub fn beyond_msr_range(n: u32, k: u32, d: u32, r: u32) -> bool {
    let limit = int(n - d) + BigRational::new(BigInt::from(d), BigInt::from(d - k + 1));
    int(r) > limit
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub n: u32,
    pub k: u32,
    pub d: u32,
    pub r: u32,
    pub point: TradeoffPoint,
    pub cutset_m: BigRational,
    /// `None` when `ᾱ` lies outside the MSR-MBR segment.
    pub timesharing_m: Option<BigRational>,
    pub beyond_msr_range: bool,
}

impl SweepRow {
    pub fn above_timesharing(&self) -> Option<bool> {
        self.timesharing_m.as_ref().map(|ts| &self.point.m_bar > ts)
    }
}

/// Complete-design points for every admissible `r = n-d+1, ..., n`.
pub fn sweep_tradeoff(n: u32, k: u32, d: u32) -> Result<Vec<SweepRow>> {
    msr_mbr_points(n, k, d)?;
    (n - d + 1..=n)
        .into_par_iter()
        .map(|r| {
            let point = complete_tradeoff_point(n, k, d, r)?;
            let cutset_m = cutset_max_m(n, k, d, &point.alpha_bar)?;
            let timesharing_m = timesharing_m(n, k, d, &point.alpha_bar).ok();
            Ok(SweepRow {
                n,
                k,
                d,
                r,
                point,
                cutset_m,
                timesharing_m,
                beyond_msr_range: beyond_msr_range(n, k, d, r),
            })
        })
        .collect()
}

pub const TRADEOFF_CSV_HEADER: &str = "n,k,d,r,alpha_bar_num,alpha_bar_den,M_bar_num,M_bar_den,cutset_M,timesharing_M,above_timesharing";

pub fn tradeoff_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(TRADEOFF_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let p = &row.point;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            row.n,
            row.k,
            row.d,
            row.r,
            p.alpha_bar.numer(),
            p.alpha_bar.denom(),
            p.m_bar.numer(),
            p.m_bar.denom(),
            fmt_ratio(&row.cutset_m),
            row.timesharing_m.as_ref().map(fmt_ratio).unwrap_or_default(),
            row.above_timesharing().map(|b| b.to_string()).unwrap_or_default(),
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompareReport {
    pub alpha_bar: (String, String),
    pub m_bar: (String, String),
    /// Ordering of `M̄₁` relative to `M̄₂`.
    pub ordering: String,
    pub equal: bool,
    /// `T(A)` takes the same value for every erasure set of the first design.
    pub ta_uniform: bool,
    /// `M̄₁ ≤ M̄₂`, with equality exactly when `T(A)` is uniform.
    pub consistent: bool,
}

fn is_complete(design: &BlockDesign) -> bool {
    let mut blocks = design.blocks.clone();
    blocks.sort();
    blocks.dedup();
    blocks.len() == design.blocks.len()
        && binom_big(design.n as u64, design.r as u64) == blocks.len().into()
}

/// Compares a design against the complete design with the same `(t, r, n)`.
pub fn compare_designs(d1: &BlockDesign, d2: &BlockDesign, k: u32) -> Result<CompareReport> {
    if (d1.n, d1.t, d1.r) != (d2.n, d2.t, d2.r) {
        return Err(Error::Analysis(format!(
            "designs differ in (t, r, n): ({}, {}, {}) vs ({}, {}, {})",
            d1.t, d1.r, d1.n, d2.t, d2.r, d2.n
        )));
    }
    if !is_complete(d2) {
        return Err(Error::Analysis("second design must be the complete design".into()));
    }
    let p1 = derive_params_with_cap(d1, k, DEFAULT_SUBSET_CAP)?;
    let p2 = derive_params_with_cap(d2, k, DEFAULT_SUBSET_CAP)?;
    let (a1, m1) = realized_point(&p1);
    let (a2, m2) = realized_point(&p2);
    let profile = ta_profile(d1, k, d1.t, DEFAULT_SUBSET_CAP)?;
    let ta_uniform = profile.windows(2).all(|w| w[0] == w[1]);
    let ord = m1.cmp(&m2);
    let equal = ord == Ordering::Equal;
    Ok(CompareReport {
        alpha_bar: (fmt_ratio(&a1), fmt_ratio(&a2)),
        m_bar: (fmt_ratio(&m1), fmt_ratio(&m2)),
        ordering: match ord {
            Ordering::Less => "less",
            Ordering::Equal => "equal",
            Ordering::Greater => "greater",
        }
        .into(),
        equal,
        ta_uniform,
        consistent: ord != Ordering::Greater && equal == ta_uniform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rat;
    use crate::construction::derive_params;
    use crate::designs::{gen_complete_design, gen_steiner_triple, tables};

    fn pt(p: &TradeoffPoint) -> (BigRational, BigRational) {
        (p.alpha_bar.clone(), p.m_bar.clone())
    }

    #[test]
    fn complete_points_for_9_7_8() {
        assert_eq!(pt(&complete_tradeoff_point(9, 7, 8, 5).unwrap()), (int(2), rat(67, 5)));
        assert_eq!(pt(&complete_tradeoff_point(9, 7, 8, 3).unwrap()), (int(4), int(23)));
        assert_eq!(pt(&complete_tradeoff_point(9, 7, 8, 2).unwrap()), (int(8), int(35)));
        assert_eq!(pt(&complete_tradeoff_point(9, 7, 8, 4).unwrap()), (rat(8, 3), int(17)));
        assert!(complete_tradeoff_point(9, 7, 8, 1).is_err());
        assert!(complete_tradeoff_point(9, 7, 8, 10).is_err());
    }

    #[test]
    fn sweep_rows_for_9_7_8() {
        let rows = sweep_tradeoff(9, 7, 8).unwrap();
        assert_eq!(rows.iter().map(|r| r.r).collect::<Vec<_>>(), (2..=9).collect::<Vec<_>>());
        let r4 = &rows[2];
        assert_eq!(r4.timesharing_m, Some(rat(49, 3)));
        assert_eq!(r4.above_timesharing(), Some(true));
        assert_eq!(rows[1].above_timesharing(), Some(true));
        // MSR range: r <= 1 + 8/2 = 5
        assert!(!rows[3].beyond_msr_range && rows[4].beyond_msr_range);
        for row in &rows {
            assert!(row.point.m_bar <= row.cutset_m);
        }
        let csv = tradeoff_csv(&rows);
        assert!(csv.starts_with(TRADEOFF_CSV_HEADER));
        assert!(csv.contains("\n9,7,8,5,2,1,67,5,14,14,false\n"));
        assert!(csv.contains("\n9,7,8,4,8,3,17,1,"));
    }

    #[test]
    fn realized_matches_formula() {
        for (n, r) in [(6, 3), (7, 3), (7, 4), (8, 3)] {
            let design = gen_complete_design(2, r, n).unwrap();
            for k in 2..n - 1 {
                let p = derive_params(&design, k).unwrap();
                let want = complete_tradeoff_point(n, k, n - 1, r).unwrap();
                assert_eq!(realized_point(&p), pt(&want), "n={n} k={k} r={r}");
            }
        }
        let d = gen_complete_design(3, 4, 7).unwrap();
        let p = derive_params(&d, 4).unwrap();
        assert_eq!(realized_point(&p), pt(&complete_tradeoff_point(7, 4, 5, 4).unwrap()));
    }

    #[test]
    fn mbr_reduction() {
        for n in 3..=15u32 {
            for k in 1..n {
                let d = n - 1;
                let (_, mbr) = msr_mbr_points(n, k, d).unwrap();
                assert_eq!(pt(&complete_tradeoff_point(n, k, d, 2).unwrap()), pt(&mbr));
            }
        }
    }

    #[test]
    fn steiner_versus_complete() {
        let complete = gen_complete_design(2, 3, 9).unwrap();
        let rep = compare_designs(&tables::steiner_2_3_9(), &complete, 7).unwrap();
        assert!(rep.equal && rep.ta_uniform && rep.consistent);
        assert_eq!(rep.alpha_bar, ("4".into(), "4".into()));
        assert_eq!(rep.m_bar, ("23".into(), "23".into()));

        let rep = compare_designs(&tables::steiner_2_3_9(), &complete, 6).unwrap();
        assert_eq!(rep.m_bar, ("21".into(), "148/7".into()));
        assert_eq!(rep.ordering, "less");
        assert!(!rep.ta_uniform && rep.consistent);

        let rep = compare_designs(&complete, &complete, 5).unwrap();
        assert!(rep.equal && rep.consistent);
    }

    #[test]
    fn comparison_never_beats_complete() {
        let designs = [tables::steiner_2_3_7(), gen_steiner_triple(9).unwrap(), tables::steiner_2_3_9()];
        for d1 in designs {
            let complete = gen_complete_design(2, 3, d1.n).unwrap();
            for k in 1..d1.n - 1 {
                let rep = compare_designs(&d1, &complete, k).unwrap();
                assert!(rep.consistent, "n={} k={k}: {rep:?}", d1.n);
            }
        }
    }

    #[test]
    fn compare_rejects_mismatch() {
        let c = gen_complete_design(2, 3, 9).unwrap();
        assert!(compare_designs(&tables::steiner_2_3_7(), &c, 5).is_err());
        assert!(compare_designs(&c, &tables::steiner_2_3_9(), 5).is_err());
    }
}
