use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{int, Provenance, TradeoffPoint};
use crate::combin::binom_big;
use crate::error::{Error, Result};

fn check_nkd(n: u32, k: u32, d: u32) -> Result<()> {
    if k == 0 || k > d || d >= n {
        return Err(Error::Analysis(format!(
            "need 1 <= k <= d <= n - 1, got (n, k, d) = ({n}, {k}, {d})"
        )));
    }
    Ok(())
}

/// Largest normalized file size the cut-set bound allows at storage `ᾱ`:
/// `Σ_{i=0}^{k-1} min(ᾱ, d - i)`.
pub fn cutset_max_m(n: u32, k: u32, d: u32, alpha_bar: &BigRational) -> Result<BigRational> {
    check_nkd(n, k, d)?;
    if alpha_bar.is_negative() {
        return Err(Error::Analysis("normalized storage must be non-negative".into()));
    }
    Ok((0..k)
        .map(|i| int(d - i).min(alpha_bar.clone()))
        .fold(BigRational::zero(), |acc, x| acc + x))
}

/// `(MSR, MBR)` = `((d-k+1, k(d-k+1)), (d, k(2d-k+1)/2))`.
pub fn msr_mbr_points(n: u32, k: u32, d: u32) -> Result<(TradeoffPoint, TradeoffPoint)> {
    check_nkd(n, k, d)?;
    let (k, d) = (k as i64, d as i64);
    let msr = TradeoffPoint::new(int(d - k + 1), int(k * (d - k + 1)), Provenance::Bound);
    let mbr = TradeoffPoint::new(
        int(d),
        BigRational::new(BigInt::from(k * (2 * d - k + 1)), BigInt::from(2)),
        Provenance::Bound,
    );
    Ok((msr, mbr))
}

/// File size reached by time sharing between the MSR and MBR codes.
pub fn timesharing_m(n: u32, k: u32, d: u32, alpha_bar: &BigRational) -> Result<BigRational> {
    let (msr, mbr) = msr_mbr_points(n, k, d)?;
    if alpha_bar < &msr.alpha_bar || alpha_bar > &mbr.alpha_bar {
        return Err(Error::Analysis(format!(
            "ᾱ = {alpha_bar} is outside the time-sharing segment [{}, {}]",
            msr.alpha_bar, mbr.alpha_bar
        )));
    }
    if msr.alpha_bar == mbr.alpha_bar {
        return Ok(msr.m_bar);
    }
    let slope = (&mbr.m_bar - &msr.m_bar) / (&mbr.alpha_bar - &msr.alpha_bar);
    Ok(&msr.m_bar + slope * (alpha_bar - &msr.alpha_bar))
}

/// Corners of the cut-set curve, `ᾱ = d-k+1, ..., d`.
pub fn cutset_curve(n: u32, k: u32, d: u32) -> Result<Vec<TradeoffPoint>> {
    check_nkd(n, k, d)?;
    (d - k + 1..=d)
        .map(|a| {
            let a = int(a);
            let m = cutset_max_m(n, k, d, &a)?;
            Ok(TradeoffPoint::new(a, m, Provenance::Bound))
        })
        .collect()
}

/// `T_c = Σ_{i=t}^{min(n-k, r)} (i-t+1) C(n-k, i) C(k, r-i)`: the number of long
/// parities for the complete design on `n` points with block size `r`.
pub fn t_c(n: u32, k: u32, r: u32, t: u32) -> BigInt {
    let e = n - k;
    (t..=e.min(r))
        .filter(|&i| r - i <= k)
        .map(|i| {
            BigInt::from(i - t + 1)
                * BigInt::from(binom_big(e as u64, i as u64))
                * BigInt::from(binom_big(k as u64, (r - i) as u64))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rat;
    use crate::construction::{compute_t, DEFAULT_SUBSET_CAP};
    use crate::designs::gen_complete_design;
    use proptest::prelude::*;

    #[test]
    fn cutset_examples() {
        assert_eq!(cutset_max_m(9, 7, 8, &int(8)).unwrap(), int(35));
        assert_eq!(cutset_max_m(9, 7, 8, &int(2)).unwrap(), int(14));
        assert_eq!(cutset_max_m(9, 7, 8, &int(0)).unwrap(), int(0));
        assert!(cutset_max_m(9, 8, 7, &int(1)).is_err());
    }

    #[test]
    fn extreme_points() {
        let (msr, mbr) = msr_mbr_points(9, 7, 8).unwrap();
        assert_eq!((msr.alpha_bar, msr.m_bar), (int(2), int(14)));
        assert_eq!((mbr.alpha_bar, mbr.m_bar), (int(8), int(35)));
        let (msr, _) = msr_mbr_points(9, 5, 5).unwrap();
        assert_eq!((msr.alpha_bar, msr.m_bar), (int(1), int(5)));
        let (msr, mbr) = msr_mbr_points(24, 23, 23).unwrap();
        assert_eq!((msr.alpha_bar, msr.m_bar), (int(1), int(23)));
        assert_eq!((&mbr.alpha_bar, &mbr.m_bar), (&int(23), &int(276)));
        assert_eq!(cutset_max_m(24, 23, 23, &int(23)).unwrap(), mbr.m_bar);
    }

    #[test]
    fn timesharing_examples() {
        assert_eq!(timesharing_m(9, 7, 8, &int(4)).unwrap(), int(21));
        assert_eq!(timesharing_m(9, 7, 8, &int(2)).unwrap(), int(14));
        assert_eq!(timesharing_m(9, 7, 8, &rat(8, 3)).unwrap(), rat(49, 3));
        assert!(timesharing_m(9, 7, 8, &int(9)).is_err());
    }

    #[test]
    fn cutset_curve_corners() {
        let c = cutset_curve(9, 7, 8).unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!((&c[0].alpha_bar, &c[0].m_bar), (&int(2), &int(14)));
        assert_eq!((&c[6].alpha_bar, &c[6].m_bar), (&int(8), &int(35)));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(t_c(9, 7, 3, 2), BigInt::from(7));
        assert_eq!(t_c(9, 7, 4, 2), BigInt::from(21));
        assert_eq!(t_c(9, 6, 3, 2), BigInt::from(20));
        // a single erased disk cannot reach t = 2
        assert_eq!(t_c(9, 8, 3, 2), BigInt::from(0));
    }

    #[test]
    fn closed_form_matches_enumeration_small() {
        for n in 4..=8u32 {
            for t in 2..=3u32 {
                for r in t..=n {
                    let design = gen_complete_design(t, r, n).unwrap();
                    for k in 1..=n + 1 - t {
                        let direct = compute_t(&design, k, t, DEFAULT_SUBSET_CAP).unwrap();
                        assert_eq!(t_c(n, k, r, t), BigInt::from(direct), "n={n} k={k} r={r} t={t}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn timesharing_below_cutset(n in 3u32..20, kd in any::<(u8, u8)>(), num in 0u32..1000) {
            let d = 1 + kd.1 as u32 % (n - 1);
            let k = 1 + kd.0 as u32 % d;
            let (msr, mbr) = msr_mbr_points(n, k, d).unwrap();
            let a = &msr.alpha_bar + (&mbr.alpha_bar - &msr.alpha_bar) * rat(num as i64, 1000);
            let ts = timesharing_m(n, k, d, &a).unwrap();
            prop_assert!(ts <= cutset_max_m(n, k, d, &a).unwrap());
            prop_assert_eq!(cutset_max_m(n, k, d, &msr.alpha_bar).unwrap(), msr.m_bar);
            prop_assert_eq!(cutset_max_m(n, k, d, &mbr.alpha_bar).unwrap(), mbr.m_bar);
        }

        #[test]
        fn cutset_is_monotone(n in 3u32..20, kd in any::<(u8, u8)>(), a in 0i64..200, b in 0i64..200) {
            let d = 1 + kd.1 as u32 % (n - 1);
            let k = 1 + kd.0 as u32 % d;
            let (lo, hi) = (rat(a.min(b), 7), rat(a.max(b), 7));
            prop_assert!(cutset_max_m(n, k, d, &lo).unwrap() <= cutset_max_m(n, k, d, &hi).unwrap());
        }
    }
}
