use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::tradeoff::complete_tradeoff_point;
use super::{fmt_ratio, int, ln_ratio};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentPoint {
    pub n: u32,
    pub tau1: u32,
    pub tau2: u32,
    pub epsilon: BigRational,
    /// `ceil(n^ε)`.
    pub r: u32,
    pub alpha_bar: BigRational,
    pub m_bar: BigRational,
    /// `log(n·ᾱ - M̄) / log n`.
    pub er: f64,
    /// `log(M̄) / log n`.
    pub ed: f64,
    /// `M̄ ≥ n^{1-ε}(n - τ₂)`, decided exactly.
    pub storage_bound_holds: bool,
    /// `n·ᾱ - M̄ ≤ n^{1-ε} τ₁ (n - τ₂) / (n^ε - τ₂)`, decided exactly.
    pub redundancy_bound_holds: bool,
}

impl ExponentPoint {
    /// `2 + E_r - 2 E_d`, the distance to the `2E_d ≤ 2 + E_r` face.
    pub fn gap(&self) -> f64 {
        2.0 + self.er - 2.0 * self.ed
    }

    /// Region classes of `(E_r, E_d)`; `None` when either exponent is not finite.
    pub fn membership(&self) -> Option<Membership> {
        let er = BigRational::from_float(self.er)?;
        let ed = BigRational::from_float(self.ed)?;
        Some(exponent_region_membership(&er, &ed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Inside,
    Boundary,
    Outside,
}

impl Region {
    fn from_slack(s: &BigRational) -> Region {
        if s.is_positive() {
            Region::Inside
        } else if s.is_zero() {
            Region::Boundary
        } else {
            Region::Outside
        }
    }

    /// Inside or on the boundary of the (closed) region.
    pub fn contains(self) -> bool {
        self != Region::Outside
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Inside => "inside",
            Region::Boundary => "boundary",
            Region::Outside => "outside",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    /// `E_d ≤ E_r + 1`, `2E_d ≤ 2 + E_r`, `E_d ≤ 2`.
    pub estar: Region,
    /// Additionally `E_d ≤ 1` or `E_r ≥ E_d`.
    pub timesharing: Region,
}

/// Classifies `(E_r, E_d)` by its smallest constraint slack.
pub fn exponent_region_membership(er: &BigRational, ed: &BigRational) -> Membership {
    let one = BigRational::one();
    let two = int(2);
    let slacks = [
        er + &one - ed,
        &two + er - &two * ed,
        &two - ed,
    ];
    let estar_slack = slacks.iter().min().expect("three constraints").clone();
    let ts_extra = (&one - ed).max(er - ed);
    let ts_slack = estar_slack.clone().min(ts_extra);
    Membership {
        estar: Region::from_slack(&estar_slack),
        timesharing: Region::from_slack(&ts_slack),
    }
}

/// `(p, q)` with `ε = p/q`, `0 < ε < 1`.
fn split_epsilon(eps: &BigRational) -> Result<(u32, u32)> {
    let bad = || Error::Analysis(format!("ε = {eps} must be a rational in (0, 1) with a small denominator"));
    if !eps.is_positive() || eps >= &BigRational::one() {
        return Err(bad());
    }
    let p: u32 = eps.numer().try_into().map_err(|_| bad())?;
    let q: u32 = eps.denom().try_into().map_err(|_| bad())?;
    if q > 64 {
        return Err(bad());
    }
    Ok((p, q))
}

/// Smallest integer `r` with `r^q ≥ n^p`, i.e. `ceil(n^{p/q})`.
fn ceil_power(n: u32, p: u32, q: u32) -> u32 {
    let target = num_traits::pow(BigInt::from(n), p as usize);
    let mut r = target.nth_root(q);
    if num_traits::pow(r.clone(), q as usize) < target {
        r += 1;
    }
    r.try_into().expect("ceil(n^ε) <= n")
}

/// Decides a predicate in `x = n^{1/q}` given an evaluator that answers from
/// a bracket `lo ≤ x ≤ hi` when it can. The bracket halves in width each round
/// and collapses to a point when `x` is rational.
fn decide_in_root<F>(n: u32, q: u32, eval: F) -> Result<bool>
where
    F: Fn(&BigRational, &BigRational) -> Option<bool>,
{
    let nn = BigInt::from(n);
    for bits in (4..=12).map(|e| 1u32 << e) {
        let scale = BigInt::one() << bits;
        let scaled = &nn * num_traits::pow(scale.clone(), q as usize);
        let m = scaled.nth_root(q);
        let exact = num_traits::pow(m.clone(), q as usize) == scaled;
        let lo = BigRational::new(m.clone(), scale.clone());
        let hi = if exact {
            lo.clone()
        } else {
            BigRational::new(m + 1, scale)
        };
        if let Some(ans) = eval(&lo, &hi) {
            return Ok(ans);
        }
        if exact {
            break;
        }
    }
    Err(Error::Analysis(format!("could not decide inequality in n^(1/{q}) for n = {n}")))
}

fn rpow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// Complete-design point with `r = ceil(n^ε)`, `k = n - τ₁`, `d = n - τ₂`, plus
/// exact checks of the two growth inequalities used in the achievability proof.
pub fn exponent_point(n: u32, tau1: u32, tau2: u32, epsilon: &BigRational) -> Result<ExponentPoint> {
    if tau2 == 0 || tau1 < tau2 || tau1 >= n {
        return Err(Error::Analysis(format!(
            "need 1 <= τ2 <= τ1 < n, got τ1 = {tau1}, τ2 = {tau2}, n = {n}"
        )));
    }
    let (p, q) = split_epsilon(epsilon)?;
    let r = ceil_power(n, p, q);
    let (k, d) = (n - tau1, n - tau2);
    if r < tau2 + 1 {
        return Err(Error::Analysis(format!(
            "r = ceil(n^ε) = {r} is below n - d + 1 = {}; increase n",
            tau2 + 1
        )));
    }
    let point = complete_tradeoff_point(n, k, d, r)?;
    let (alpha_bar, m_bar) = (point.alpha_bar, point.m_bar);
    let redundancy = int(n) * &alpha_bar - &m_bar;

    let base = int(n - tau2);
    let a = q - p;
    let storage_bound_holds = decide_in_root(n, q, |lo, hi| {
        if m_bar >= &base * rpow(hi, a) {
            Some(true)
        } else if m_bar < &base * rpow(lo, a) {
            Some(false)
        } else {
            None
        }
    })?;
    let t2 = int(tau2);
    let scale = int(tau1) * &base;
    let redundancy_bound_holds = decide_in_root(n, q, |lo, hi| {
        let lo_den = rpow(lo, p) - &t2;
        if !lo_den.is_positive() {
            return None;
        }
        let rhs_min = &scale * rpow(lo, a) / (rpow(hi, p) - &t2);
        let rhs_max = &scale * rpow(hi, a) / lo_den;
        if redundancy <= rhs_min {
            Some(true)
        } else if redundancy > rhs_max {
            Some(false)
        } else {
            None
        }
    })?;

    let ln_n = (n as f64).ln();
    Ok(ExponentPoint {
        n,
        tau1,
        tau2,
        epsilon: epsilon.clone(),
        r,
        er: ln_ratio(&redundancy) / ln_n,
        ed: ln_ratio(&m_bar) / ln_n,
        alpha_bar,
        m_bar,
        storage_bound_holds,
        redundancy_bound_holds,
    })
}

pub const EXPONENT_CSV_HEADER: &str = "n,tau1,tau2,epsilon,Er,Ed,region";

/// One row per point; `region` is `<E* class>/<time-sharing class>`.
pub fn exponents_csv(points: &[ExponentPoint]) -> String {
    let mut out = String::from(EXPONENT_CSV_HEADER);
    out.push('\n');
    for pt in points {
        let m = match pt.membership() {
            Some(m) => format!("{}/{}", m.estar.as_str(), m.timesharing.as_str()),
            None => "undefined".into(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{:.9},{:.9},{}",
            pt.n,
            pt.tau1,
            pt.tau2,
            fmt_ratio(&pt.epsilon),
            pt.er,
            pt.ed,
            m
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::rat;

    #[test]
    fn membership_examples() {
        let m = exponent_region_membership(&int(0), &int(1));
        assert_eq!(m.estar, Region::Boundary);
        let m = exponent_region_membership(&int(2), &int(2));
        assert_eq!(m.estar, Region::Boundary);
        assert_eq!(m.timesharing, Region::Boundary);
        // 2·(3/2) = 2 + 1 puts this point on the 2E_d ≤ 2 + E_r face
        let m = exponent_region_membership(&int(1), &rat(3, 2));
        assert!(m.estar.contains());
        assert_eq!(m.estar, Region::Boundary);
        assert_eq!(m.timesharing, Region::Outside);
        let m = exponent_region_membership(&rat(3, 2), &rat(5, 4));
        assert_eq!((m.estar, m.timesharing), (Region::Inside, Region::Inside));
        let m = exponent_region_membership(&int(0), &int(3));
        assert_eq!(m.estar, Region::Outside);
    }

    #[test]
    fn ceiling_roots() {
        assert_eq!(ceil_power(256, 1, 4), 4);
        assert_eq!(ceil_power(64, 1, 4), 3);
        assert_eq!(ceil_power(128, 1, 2), 12);
        assert_eq!(ceil_power(512, 3, 4), 108);
        assert_eq!(ceil_power(64, 1, 2), 8);
    }

    #[test]
    fn exact_decisions() {
        // n^ε = 16 exactly for n = 256, ε = 1/2: both bounds hold with equality
        let pt = exponent_point(256, 1, 1, &rat(1, 2)).unwrap();
        assert_eq!(pt.r, 16);
        assert_eq!(pt.m_bar, int(256 * 255 / 16));
        assert!(pt.storage_bound_holds && pt.redundancy_bound_holds);
        // ceil(128^{1/2}) = 12 > √128 ≈ 11.31, so M̄ = nd/r falls short of n^{1/2}(n-1)
        let pt = exponent_point(128, 1, 1, &rat(1, 2)).unwrap();
        assert_eq!(pt.r, 12);
        assert!(!pt.storage_bound_holds);
        assert!(pt.redundancy_bound_holds);
    }

    #[test]
    fn redundancy_exponent_approaches_limit() {
        // τ1 = τ2: E_r tends to 2 - 2ε = 1 for ε = 1/2
        let eps = rat(1, 2);
        let err = |n: u32| (exponent_point(n, 1, 1, &eps).unwrap().er - 1.0).abs();
        let squares: Vec<f64> = [16, 64, 256, 1024].into_iter().map(err).collect();
        assert!(squares.windows(2).all(|w| w[1] < w[0]), "{squares:?}");
        // ceil(√n) makes the approach ragged for other n, but it still closes in
        let sampled: Vec<f64> = [50, 100, 200, 400].into_iter().map(err).collect();
        assert!(sampled[3] < sampled[0], "{sampled:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(exponent_point(64, 1, 2, &rat(1, 2)).is_err());
        assert!(exponent_point(64, 1, 1, &int(1)).is_err());
        assert!(exponent_point(4, 3, 3, &rat(1, 4)).is_err());
    }

    #[test]
    fn csv_rows() {
        let pts: Vec<_> = [64, 256]
            .iter()
            .map(|&n| exponent_point(n, 1, 1, &rat(1, 2)).unwrap())
            .collect();
        let csv = exponents_csv(&pts);
        assert!(csv.starts_with(EXPONENT_CSV_HEADER));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("64,1,1,1/2,"));
    }
}
