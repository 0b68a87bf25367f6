//! Normalized storage/bandwidth tradeoff: cut-set bound, MSR and MBR points,
//! complete-design operating points and the asymptotic exponent region.
//!
//! Everything except the exponents themselves is exact rational arithmetic.

mod bounds;
mod exponents;
mod tradeoff;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use bounds::{cutset_curve, cutset_max_m, msr_mbr_points, t_c, timesharing_m};
pub use exponents::{
    exponent_point, exponent_region_membership, exponents_csv, ExponentPoint, Membership, Region,
};
pub use tradeoff::{
    compare_designs, complete_tradeoff_point, realized_point, sweep_tradeoff, tradeoff_csv,
    CompareReport, SweepRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Constructed,
    Bound,
    Timesharing,
}

/// A point `(ᾱ, M̄) = (α/β, M/β)` of the normalized tradeoff plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffPoint {
    pub alpha_bar: BigRational,
    pub m_bar: BigRational,
    pub provenance: Provenance,
}

impl TradeoffPoint {
    pub fn new(alpha_bar: BigRational, m_bar: BigRational, provenance: Provenance) -> Self {
        TradeoffPoint {
            alpha_bar,
            m_bar,
            provenance,
        }
    }
}

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `num/den`, or just `num` for integers.
pub fn fmt_ratio(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `num/den (d.dddddd)`.
pub fn fmt_ratio_decimal(x: &BigRational) -> String {
    format!("{} ({:.6})", fmt_ratio(x), ratio_to_f64(x))
}

/// Parses `a`, `a/b` or a finite decimal such as `0.25`.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (BigInt, BigInt) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = whole.starts_with('-');
        let digits: BigInt = format!("{}{}", whole.trim_start_matches('-'), frac).parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let v = BigRational::new(digits, scale);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

pub(crate) fn ratio_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn ln_bigint(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    (v >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational without overflowing `f64`.
pub(crate) fn ln_ratio(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_formatting() {
        assert_eq!(fmt_ratio(&rat(67, 5)), "67/5");
        assert_eq!(fmt_ratio(&rat(46, 2)), "23");
        assert_eq!(fmt_ratio_decimal(&rat(49, 3)), "49/3 (16.333333)");
        assert_eq!(fmt_ratio_decimal(&rat(-1, 4)), "-1/4 (-0.250000)");
        assert_eq!(fmt_ratio_decimal(&rat(0, 4)), "0 (0.000000)");
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_ratio("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_ratio("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_ratio("7"), Some(int(7)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("x"), None);
    }

    #[test]
    fn logs_of_huge_ratios() {
        let big = BigRational::new(num_traits::pow(BigInt::from(10), 400), BigInt::from(3));
        let want = 400.0 * 10f64.ln() - 3f64.ln();
        assert!((ln_ratio(&big) - want).abs() < 1e-9);
    }
}
