//! Extended nonnegative reals: exact nonnegative rationals plus `inf`.
//!
//! Arithmetic follows the conventions of positive measure theory:
//! `a + inf = inf` and `0 * inf = 0`. Countable sums are suprema of finite
//! partial sums, which [`sup_of_sequence`] approximates from below.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtRealError {
    #[error("negative value {0} is not an extended nonnegative real")]
    Negative(BigRational),
    #[error("cannot parse `{0}` as a rational or `inf`")]
    Parse(String),
    #[error("sequence decreased at index {index}: {previous} > {next}")]
    NotMonotone {
        index: usize,
        previous: ExtValue,
        next: ExtValue,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    Finite(BigRational),
    Infinity,
}

/// A value in `[0, inf]` with an exact rational finite part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtValue(Repr);

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue(Repr::Finite(BigRational::zero()))
    }

    pub fn one() -> Self {
        ExtValue(Repr::Finite(BigRational::one()))
    }

    pub fn infinity() -> Self {
        ExtValue(Repr::Infinity)
    }

    /// Wraps a rational, rejecting negative values.
    pub fn finite(q: BigRational) -> Result<Self, ExtRealError> {
        if q.is_negative() {
            Err(ExtRealError::Negative(q))
        } else {
            Ok(ExtValue(Repr::Finite(q)))
        }
    }

    pub fn from_integer(n: u64) -> Self {
        ExtValue(Repr::Finite(BigRational::from_integer(BigInt::from(n))))
    }

    /// `numer / denom`. Panics when `denom == 0`.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        ExtValue(Repr::Finite(BigRational::new(
            BigInt::from(numer),
            BigInt::from(denom),
        )))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.0, Repr::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Finite(q) if q.is_zero())
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Finite(q) => Some(q),
            Repr::Infinity => None,
        }
    }

    pub fn into_finite(self) -> Option<BigRational> {
        match self.0 {
            Repr::Finite(q) => Some(q),
            Repr::Infinity => None,
        }
    }

    /// Lossy conversion for reporting; `inf` maps to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Finite(q) => q.to_f64().unwrap_or(f64::INFINITY),
            Repr::Infinity => f64::INFINITY,
        }
    }

    /// Truncated subtraction: `max(self - other, 0)`, with `inf - finite = inf`
    /// and `x - inf = 0` for every `x` (including `inf`).
    pub fn monus(&self, other: &ExtValue) -> ExtValue {
        match (&self.0, &other.0) {
            (_, Repr::Infinity) => ExtValue::zero(),
            (Repr::Infinity, Repr::Finite(_)) => ExtValue::infinity(),
            (Repr::Finite(a), Repr::Finite(b)) => {
                if a > b {
                    ExtValue(Repr::Finite(a - b))
                } else {
                    ExtValue::zero()
                }
            }
        }
    }

    pub fn min_of(self, other: ExtValue) -> ExtValue {
        std::cmp::min(self, other)
    }

    pub fn max_of(self, other: ExtValue) -> ExtValue {
        std::cmp::max(self, other)
    }
}

impl Default for ExtValue {
    fn default() -> Self {
        ExtValue::zero()
    }
}

impl From<u64> for ExtValue {
    fn from(n: u64) -> Self {
        ExtValue::from_integer(n)
    }
}

impl TryFrom<BigRational> for ExtValue {
    type Error = ExtRealError;

    fn try_from(q: BigRational) -> Result<Self, Self::Error> {
        ExtValue::finite(q)
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Finite(a), Repr::Finite(b)) => a.cmp(b),
            (Repr::Finite(_), Repr::Infinity) => Ordering::Less,
            (Repr::Infinity, Repr::Finite(_)) => Ordering::Greater,
            (Repr::Infinity, Repr::Infinity) => Ordering::Equal,
        }
    }
}

impl Add for &ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: &ExtValue) -> ExtValue {
        match (&self.0, &rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtValue(Repr::Finite(a + b)),
            _ => ExtValue::infinity(),
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        match (self.0, rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtValue(Repr::Finite(a + b)),
            _ => ExtValue::infinity(),
        }
    }
}

impl Mul for &ExtValue {
    type Output = ExtValue;

    fn mul(self, rhs: &ExtValue) -> ExtValue {
        if self.is_zero() || rhs.is_zero() {
            return ExtValue::zero();
        }
        match (&self.0, &rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtValue(Repr::Finite(a * b)),
            _ => ExtValue::infinity(),
        }
    }
}

impl Mul for ExtValue {
    type Output = ExtValue;

    fn mul(self, rhs: ExtValue) -> ExtValue {
        &self * &rhs
    }
}

impl Mul<&ExtValue> for &BigRational {
    type Output = ExtValue;

    /// Scales by a nonnegative rational (a probability, typically).
    fn mul(self, rhs: &ExtValue) -> ExtValue {
        debug_assert!(!self.is_negative());
        if self.is_zero() {
            return ExtValue::zero();
        }
        match &rhs.0 {
            Repr::Finite(b) => ExtValue(Repr::Finite(self * b)),
            Repr::Infinity => ExtValue::infinity(),
        }
    }
}

impl Sum for ExtValue {
    fn sum<I: Iterator<Item = ExtValue>>(iter: I) -> Self {
        let mut acc = BigRational::zero();
        for v in iter {
            match v.0 {
                Repr::Finite(q) => acc += q,
                Repr::Infinity => return ExtValue::infinity(),
            }
        }
        ExtValue(Repr::Finite(acc))
    }
}

impl<'a> Sum<&'a ExtValue> for ExtValue {
    fn sum<I: Iterator<Item = &'a ExtValue>>(iter: I) -> Self {
        let mut acc = BigRational::zero();
        for v in iter {
            match &v.0 {
                Repr::Finite(q) => acc += q,
                Repr::Infinity => return ExtValue::infinity(),
            }
        }
        ExtValue(Repr::Finite(acc))
    }
}

/// Renders `p/q` (or `p` for integers) and `inf`.
impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Finite(q) => write!(f, "{}", q),
            Repr::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtValue {
    type Err = ExtRealError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" {
            return Ok(ExtValue::infinity());
        }
        let q = parse_rational(t).ok_or_else(|| ExtRealError::Parse(s.to_string()))?;
        ExtValue::finite(q)
    }
}

/// Parses `p/q`, `p`, or a plain decimal `a.b` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let frac: BigInt = frac.parse().ok()?;
        let mag = int.abs() * &scale + frac;
        let numer = if negative { -mag } else { mag };
        return Some(BigRational::new(numer, scale));
    }
    let n: BigInt = s.parse().ok()?;
    Some(BigRational::from_integer(n))
}

/// How a supremum approximation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupStatus {
    /// Two consecutive terms were equal, or a term was `inf`.
    Exact,
    /// The returned value is only known to be below the supremum.
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupResult {
    pub value: ExtValue,
    pub status: SupStatus,
}

/// Consumes up to `budget` terms of a nondecreasing sequence.
///
/// Stabilization (two consecutive equal terms) is reported as
/// [`SupStatus::Exact`]; this is the contract the caller promises, not
/// something the function can prove for arbitrary generators.
pub fn sup_of_sequence<I>(seq: I, budget: usize) -> Result<SupResult, ExtRealError>
where
    I: IntoIterator<Item = ExtValue>,
{
    let mut prev: Option<ExtValue> = None;
    for (index, next) in seq.into_iter().take(budget).enumerate() {
        if next.is_infinite() {
            return Ok(SupResult {
                value: next,
                status: SupStatus::Exact,
            });
        }
        if let Some(p) = &prev {
            match next.cmp(p) {
                Ordering::Less => {
                    return Err(ExtRealError::NotMonotone {
                        index,
                        previous: p.clone(),
                        next,
                    })
                }
                Ordering::Equal => {
                    return Ok(SupResult {
                        value: next,
                        status: SupStatus::Exact,
                    })
                }
                Ordering::Greater => {}
            }
        }
        prev = Some(next);
    }
    Ok(SupResult {
        value: prev.unwrap_or_else(ExtValue::zero),
        status: SupStatus::LowerBound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn addition_absorbs_infinity() {
        assert_eq!(ExtValue::one() + ExtValue::infinity(), ExtValue::infinity());
        assert_eq!(ExtValue::infinity() + ExtValue::one(), ExtValue::infinity());
        assert_eq!(ExtValue::zero() + ExtValue::zero(), ExtValue::zero());
        assert_eq!(ExtValue::ratio(1, 2) + ExtValue::ratio(1, 3), ExtValue::ratio(5, 6));
    }

    #[test]
    fn zero_annihilates_infinity() {
        assert_eq!(ExtValue::zero() * ExtValue::infinity(), ExtValue::zero());
        assert_eq!(ExtValue::infinity() * ExtValue::zero(), ExtValue::zero());
        assert_eq!(ExtValue::from(2) * ExtValue::infinity(), ExtValue::infinity());
        assert_eq!(&BigRational::zero() * &ExtValue::infinity(), ExtValue::zero());
        for x in [ExtValue::zero(), ExtValue::ratio(3, 7), ExtValue::infinity()] {
            assert_eq!(ExtValue::one() * x.clone(), x);
        }
    }

    #[test]
    fn negative_rejected() {
        assert!(matches!(
            ExtValue::finite(q(-1, 2)),
            Err(ExtRealError::Negative(_))
        ));
        assert!("-1/2".parse::<ExtValue>().is_err());
    }

    #[test]
    fn order_places_infinity_on_top() {
        assert!(ExtValue::from_integer(1_000_000) < ExtValue::infinity());
        assert!(ExtValue::ratio(1, 3) < ExtValue::ratio(1, 2));
        assert_eq!(ExtValue::infinity().cmp(&ExtValue::infinity()), Ordering::Equal);
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "inf", "1/2", "7", "22/7"] {
            let v: ExtValue = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("0.25".parse::<ExtValue>().unwrap(), ExtValue::ratio(1, 4));
        assert_eq!("2/4".parse::<ExtValue>().unwrap().to_string(), "1/2");
        assert!("1/0".parse::<ExtValue>().is_err());
        assert!("abc".parse::<ExtValue>().is_err());
    }

    #[test]
    fn monus_clamps() {
        assert_eq!(ExtValue::one().monus(&ExtValue::from(2)), ExtValue::zero());
        assert_eq!(ExtValue::from(3).monus(&ExtValue::one()), ExtValue::from(2));
        assert_eq!(ExtValue::infinity().monus(&ExtValue::one()), ExtValue::infinity());
        assert_eq!(ExtValue::infinity().monus(&ExtValue::infinity()), ExtValue::zero());
    }

    #[test]
    fn sup_of_weighted_geometric_series_is_lower_bound() {
        // partial sums of sum_i (1/2)^(i+1) (i+1), which tend to 2
        let terms = (0u32..).scan(BigRational::zero(), |acc, i| {
            *acc += BigRational::new(BigInt::from(i + 1), num_traits::pow(BigInt::from(2), (i + 1) as usize));
            Some(ExtValue::finite(acc.clone()).unwrap())
        });
        let res = sup_of_sequence(terms, 60).unwrap();
        assert_eq!(res.status, SupStatus::LowerBound);
        assert!(res.value < ExtValue::from(2));
        assert!(res.value > ExtValue::from(2).monus(&ExtValue::ratio(1, 1_000_000)));
    }

    #[test]
    fn sup_of_constant_zero_is_exact() {
        let res = sup_of_sequence(std::iter::repeat(ExtValue::zero()), 10).unwrap();
        assert_eq!(res, SupResult { value: ExtValue::zero(), status: SupStatus::Exact });
        let empty = sup_of_sequence(std::iter::empty(), 10).unwrap();
        assert_eq!(empty.value, ExtValue::zero());
    }

    #[test]
    fn sup_with_infinity_is_exact() {
        let seq = vec![ExtValue::one(), ExtValue::from(2), ExtValue::infinity(), ExtValue::infinity()];
        let res = sup_of_sequence(seq, 10).unwrap();
        assert_eq!(res.value, ExtValue::infinity());
        assert_eq!(res.status, SupStatus::Exact);
    }

    #[test]
    fn sup_rejects_decrease() {
        let seq = vec![ExtValue::from(2), ExtValue::one()];
        assert!(matches!(
            sup_of_sequence(seq, 10),
            Err(ExtRealError::NotMonotone { index: 1, .. })
        ));
    }
}
