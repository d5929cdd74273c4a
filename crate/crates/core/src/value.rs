//! Exact extended rationals: the value range of every set function here.
//!
//! Finite values are arbitrary-precision rationals kept in lowest terms
//! (num-rational canonicalizes on construction). The two infinities are
//! explicit variants; `+inf + (-inf)` is a reported error, never a panic
//! or a silent NaN-like value.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Rat = BigRational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtValue {
    NegInf,
    Finite(Rat),
    PosInf,
}

pub use ExtValue::{Finite, NegInf, PosInf};

impl ExtValue {
    pub fn zero() -> Self {
        Finite(Rat::zero())
    }

    pub fn one() -> Self {
        Finite(Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Finite(Rat::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Finite(Rat::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Finite(r) if r.is_zero())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Finite(r) => Some(r),
            _ => None,
        }
    }

    /// Checked addition; the only undefined case is opposite infinities.
    pub fn add(&self, other: &ExtValue) -> Result<ExtValue> {
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::UndefinedSum),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    pub fn sub(&self, other: &ExtValue) -> Result<ExtValue> {
        self.add(&other.neg()).map_err(|_| Error::UndefinedSubtraction)
    }

    pub fn neg(&self) -> ExtValue {
        match self {
            PosInf => NegInf,
            NegInf => PosInf,
            Finite(r) => Finite(-r),
        }
    }

    pub fn abs(&self) -> ExtValue {
        match self {
            PosInf | NegInf => PosInf,
            Finite(r) => Finite(r.abs()),
        }
    }

    /// Scale by a finite rational. `0 * inf = 0` by convention, which is
    /// what the convex-combination constructions expect.
    pub fn scale(&self, a: &Rat) -> ExtValue {
        if a.is_zero() {
            return ExtValue::zero();
        }
        match self {
            Finite(r) => Finite(a * r),
            PosInf => {
                if a.is_positive() {
                    PosInf
                } else {
                    NegInf
                }
            }
            NegInf => {
                if a.is_positive() {
                    NegInf
                } else {
                    PosInf
                }
            }
        }
    }

    /// Sum of a sequence, failing on any undefined partial sum.
    pub fn sum<'a, I: IntoIterator<Item = &'a ExtValue>>(items: I) -> Result<ExtValue> {
        let mut acc = ExtValue::zero();
        for v in items {
            acc = acc.add(v)?;
        }
        Ok(acc)
    }

    pub fn parse(s: &str) -> Result<ExtValue> {
        let t = s.trim();
        match t {
            "inf" | "+inf" => return Ok(PosInf),
            "-inf" => return Ok(NegInf),
            _ => {}
        }
        let parse_int = |x: &str| -> Result<BigInt> {
            x.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))
        };
        if let Some((n, d)) = t.split_once('/') {
            let num = parse_int(n.trim())?;
            let den = parse_int(d.trim())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Finite(Rat::new(num, den)))
        } else {
            Ok(Finite(Rat::from_integer(parse_int(t)?)))
        }
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (PosInf, _) | (_, NegInf) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

/// Rationals print as `p/q` (integers as `p`), never as decimals, so
/// golden report files stay exact.
impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosInf => write!(f, "inf"),
            NegInf => write!(f, "-inf"),
            Finite(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Debug for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rational_addition() {
        // 1/3 + 1/6 = 1/2
        let a = ExtValue::ratio(1, 3);
        let b = ExtValue::ratio(1, 6);
        assert_eq!(a.add(&b).unwrap(), ExtValue::ratio(1, 2));
    }

    #[test]
    fn infinity_absorbs_finite() {
        assert_eq!(PosInf.add(&ExtValue::from_int(5)).unwrap(), PosInf);
        assert_eq!(NegInf.add(&ExtValue::from_int(5)).unwrap(), NegInf);
    }

    #[test]
    fn opposite_infinities_are_undefined() {
        assert_eq!(PosInf.add(&NegInf), Err(Error::UndefinedSum));
        assert_eq!(PosInf.sub(&PosInf), Err(Error::UndefinedSubtraction));
    }

    #[test]
    fn ordering_and_display() {
        assert!(NegInf < ExtValue::from_int(-1000));
        assert!(ExtValue::from_int(1000) < PosInf);
        assert_eq!(ExtValue::ratio(2, 4).to_string(), "1/2");
        assert_eq!(ExtValue::ratio(4, 2).to_string(), "2");
        assert_eq!(ExtValue::parse("-3/9").unwrap(), ExtValue::ratio(-1, 3));
        assert_eq!(ExtValue::parse("inf").unwrap(), PosInf);
        assert_eq!(ExtValue::parse("-inf").unwrap(), NegInf);
    }

    #[test]
    fn canonical_reduction() {
        // gcd 1, positive denominator
        if let Finite(r) = ExtValue::ratio(6, -8) {
            assert_eq!(r.numer(), &BigInt::from(-3));
            assert_eq!(r.denom(), &BigInt::from(4));
        } else {
            panic!("expected finite");
        }
    }

    #[test]
    fn scaling_through_infinity() {
        assert_eq!(PosInf.scale(&rat(-1, 2)), NegInf);
        assert_eq!(PosInf.scale(&rat(0, 1)), ExtValue::zero());
        assert_eq!(ExtValue::ratio(1, 2).scale(&rat(2, 3)), ExtValue::ratio(1, 3));
    }
}
