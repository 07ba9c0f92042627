//! Exact rational numbers used for every strength, bound and GDoF value.
//!
//! A thin newtype over `Ratio<i128>` whose arithmetic is overflow-checked:
//! an overflow panics instead of silently wrapping, so no computation can
//! return an inexact answer.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign, Div};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero, One};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("number `{0}` is too large")]
    Overflow(String),
}

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    /// Builds `numer / denom` in lowest terms. Panics on a zero denominator.
    pub fn new(numer: i128, denom: i128) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i128) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// `max(0, self)`.
    pub fn positive_part(self) -> Self {
        if self.is_negative() {
            Rational::ZERO
        } else {
            self
        }
    }

    pub fn floor(&self) -> i128 {
        self.0.floor().to_integer()
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Renders as `p/q`, with `q = 1` spelled out for integers.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    /// Renders as a plain decimal when the expansion terminates within
    /// `max_digits` fractional digits, otherwise as `p/q`.
    pub fn to_display_string(&self, max_digits: u32) -> String {
        match self.terminating_decimal(max_digits) {
            Some(s) => s,
            None => self.to_fraction_string(),
        }
    }

    fn terminating_decimal(&self, max_digits: u32) -> Option<String> {
        let mut den = self.denom();
        let mut twos = 0u32;
        let mut fives = 0u32;
        while den % 2 == 0 {
            den /= 2;
            twos += 1;
        }
        while den % 5 == 0 {
            den /= 5;
            fives += 1;
        }
        if den != 1 {
            return None;
        }
        let digits = twos.max(fives);
        if digits > max_digits {
            return None;
        }
        if digits == 0 {
            return Some(self.numer().to_string());
        }
        let scale = 10i128.checked_pow(digits)?;
        let scaled = self.numer().checked_mul(scale / self.denom())?;
        let sign = if scaled < 0 { "-" } else { "" };
        let abs = scaled.unsigned_abs();
        let int_part = abs / scale as u128;
        let frac_part = abs % scale as u128;
        let frac = format!("{:0width$}", frac_part, width = digits as usize);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            Some(format!("{sign}{int_part}"))
        } else {
            Some(format!("{sign}{int_part}.{frac}"))
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Least common multiple of the denominators, i.e. the coarsest integer
/// lattice containing every value.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> i128 {
    values
        .into_iter()
        .fold(1i128, |acc, r| acc.lcm(&r.denom()))
}

impl From<i128> for Rational {
    fn from(n: i128) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i128)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_add(&rhs.0).expect("rational overflow in add"))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_sub(&rhs.0).expect("rational overflow in sub"))
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0.checked_mul(&rhs.0).expect("rational overflow in mul"))
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0.checked_div(&rhs.0).expect("rational overflow in div"))
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = *self + rhs;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = *self - rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + *b)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_integer(s: &str, whole: &str) -> Result<i128, ParseRationalError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseRationalError::Invalid(whole.to_string()));
    }
    s.parse::<i128>()
        .map_err(|_| ParseRationalError::Overflow(whole.to_string()))
}

/// Accepts `p/q`, integers and finite decimals such as `0.35` or `-.5`.
/// Decimals convert exactly.
impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let s = raw.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if let Some((n, d)) = s.split_once('/') {
            let numer = parse_integer(n.trim(), raw)?;
            let d = d.trim();
            if d.starts_with(['+', '-']) {
                return Err(ParseRationalError::Invalid(raw.to_string()));
            }
            let denom = parse_integer(d, raw)?;
            if denom == 0 {
                return Err(ParseRationalError::ZeroDenominator(raw.to_string()));
            }
            return Ok(Rational::new(numer, denom));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.starts_with('-');
            let unsigned_int = int_part.strip_prefix(['+', '-']).unwrap_or(int_part);
            if (unsigned_int.is_empty() && frac_part.is_empty())
                || !unsigned_int.bytes().all(|b| b.is_ascii_digit())
                || !frac_part.bytes().all(|b| b.is_ascii_digit())
            {
                return Err(ParseRationalError::Invalid(raw.to_string()));
            }
            let scale = u32::try_from(frac_part.len())
                .ok()
                .and_then(|n| 10i128.checked_pow(n))
                .ok_or_else(|| ParseRationalError::Overflow(raw.to_string()))?;
            let int_val: i128 = if unsigned_int.is_empty() {
                0
            } else {
                unsigned_int
                    .parse()
                    .map_err(|_| ParseRationalError::Overflow(raw.to_string()))?
            };
            let frac_val: i128 = if frac_part.is_empty() {
                0
            } else {
                frac_part
                    .parse()
                    .map_err(|_| ParseRationalError::Overflow(raw.to_string()))?
            };
            let magnitude = int_val
                .checked_mul(scale)
                .and_then(|v| v.checked_add(frac_val))
                .ok_or_else(|| ParseRationalError::Overflow(raw.to_string()))?;
            let numer = if negative { -magnitude } else { magnitude };
            return Ok(Rational::new(numer, scale));
        }
        Ok(Rational::from_integer(parse_integer(s, raw)?))
    }
}

impl PartialEq<i128> for Rational {
    fn eq(&self, other: &i128) -> bool {
        self.is_integer() && self.numer() == *other
    }
}

impl PartialOrd<i128> for Rational {
    fn partial_cmp(&self, other: &i128) -> Option<Ordering> {
        Some(self.cmp(&Rational::from_integer(*other)))
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::ONE
    }
}

/// Shorthand for `Rational::new(n, d)`.
pub fn q(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = Rational::new(6, -4);
        assert_eq!(r.numer(), -3);
        assert_eq!(r.denom(), 2);
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!("0.35".parse::<Rational>().unwrap(), q(7, 20));
        assert_eq!("-1/2".parse::<Rational>().unwrap(), q(-1, 2));
        assert_eq!("3".parse::<Rational>().unwrap(), q(3, 1));
        assert_eq!(".5".parse::<Rational>().unwrap(), q(1, 2));
        assert_eq!("2.".parse::<Rational>().unwrap(), q(2, 1));
        assert_eq!(" 4/6 ".parse::<Rational>().unwrap(), q(2, 3));
        assert_eq!("-0.125".parse::<Rational>().unwrap(), q(-1, 8));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1/-2", "1.2.3", ".", "1e3", "--1", "1/ 2x", "0x10"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(q(6, 5).to_string(), "6/5");
        assert_eq!(q(2, 1).to_string(), "2");
        assert_eq!(q(2, 1).to_fraction_string(), "2/1");
        assert_eq!(q(6, 5).to_display_string(12), "1.2");
        assert_eq!(q(2, 15).to_display_string(12), "2/15");
        assert_eq!(q(-7, 20).to_display_string(12), "-0.35");
        assert_eq!(q(1, 1 << 20).to_display_string(12), "1/1048576");
        assert_eq!(q(0, 1).to_display_string(12), "0");
    }

    #[test]
    fn common_denominator_is_lcm() {
        let v = [q(1, 4), q(5, 6), q(2, 1)];
        assert_eq!(common_denominator(&v), 12);
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_panics() {
        let big = Rational::from_integer(i128::MAX / 2);
        let _ = big * big;
    }
}
