//! Exact scalar types shared by every module: rationals, extended log values
//! and their canonical string encoding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Rational numbers used for coordinates, lengths and log values.
pub type Q = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseValueError {
    #[error("empty string")]
    Empty,
    #[error("`{0}` is not an integer or `num/den` rational")]
    Malformed(String),
    #[error("`{0}` is not in lowest terms with positive denominator")]
    NotCanonical(String),
    #[error("`{0}` overflows 64-bit arithmetic")]
    Overflow(String),
}

fn parse_int(s: &str, full: &str) -> Result<i64, ParseValueError> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseValueError::Malformed(full.to_string()));
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return Err(ParseValueError::NotCanonical(full.to_string()));
    }
    if s.starts_with('-') && digits == "0" {
        return Err(ParseValueError::NotCanonical(full.to_string()));
    }
    s.parse::<i64>()
        .map_err(|_| ParseValueError::Overflow(full.to_string()))
}

/// Parses a rational in canonical form: `"n"` or `"n/d"` with `d > 1` and
/// `gcd(n, d) = 1`. Anything else (`"2/4"`, `"3/1"`, `"+1"`, `"-0"`) is rejected
/// so that the encoding is bijective.
pub fn parse_rational(s: &str) -> Result<Q, ParseValueError> {
    if s.is_empty() {
        return Err(ParseValueError::Empty);
    }
    match s.split_once('/') {
        None => Ok(Q::from_integer(parse_int(s, s)?)),
        Some((n, d)) => {
            let num = parse_int(n, s)?;
            if d.starts_with('-') {
                return Err(ParseValueError::NotCanonical(s.to_string()));
            }
            let den = parse_int(d, s)?;
            if den <= 1 || num.gcd(&den) != 1 {
                return Err(ParseValueError::NotCanonical(s.to_string()));
            }
            Ok(Q::new_raw(num, den))
        }
    }
}

/// Lenient rational parsing for command-line input: accepts any `n/d` with
/// nonzero `d` and reduces it.
pub fn parse_rational_lenient(s: &str) -> Result<Q, ParseValueError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseValueError::Empty);
    }
    let bad = || ParseValueError::Malformed(s.to_string());
    match s.split_once('/') {
        None => s.parse::<i64>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Canonical string for a rational: `"n"` for integers, `"n/d"` otherwise.
pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A value of `log|f|`: a rational or negative infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogValue {
    NegInf,
    Finite(Q),
}

impl LogValue {
    pub const ZERO: LogValue = LogValue::Finite(Q::ZERO);

    pub fn int(n: i64) -> Self {
        LogValue::Finite(Q::from_integer(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, LogValue::Finite(_))
    }

    pub fn finite(&self) -> Option<Q> {
        match self {
            LogValue::Finite(q) => Some(*q),
            LogValue::NegInf => None,
        }
    }

    /// `self + t * slope`, with negative infinity absorbing.
    pub fn shifted(&self, delta: Q) -> LogValue {
        match self {
            LogValue::Finite(q) => LogValue::Finite(q + delta),
            LogValue::NegInf => LogValue::NegInf,
        }
    }
}

impl From<Q> for LogValue {
    fn from(q: Q) -> Self {
        LogValue::Finite(q)
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LogValue::NegInf, LogValue::NegInf) => Ordering::Equal,
            (LogValue::NegInf, _) => Ordering::Less,
            (_, LogValue::NegInf) => Ordering::Greater,
            (LogValue::Finite(a), LogValue::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogValue::NegInf => f.write_str("-inf"),
            LogValue::Finite(q) => f.write_str(&format_rational(q)),
        }
    }
}

impl FromStr for LogValue {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-inf" {
            Ok(LogValue::NegInf)
        } else {
            parse_rational(s).map(LogValue::Finite)
        }
    }
}

/// Content (gcd of absolute values) of an integer vector; 0 for the zero vector.
pub fn content(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(&x.abs()))
}

pub fn is_primitive(v: &[i64]) -> bool {
    content(v) == 1
}

/// Splits `v` into `(content, v / content)`; `None` for the zero vector.
pub fn primitivize(v: &[i64]) -> Option<(i64, Vec<i64>)> {
    let g = content(v);
    if g == 0 {
        return None;
    }
    Some((g, v.iter().map(|x| x / g).collect()))
}

pub(crate) fn q_is_positive(q: &Q) -> bool {
    !q.is_zero() && q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_parse() {
        assert_eq!(parse_rational("1/2").unwrap(), Q::new(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), Q::from_integer(-3));
        assert_eq!(parse_rational("0").unwrap(), Q::ZERO);
        for bad in ["2/4", "3/1", "1/-2", "-0", "01", "+1", "1/0", "", "x", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad} accepted");
        }
    }

    #[test]
    fn log_value_order_and_text() {
        assert!(LogValue::NegInf < LogValue::int(-1_000_000));
        assert_eq!("-inf".parse::<LogValue>().unwrap(), LogValue::NegInf);
        assert_eq!(LogValue::Finite(Q::new(-7, 3)).to_string(), "-7/3");
        assert_eq!(LogValue::int(5).to_string(), "5");
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitivize(&[2, -4, 0]), Some((2, vec![1, -2, 0])));
        assert_eq!(primitivize(&[0, 0]), None);
        assert!(is_primitive(&[0, -1]));
        assert!(!is_primitive(&[0, 0]));
    }

    #[test]
    fn lenient_parse_reduces() {
        assert_eq!(parse_rational_lenient("2/4").unwrap(), Q::new(1, 2));
        assert_eq!(parse_rational_lenient(" 5 ").unwrap(), Q::from_integer(5));
        assert!(parse_rational_lenient("1/0").is_err());
    }
}
