//! Scalar abstraction for feature values and cut thresholds.
//!
//! Everything in this crate that touches a feature value goes through the
//! [`Scalar`] trait: routing comparisons, threshold midpoints, the one-step
//! offsets used by domain reduction, and the exact `num/den` strings in the
//! tree file format. The solvers only ever need a *total order* plus those
//! few constructions, so the algorithms are generic.
//!
//! The default instantiation (see the crate-root aliases) is [`Rat`], an
//! exact `i64` rational. Exactness is not optional for correctness work:
//! generated instances use half-integer thresholds, and a float comparison
//! that rounds the wrong way silently misroutes examples. The `f64`/`f32`
//! impls exist for callers who want cheap approximate pipelines and accept
//! that parsing may round; all comparisons remain internally consistent.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, One, Zero};
use thiserror::Error;

/// Exact rational scalar used by the default type aliases.
pub type Rat = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarParseError {
    #[error("empty numeric field")]
    Empty,
    #[error("cannot parse {0:?} as a decimal number")]
    BadDecimal(String),
    #[error("cannot parse {0:?} as a fraction (expected \"num/den\")")]
    BadFraction(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-finite value {0:?}")]
    NonFinite(String),
}

/// A totally ordered scalar usable as a feature value or cut threshold.
///
/// `Key` is a hashable proxy for the value (rationals hash their normalized
/// numerator/denominator pair, floats their bit pattern); it exists because
/// the raw float types are not `Eq`/`Hash` but memo tables and structural
/// tree keys need both.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Key: Hash + Eq + Ord + Clone + fmt::Debug + Send + Sync;

    fn total_cmp(&self, other: &Self) -> Ordering;
    fn key(&self) -> Self::Key;

    /// Exact midpoint `(a + b) / 2`; used for separating thresholds.
    fn midpoint(a: &Self, b: &Self) -> Self;
    /// `self - 1`, a representative strictly below any threshold `>= self`.
    fn one_below(&self) -> Self;
    /// `self + 1`, a representative strictly above any threshold `<= self`.
    fn one_above(&self) -> Self;
    fn from_int(v: i64) -> Self;

    /// Parse a CSV cell. Decimal numerals are the expected form; `a/b`
    /// fractions are accepted too so that exact values survive a round trip
    /// through our own writers.
    fn parse_cell(text: &str) -> Result<Self, ScalarParseError>;
    /// Parse the `num/den` threshold form of the tree file format. A bare
    /// integer is accepted as `n/1`.
    fn parse_fraction(text: &str) -> Result<Self, ScalarParseError>;
    /// Format as `num/den`, always with an explicit denominator.
    fn format_fraction(&self) -> String;
    /// Format for a CSV cell so `parse_cell` round-trips the exact value.
    /// Prefers a finite decimal when one exists.
    fn format_cell(&self) -> String;
}

fn split_fraction(text: &str) -> Option<(&str, &str)> {
    let mut it = text.splitn(2, '/');
    let n = it.next()?;
    let d = it.next()?;
    Some((n.trim(), d.trim()))
}

/// Parse a decimal numeral like `-12.375` into an exact `(numer, denom)`
/// pair by scaling out the fractional digits.
fn parse_decimal_exact(text: &str) -> Result<(i64, i64), ScalarParseError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(ScalarParseError::Empty);
    }
    let bad = || ScalarParseError::BadDecimal(text.to_string());
    let (sign, rest) = match t.as_bytes()[0] {
        b'-' => (-1i64, &t[1..]),
        b'+' => (1, &t[1..]),
        _ => (1, t),
    };
    let (int_part, frac_part) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let mut numer: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let mut denom: i64 = 1;
    for b in frac_part.bytes() {
        numer = numer.checked_mul(10).ok_or_else(bad)?;
        numer = numer.checked_add((b - b'0') as i64).ok_or_else(bad)?;
        denom = denom.checked_mul(10).ok_or_else(bad)?;
    }
    Ok((sign * numer, denom))
}

impl Scalar for Rat {
    type Key = (i64, i64);

    fn total_cmp(&self, other: &Self) -> Ordering {
        Ord::cmp(self, other)
    }

    fn key(&self) -> Self::Key {
        (*self.numer(), *self.denom())
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        (a + b) / Rat::from_int(2)
    }

    fn one_below(&self) -> Self {
        self - Rat::one()
    }

    fn one_above(&self) -> Self {
        self + Rat::one()
    }

    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn parse_cell(text: &str) -> Result<Self, ScalarParseError> {
        if let Some((n, d)) = split_fraction(text) {
            let numer: i64 = n
                .parse()
                .map_err(|_| ScalarParseError::BadFraction(text.to_string()))?;
            let denom: i64 = d
                .parse()
                .map_err(|_| ScalarParseError::BadFraction(text.to_string()))?;
            if denom == 0 {
                return Err(ScalarParseError::ZeroDenominator(text.to_string()));
            }
            return Ok(Ratio::new(numer, denom));
        }
        let (n, d) = parse_decimal_exact(text)?;
        Ok(Ratio::new(n, d))
    }

    fn parse_fraction(text: &str) -> Result<Self, ScalarParseError> {
        match split_fraction(text) {
            Some(_) => Self::parse_cell(text),
            None => {
                let n: i64 = text
                    .trim()
                    .parse()
                    .map_err(|_| ScalarParseError::BadFraction(text.to_string()))?;
                Ok(Ratio::from_integer(n))
            }
        }
    }

    fn format_fraction(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn format_cell(&self) -> String {
        // A rational has a finite decimal expansion iff its reduced
        // denominator is 2^a * 5^b. Everything we produce ourselves
        // (decimal inputs, midpoints) stays in that family.
        let mut den = *self.denom();
        let mut pow2 = 0u32;
        let mut pow5 = 0u32;
        while den % 2 == 0 {
            den /= 2;
            pow2 += 1;
        }
        while den % 5 == 0 {
            den /= 5;
            pow5 += 1;
        }
        if den != 1 {
            return self.format_fraction();
        }
        // Scale to denominator 10^k with k = max(pow2, pow5); the reduced
        // denominator divides 10^k exactly.
        let k = pow2.max(pow5);
        let numer = self.numer() * (10i64.pow(k) / self.denom());
        if k == 0 {
            return format!("{}", numer);
        }
        let sign = if numer < 0 { "-" } else { "" };
        let mag = numer.unsigned_abs();
        let base = 10u64.pow(k);
        let int = mag / base;
        let frac = mag % base;
        format!("{}{}.{:0width$}", sign, int, frac, width = k as usize)
    }
}

/// Exact dyadic fraction of a finite float, via a big rational.
fn float_fraction(v: f64) -> String {
    let r = BigRational::from_float(v).unwrap_or_else(BigRational::zero);
    format!("{}/{}", r.numer(), r.denom())
}

fn float_parse_fraction(text: &str) -> Result<f64, ScalarParseError> {
    match split_fraction(text) {
        Some((n, d)) => {
            let numer: BigInt = n
                .parse()
                .map_err(|_| ScalarParseError::BadFraction(text.to_string()))?;
            let denom: BigInt = d
                .parse()
                .map_err(|_| ScalarParseError::BadFraction(text.to_string()))?;
            if denom.is_zero() {
                return Err(ScalarParseError::ZeroDenominator(text.to_string()));
            }
            let q = BigRational::new(numer, denom);
            // Rounded conversion; the float instantiations are approximate
            // by design.
            let n_f = q.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
            let d_f = q.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
            let v = n_f / d_f;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(ScalarParseError::NonFinite(text.to_string()))
            }
        }
        None => {
            let v: f64 = text
                .trim()
                .parse()
                .map_err(|_| ScalarParseError::BadFraction(text.to_string()))?;
            Ok(v)
        }
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Key = u64;

            fn total_cmp(&self, other: &Self) -> Ordering {
                <$t>::total_cmp(self, other)
            }

            fn key(&self) -> Self::Key {
                // Collapse -0.0 to 0.0 so equal values share a key.
                let v = if *self == 0.0 { 0.0 } else { *self };
                (v as f64).to_bits()
            }

            fn midpoint(a: &Self, b: &Self) -> Self {
                (a + b) / 2.0
            }

            fn one_below(&self) -> Self {
                self - 1.0
            }

            fn one_above(&self) -> Self {
                self + 1.0
            }

            fn from_int(v: i64) -> Self {
                v as $t
            }

            fn parse_cell(text: &str) -> Result<Self, ScalarParseError> {
                let v = float_parse_fraction(text)? as $t;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(ScalarParseError::NonFinite(text.to_string()))
                }
            }

            fn parse_fraction(text: &str) -> Result<Self, ScalarParseError> {
                Self::parse_cell(text)
            }

            fn format_fraction(&self) -> String {
                float_fraction(*self as f64)
            }

            fn format_cell(&self) -> String {
                format!("{:?}", self)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// One side of a half-open interval `(lo, hi]`, with infinities so the
/// untouched sides of a box admit everything.
#[derive(Debug, Clone)]
pub enum Bound<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> Bound<S> {
    pub fn as_finite(&self) -> Option<&S> {
        match self {
            Bound::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, Bound::NegInf)
    }

    pub fn is_pos_inf(&self) -> bool {
        matches!(self, Bound::PosInf)
    }

    /// Strictly below a value, i.e. usable as an open lower bound.
    pub fn below(&self, v: &S) -> bool {
        match self {
            Bound::NegInf => true,
            Bound::Finite(b) => b.total_cmp(v) == Ordering::Less,
            Bound::PosInf => false,
        }
    }

    /// At or above a value, i.e. usable as a closed upper bound.
    pub fn at_or_above(&self, v: &S) -> bool {
        match self {
            Bound::NegInf => false,
            Bound::Finite(b) => b.total_cmp(v) != Ordering::Less,
            Bound::PosInf => true,
        }
    }
}

impl<S: Scalar> PartialEq for Bound<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Bound<S> {}

impl<S: Scalar> PartialOrd for Bound<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Bound<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        use Bound::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }
}

impl<S: Scalar> Hash for Bound<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Bound::NegInf => 0u8.hash(state),
            Bound::Finite(v) => {
                1u8.hash(state);
                v.key().hash(state);
            }
            Bound::PosInf => 2u8.hash(state),
        }
    }
}

impl<S: Scalar> fmt::Display for Bound<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::Finite(v) => write!(f, "{}", v),
            Bound::PosInf => write!(f, "+inf"),
        }
    }
}
