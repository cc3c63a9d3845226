//! Small helpers for exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Exact rational from an integer.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational `n / d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"3/4"` or a decimal like `"0.25"` into an exact rational.
///
/// Decimal literals are exact: `"0.1"` parses to 1/10, not to the nearest
/// binary float.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| malformed())?;
        let d: BigInt = den.trim().parse().map_err(|_| malformed())?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let negative = whole.trim_start().starts_with('-');
        let w: BigInt = if whole == "-" || whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| malformed())?
        };
        let digits: BigInt = frac.parse().map_err(|_| malformed())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigRational::new(digits, scale);
        let whole_part = BigRational::from_integer(w);
        return Ok(if negative {
            whole_part - frac_part
        } else {
            whole_part + frac_part
        });
    }
    let n: BigInt = s.parse().map_err(|_| malformed())?;
    Ok(BigRational::from_integer(n))
}

/// Rational to f64, for display and tolerance comparisons only.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// True if `r` is strictly positive.
pub fn is_positive(r: &BigRational) -> bool {
    r.is_positive()
}

/// The constant one, handy with fold-style sums.
pub fn one() -> BigRational {
    BigRational::one()
}
