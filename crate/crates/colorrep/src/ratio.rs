//! Exact rational scalars.
//!
//! Everything that decides anything in this crate is a `Ratio` (an arbitrary
//! precision rational). Floats only appear in the asymptotic diagnostics of
//! [`crate::limits`], and those are clearly marked.

use crate::error::{Error, Result};
use num::bigint::Sign;
use num::{BigInt, BigRational, One, Zero};
use std::str::FromStr;

pub type Ratio = BigRational;

/// `n/d` as a `Ratio`. Panics on `d = 0`.
pub fn ratio(n: i64, d: i64) -> Ratio {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

/// Integer power with negative exponents allowed (base must be nonzero then).
pub fn pow(base: &Ratio, exp: i64) -> Ratio {
    base.pow(exp as i32)
}

/// Parses `"p/q"` or a plain integer. Decimal floats are rejected: exact-mode
/// flags must stay exact.
pub fn parse_ratio(s: &str) -> Result<Ratio> {
    let s = s.trim();
    if s.contains('.') || s.contains(['e', 'E']) {
        return Err(Error::validation(format!(
            "`{s}` looks like a float; exact flags take integers or p/q"
        )));
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim())
                .map_err(|e| Error::validation(format!("bad numerator `{p}`: {e}")))?;
            let q = BigInt::from_str(q.trim())
                .map_err(|e| Error::validation(format!("bad denominator `{q}`: {e}")))?;
            if q.is_zero() {
                return Err(Error::validation("zero denominator"));
            }
            Ok(Ratio::new(p, q))
        }
        None => {
            let p = BigInt::from_str(s)
                .map_err(|e| Error::validation(format!("bad rational `{s}`: {e}")))?;
            Ok(Ratio::from_integer(p))
        }
    }
}

/// Canonical text form used in all JSON/CSV output: `"p/q"`, or `"p"` when the
/// denominator is one. This is exactly what `Display` prints.
pub fn format_ratio(r: &Ratio) -> String {
    r.to_string()
}

/// Sign as -1, 0, +1.
pub fn sign(r: &Ratio) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn is_zero(r: &Ratio) -> bool {
    r.is_zero()
}

pub fn zero() -> Ratio {
    Ratio::zero()
}

pub fn one() -> Ratio {
    Ratio::one()
}

/// Binomial coefficient as a `Ratio`.
pub fn binomial(n: usize, k: usize) -> Ratio {
    Ratio::from_integer(binomial_int(n, k))
}

pub fn binomial_int(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Falling factorial (n)_m = n(n-1)...(n-m+1).
pub fn falling(n: usize, m: usize) -> Ratio {
    let mut r = Ratio::one();
    for i in 0..m {
        r *= int(n as i64 - i as i64);
    }
    r
}

/// Lossy conversion for diagnostic output only.
pub fn to_f64(r: &Ratio) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
