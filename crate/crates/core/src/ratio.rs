//! Exact rational helpers: construction shortcuts and the canonical
//! "num/den" string form used by every JSON surface of the crate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// q^k for possibly negative k.
pub fn q_pow(base: u64, exp: i64) -> Q {
    let b = BigInt::from(base);
    if exp >= 0 {
        BigRational::from_integer(b.pow(exp as u32))
    } else {
        BigRational::new(BigInt::one(), b.pow((-exp) as u32))
    }
}

/// Canonical string: integers render without denominator, otherwise "n/d"
/// with d > 0 and the fraction reduced.
pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_from_string(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Schema(format!("bad rational '{s}': {e}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Schema(format!("bad rational '{s}': zero denominator")));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
    }
}

pub fn is_nonneg(x: &Q) -> bool {
    !x.is_negative()
}
