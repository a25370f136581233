//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn qi(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Accepts `p/q` or a plain integer, with optional sign and surrounding spaces.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Canonical `p/q` text; integers print without a denominator.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow(r: &BigRational, k: u32) -> BigRational {
    num_traits::pow(r.clone(), k as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-4323/169").unwrap(), q(-4323, 169));
        assert_eq!(parse_rational(" 12 ").unwrap(), qi(12));
        assert_eq!(parse_rational("6/4").unwrap(), q(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(fmt_rational(&q(-6, 4)), "-3/2");
        assert_eq!(fmt_rational(&qi(7)), "7");
    }
}
