//! Helpers for exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Error;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parses `"a"`, `"a/b"` or a JSON integer. Decimals are rejected.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator: {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn ceil_int(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_u64(x: &Rat) -> u64 {
    ceil_int(x).to_u64().unwrap_or(u64::MAX)
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn pow2(j: i64) -> Rat {
    if j >= 0 {
        Rat::from_integer(BigInt::one() << (j as usize))
    } else {
        Rat::new(BigInt::one(), BigInt::one() << ((-j) as usize))
    }
}

/// Smallest `j` with `2^j >= x`, for `x > 0`.
pub fn ceil_log2(x: &Rat) -> i64 {
    assert!(x.is_positive(), "ceil_log2 of non-positive value");
    let mut j = floor_log2(x);
    if pow2(j) < *x {
        j += 1;
    }
    j
}

/// Largest `j` with `2^j <= x`, for `x > 0`.
pub fn floor_log2(x: &Rat) -> i64 {
    assert!(x.is_positive(), "floor_log2 of non-positive value");
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    let mut j = n - d;
    while pow2(j) > *x {
        j -= 1;
    }
    while pow2(j + 1) <= *x {
        j += 1;
    }
    j
}

pub fn round_up_pow2(x: &Rat) -> Rat {
    pow2(ceil_log2(x))
}

/// Smallest `i >= 0` with `b^i >= x`, for `x >= 1` and `b >= 2`.
pub fn ceil_log_base(x: &Rat, b: u64) -> u32 {
    let b = Rat::from_integer(BigInt::from(b));
    let mut p = Rat::one();
    let mut i = 0;
    while p < *x {
        p *= &b;
        i += 1;
    }
    i
}

pub fn pow_base(b: u64, i: u32) -> Rat {
    Rat::from_integer(BigInt::from(b).pow(i))
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn max_rat<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Rat {
    xs.into_iter()
        .fold(Rat::zero(), |m, x| if *x > m { x.clone() } else { m })
}

/// `log2` of a positive count, as used by trial counts and bounds.
pub fn log2f(n: f64) -> f64 {
    if n <= 1.0 {
        0.0
    } else {
        n.log2()
    }
}

/// Serde adapter writing rationals as `"n/d"` strings.
pub mod serde_str {
    use super::{fmt_rat, parse_rat};
    use crate::netcore::Rat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("6/4").unwrap(), frac(3, 2));
        assert_eq!(fmt_rat(&frac(3, 2)), "3/2");
        assert_eq!(fmt_rat(&rat(4)), "4");
        assert!(parse_rat("1.5").is_err());
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(&rat(1)), 0);
        assert_eq!(ceil_log2(&rat(3)), 2);
        assert_eq!(ceil_log2(&frac(1, 6)), -2);
        assert_eq!(floor_log2(&frac(1, 6)), -3);
        assert_eq!(floor_log2(&rat(8)), 3);
        assert_eq!(round_up_pow2(&rat(5)), rat(8));
        assert_eq!(ceil_log_base(&rat(5), 2), 3);
        assert_eq!(ceil_log_base(&rat(1), 7), 0);
    }
}
