use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

pub type Q = Ratio<i128>;
pub type BigQ = BigRational;

/// Parses `0.05`, `1/20`, `3` or `1e-3` exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i128 = a.trim().parse().map_err(|_| bad())?;
        let b: i128 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Q::new(a, b));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let mut num: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let mut den: i128 = 10i128.checked_pow(fp.len() as u32).ok_or_else(bad)?;
    if exp >= 0 {
        num = num
            .checked_mul(10i128.checked_pow(exp as u32).ok_or_else(bad)?)
            .ok_or_else(bad)?;
    } else {
        den = den
            .checked_mul(10i128.checked_pow((-exp) as u32).ok_or_else(bad)?)
            .ok_or_else(bad)?;
    }
    if neg {
        num = -num;
    }
    Ok(Q::new(num, den))
}

pub fn fmt_q(q: &Q) -> String {
    if *q.denom() == 1 {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn big(q: &Q) -> BigQ {
    BigQ::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

pub fn big_int(x: i128) -> BigQ {
    BigQ::from_integer(BigInt::from(x))
}

pub fn big_frac(a: i128, b: i128) -> BigQ {
    if b == 0 {
        BigQ::zero()
    } else {
        BigQ::new(BigInt::from(a), BigInt::from(b))
    }
}

pub fn big_one() -> BigQ {
    BigQ::one()
}
