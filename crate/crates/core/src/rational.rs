//! Exact rationals and their text forms.
//!
//! Every probability, bias and distance in the crate is a [`Rational`]. The
//! canonical text form is always `"p/q"` with `q > 0` and `gcd(p, q) = 1`,
//! including integers (`"1/1"`, `"0/1"`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn pow2(exp: u64) -> BigInt {
    BigInt::one() << exp
}

/// `num / 2^exp`, reduced.
pub fn dyadic(num: impl Into<BigInt>, exp: u64) -> Rational {
    Rational::new(num.into(), pow2(exp))
}

/// `2^{-exp}`.
pub fn inv_pow2(exp: u64) -> Rational {
    dyadic(1, exp)
}

/// True when the reduced denominator is a power of two.
pub fn is_dyadic(x: &Rational) -> bool {
    let d = x.denom();
    let mag = d.magnitude();
    mag.count_ones() == 1
}

pub fn format(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("expected a rational \"p/q\", got {text:?}"),
    };
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Parse {
            pos: 0,
            msg: "zero denominator".into(),
        });
    }
    Ok(Rational::new(p, q))
}

/// Decimal rendering rounded half away from zero to `digits` places.
pub fn decimal(x: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = x.abs() * Rational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = &scaled - Rational::from_integer(floor.clone());
    let rounded = if frac >= ratio(1, 2) { floor + 1 } else { floor };
    let (whole, rest) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !(whole.is_zero() && rest.is_zero()) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{:0>width$}", rest.to_string(), width = digits)
}

/// Smallest `n >= 0` with `2^n >= x` for a positive rational `x`.
pub fn ceil_log2(x: &Rational) -> u64 {
    assert!(x.is_positive(), "ceil_log2 of a non-positive rational");
    let p = x.numer().magnitude().clone();
    let q = x.denom().magnitude().clone();
    if p <= q {
        return 0;
    }
    // 2^n * q >= p
    let mut n = p.bits().saturating_sub(q.bits());
    while (q.clone() << n) < p {
        n += 1;
    }
    while n > 0 && (q.clone() << (n - 1)) >= p {
        n -= 1;
    }
    n
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in ["1/3", "-5/16", "0/1", "7/1"] {
            assert_eq!(format(&parse(s).unwrap()), s);
        }
        assert_eq!(format(&parse("4/8").unwrap()), "1/2");
        assert_eq!(format(&parse("3").unwrap()), "3/1");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal(&ratio(1, 3), 12), "0.333333333333");
        assert_eq!(decimal(&ratio(2, 3), 12), "0.666666666667");
        assert_eq!(decimal(&ratio(-1, 8), 3), "-0.125");
        assert_eq!(decimal(&int(2), 2), "2.00");
    }

    #[test]
    fn dyadic_detection() {
        assert!(is_dyadic(&ratio(43, 128)));
        assert!(is_dyadic(&int(1)));
        assert!(!is_dyadic(&ratio(1, 3)));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&int(2)), 1);
        assert_eq!(ceil_log2(&int(3)), 2);
        assert_eq!(ceil_log2(&ratio(1, 2)), 0);
        assert_eq!(ceil_log2(&int(1024)), 10);
        assert_eq!(ceil_log2(&int(1025)), 11);
    }
}
