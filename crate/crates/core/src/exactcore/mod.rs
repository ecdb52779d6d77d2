//! Exact arithmetic: big integers and rationals, integer and prime-field
//! polynomials, primality, prime search in progressions, and the arithmetic
//! tests used to certify pure radical extensions.

mod poly_fq;
mod poly_z;
mod prime;
mod radical;

pub use poly_fq::{factor_fq_naive, PolyFq};
pub use poly_z::PolyZ;
pub use prime::{find_prime_in_ap, is_prime, next_prime, scan_window, Bound};
pub use radical::{
    dedekind_index_coprime, eisenstein_applicable, fermat_quotient_divides,
    fermat_quotient_residue, pure_radical_discriminant,
};

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Integer = BigInt;
pub type Rational = BigRational;

/// Parses a decimal, scientific or fractional literal ("86.49", "1e-3",
/// "-3/2") into an exact rational.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let s = src.trim();
    let bad = || Error::InvalidInput(format!("not a rational literal: {src:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in {src:?}")));
        }
        return Ok(n / d);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let ten = BigInt::from(10u32);
    let mut q = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Ok(q)
}

/// Formats a rational as "num" or "num/den".
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_integer(src: &str) -> Result<Integer> {
    src.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("not an integer literal: {src:?}")))
}

/// floor(q) as an integer.
pub fn floor(q: &Rational) -> Integer {
    q.numer().div_floor(q.denom())
}

/// Nearest f64 to q (not rounded outward).
pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or_else(|| if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Exact power of a rational to a non-negative integer exponent.
pub fn rational_pow(q: &Rational, e: u32) -> Rational {
    num_traits::pow(q.clone(), e as usize)
}

pub(crate) fn modpow(base: &Integer, exp: &Integer, m: &Integer) -> Integer {
    let b = base.mod_floor(m);
    b.modpow(exp, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_decimal_literals_exactly() {
        assert_eq!(parse_rational("86.49").unwrap(), q(8649, 100));
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-0.5").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("2.5E2").unwrap(), q(250, 1));
        assert_eq!(parse_rational(".25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("1.5/0.5").unwrap(), q(3, 1));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1.2.3", "1/0", "--1", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn format_round_trips() {
        for s in ["7", "-3/2", "8649/100"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
    }

    #[test]
    fn floor_handles_negatives() {
        assert_eq!(floor(&q(-3, 2)), BigInt::from(-2));
        assert_eq!(floor(&q(7, 2)), BigInt::from(3));
    }
}
