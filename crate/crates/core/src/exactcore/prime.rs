use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{floor, format_rational, Integer, Rational};
use crate::error::{Error, Result};
use crate::numerics::bracket::{Bracket, RealExpr};
use crate::numerics::Precision;

const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for all n < 2^64 with the first twelve prime bases.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn strong_probable_prime(n: &BigInt, a: u64) -> bool {
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = BigInt::from(a).modpow(&d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

fn jacobi(a: &BigInt, n: &BigInt) -> i32 {
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut t = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            t = -t;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters (P = 1).
fn strong_lucas(n: &BigInt) -> bool {
    let r = n.sqrt();
    if &r * &r == *n {
        return false;
    }
    let mut dd: i64 = 5;
    loop {
        let j = jacobi(&BigInt::from(dd), n);
        if j == -1 {
            break;
        }
        if j == 0 && BigInt::from(dd.abs()) != *n {
            return false;
        }
        dd = if dd > 0 { -(dd + 2) } else { -dd + 2 };
    }
    let d = BigInt::from(dd);
    let q = BigInt::from((1 - dd) / 4);
    let half = |x: BigInt| -> BigInt {
        let x: BigInt = if x.is_odd() { x + n } else { x };
        let y: BigInt = x >> 1usize;
        y.mod_floor(n)
    };
    let np1: BigInt = n + 1u32;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;
    let (mut u, mut v, mut qk) = (BigInt::one(), BigInt::one(), q.mod_floor(n));
    let bits = k.bits();
    for i in (0..bits - 1).rev() {
        u = (&u * &v).mod_floor(n);
        v = (&v * &v - &qk * 2u32).mod_floor(n);
        qk = (&qk * &qk).mod_floor(n);
        if k.bit(i) {
            let nu = half(&u + &v);
            let nv = half(&d * &u + &v);
            u = nu;
            v = nv;
            qk = (&qk * &q).mod_floor(n);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - &qk * 2u32).mod_floor(n);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(n);
    }
    false
}

/// Primality. Deterministic below 2^64; above, Miller–Rabin on twelve fixed
/// bases followed by a strong Lucas test.
pub fn is_prime(n: &Integer) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if (n % p).is_zero() {
            return false;
        }
    }
    BASES.iter().all(|&a| strong_probable_prime(n, a)) && strong_lucas(n)
}

/// Smallest prime strictly greater than n.
pub fn next_prime(n: &Integer) -> Integer {
    let mut c: BigInt = if n < &BigInt::from(2) { return BigInt::from(2) } else { n + 1u32 };
    if c.is_even() && c != BigInt::from(2) {
        c += 1u32;
    }
    while !is_prime(&c) {
        c += 2u32;
    }
    c
}

/// One side of a search window: a real endpoint and whether it is excluded.
#[derive(Clone, Debug)]
pub struct Bound {
    pub value: RealExpr,
    pub strict: bool,
}

impl Bound {
    pub fn open(value: RealExpr) -> Self {
        Bound { value, strict: true }
    }

    pub fn closed(value: RealExpr) -> Self {
        Bound { value, strict: false }
    }

    /// Bracket narrowed below width 1/4 when the precision ceiling allows.
    fn refined(&self, prec: &Precision) -> Result<Bracket> {
        let quarter = Rational::new(1.into(), 4.into());
        let mut bits = prec.start_bits.max(16);
        loop {
            let b = self.value.bracket(bits)?;
            if b.width() < quarter || bits >= prec.ceiling_bits {
                return Ok(b);
            }
            bits = (bits * 2).min(prec.ceiling_bits);
        }
    }

    fn decide(&self, c: &Integer, cached: &Bracket, prec: &Precision) -> Result<Ordering> {
        let q = Rational::from_integer(c.clone());
        if cached.hi < q {
            return Ok(Ordering::Less);
        }
        if cached.lo > q {
            return Ok(Ordering::Greater);
        }
        self.value.compare_integer(c, prec)
    }

    fn admits_above(&self, c: &Integer, cached: &Bracket, prec: &Precision) -> Result<bool> {
        let ord = self.decide(c, cached, prec)?;
        Ok(ord == Ordering::Less || (!self.strict && ord == Ordering::Equal))
    }

    fn admits_below(&self, c: &Integer, cached: &Bracket, prec: &Precision) -> Result<bool> {
        let ord = self.decide(c, cached, prec)?;
        Ok(ord == Ordering::Greater || (!self.strict && ord == Ordering::Equal))
    }
}

/// Scans the progression a (mod m) upward from the lower bound and returns the
/// first prime inside the window accepted by `accept`. Endpoint membership is
/// decided exactly; `upper = None` scans without limit.
pub fn scan_window(
    lower: &Bound,
    upper: Option<&Bound>,
    a: &Integer,
    m: &Integer,
    accept: &dyn Fn(&Integer) -> bool,
    prec: &Precision,
) -> Result<Option<Integer>> {
    if !m.is_positive() {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let lb = lower.refined(prec)?;
    let ub = upper.map(|u| u.refined(prec)).transpose()?;
    let start = floor(&lb.lo).max(BigInt::zero());
    let mut c = &start + (a - &start).mod_floor(m);
    // Skip candidates at or below the lower endpoint.
    while !lower.admits_above(&c, &lb, prec)? {
        c += m;
    }
    loop {
        if let (Some(u), Some(ub)) = (upper, &ub) {
            if !u.admits_below(&c, ub, prec)? {
                return Ok(None);
            }
        }
        if is_prime(&c) && accept(&c) {
            return Ok(Some(c));
        }
        c += m;
    }
}

/// Smallest prime p with lo < p < hi, p ≡ a (mod m) and p not excluded.
pub fn find_prime_in_ap(
    lo: &Rational,
    hi: &Rational,
    a: &Integer,
    m: &Integer,
    exclude: &BTreeSet<Integer>,
) -> Result<Integer> {
    if !lo.is_positive() || lo >= hi {
        return Err(Error::InvalidInput("need 0 < lo < hi".into()));
    }
    if !m.is_positive() || a.is_negative() || a >= m {
        return Err(Error::InvalidInput("need 0 <= a < m".into()));
    }
    if !a.gcd(m).is_one() {
        return Err(Error::InvalidInput(format!("gcd({a}, {m}) != 1")));
    }
    let lower = Bound::open(RealExpr::Const(lo.clone()));
    let upper = Bound::open(RealExpr::Const(hi.clone()));
    let accept = |p: &Integer| !exclude.contains(p);
    scan_window(&lower, Some(&upper), a, m, &accept, &Precision::default())?.ok_or_else(|| {
        Error::NotFound {
            lo: format_rational(lo),
            hi: format_rational(hi),
            a: a.to_string(),
            m: m.to_string(),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn matches_trial_division_below_ten_thousand() {
        for n in 0..10_000u64 {
            assert_eq!(is_prime(&n.into()), trial(n), "{n}");
        }
    }

    #[test]
    fn known_large_values() {
        let m61: BigInt = (BigInt::one() << 61) - 1;
        assert!(is_prime(&m61));
        let m127: BigInt = (BigInt::one() << 127) - 1;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m127 * &m61)));
        // Strong pseudoprime to every base up to 23.
        let spsp: BigInt = "3825123056546413051".parse().unwrap();
        assert!(!is_prime(&spsp));
        let p = "170141183460469231731687303715884105727".parse::<BigInt>().unwrap();
        assert!(is_prime(&p));
        assert!(!is_prime(&(&p * 3u32)));
        // Square of a large prime.
        assert!(!is_prime(&(&m61 * &m61)));
    }

    #[test]
    fn lucas_alone_agrees_with_trial_division() {
        for n in (5..5000u64).step_by(2) {
            let r = (n as f64).sqrt() as u64;
            if r * r == n {
                assert!(!strong_lucas(&n.into()));
                continue;
            }
            if trial(n) {
                assert!(strong_lucas(&n.into()), "{n}");
            }
        }
    }

    #[test]
    fn next_prime_steps() {
        assert_eq!(next_prime(&0.into()), 2.into());
        assert_eq!(next_prime(&2.into()), 3.into());
        assert_eq!(next_prime(&13.into()), 17.into());
        assert_eq!(next_prime(&7919.into()), 7927.into());
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn progression_search_examples() {
        let none = BTreeSet::new();
        let lo = q(8649, 100);
        assert_eq!(find_prime_in_ap(&lo, &q(173, 1), &10.into(), &121.into(), &none).unwrap(), 131.into());
        assert_eq!(find_prime_in_ap(&q(128, 1), &q(256, 1), &6.into(), &49.into(), &none).unwrap(), 251.into());
        assert!(matches!(
            find_prime_in_ap(&q(2, 1), &q(3, 1), &1.into(), &2.into(), &none),
            Err(Error::NotFound { .. })
        ));
        // Open endpoints: 131 itself is excluded as a lower bound.
        assert_ne!(find_prime_in_ap(&q(131, 1), &q(1000, 1), &10.into(), &121.into(), &none).unwrap(), 131.into());
        let ex: BTreeSet<Integer> = [BigInt::from(251)].into_iter().collect();
        assert!(find_prime_in_ap(&q(128, 1), &q(256, 1), &6.into(), &49.into(), &ex).is_err());
    }

    #[test]
    fn rejects_bad_progressions() {
        let none = BTreeSet::new();
        assert!(find_prime_in_ap(&q(1, 1), &q(100, 1), &2.into(), &4.into(), &none).is_err());
        assert!(find_prime_in_ap(&q(5, 1), &q(1, 1), &1.into(), &2.into(), &none).is_err());
    }

    #[test]
    fn transcendental_window() {
        // (e^10, 2e^10) ≈ (22026.47, 44052.93)
        let e10 = RealExpr::integer(10).exp();
        let lower = Bound::open(e10.clone());
        let upper = Bound::open(RealExpr::integer(2).mul(e10));
        let p = scan_window(&lower, Some(&upper), &0.into(), &1.into(), &|_| true, &Precision::default())
            .unwrap()
            .unwrap();
        assert_eq!(p, 22027.into());
    }
}
