//! Rigorous rational brackets for real constants built from rationals with
//! `+`, `*`, `exp` and `ln`. Used wherever a strict inequality against an
//! integer has to be decided exactly (prime windows with transcendental
//! endpoints).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Precision, RealInterval};
use crate::error::{Error, Result};
use crate::exactcore::{Integer, Rational};

/// Closed rational interval known to contain a real number.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bracket {
    pub fn point(q: Rational) -> Self {
        Bracket { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    fn add(&self, o: &Bracket) -> Bracket {
        Bracket { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn mul(&self, o: &Bracket) -> Bracket {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Bracket { lo, hi }
    }

    /// Outward-rounded f64 enclosure.
    pub fn to_interval(&self) -> RealInterval {
        RealInterval::from_rationals(&self.lo, &self.hi)
    }
}

/// A real constant expression with exact leaves.
#[derive(Clone, Debug, PartialEq)]
pub enum RealExpr {
    Const(Rational),
    Add(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
    Exp(Box<RealExpr>),
    Ln(Box<RealExpr>),
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealExpr::Const(q) => write!(f, "{}", crate::exactcore::format_rational(q)),
            RealExpr::Add(a, b) => write!(f, "({a} + {b})"),
            RealExpr::Mul(a, b) => write!(f, "{a}*{b}"),
            RealExpr::Exp(a) => write!(f, "exp({a})"),
            RealExpr::Ln(a) => write!(f, "ln({a})"),
        }
    }
}

impl RealExpr {
    pub fn constant(q: Rational) -> Self {
        RealExpr::Const(q)
    }

    pub fn integer(n: i64) -> Self {
        RealExpr::Const(Rational::from_integer(n.into()))
    }

    pub fn add(self, o: RealExpr) -> Self {
        RealExpr::Add(Box::new(self), Box::new(o))
    }

    pub fn mul(self, o: RealExpr) -> Self {
        RealExpr::Mul(Box::new(self), Box::new(o))
    }

    pub fn exp(self) -> Self {
        RealExpr::Exp(Box::new(self))
    }

    pub fn ln(self) -> Self {
        RealExpr::Ln(Box::new(self))
    }

    /// `base^exponent` for a positive rational base; exact when the exponent
    /// is an integer.
    pub fn pow(base: Rational, exponent: Rational) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::InvalidInput("power of a non-positive base".into()));
        }
        if exponent.is_integer() {
            let e = exponent.to_integer();
            let n = e.abs().to_u32().ok_or_else(|| Error::InvalidInput("exponent too large".into()))?;
            let p = crate::exactcore::rational_pow(&base, n);
            return Ok(RealExpr::Const(if e.is_negative() { p.recip() } else { p }));
        }
        // Rational results such as 4^(1/2) are kept exact.
        if let Some(k) = exponent.denom().to_u32() {
            let (n, d) = (base.numer(), base.denom());
            let (rn, rd) = (n.nth_root(k), d.nth_root(k));
            if rn.pow(k) == *n && rd.pow(k) == *d {
                let root = Rational::new(rn, rd);
                return RealExpr::pow(root, Rational::from_integer(exponent.numer().clone()));
            }
        }
        Ok(RealExpr::Const(exponent).mul(RealExpr::Const(base).ln()).exp())
    }

    /// The exact value when it is rational by construction.
    pub fn exact(&self) -> Option<Rational> {
        match self {
            RealExpr::Const(q) => Some(q.clone()),
            RealExpr::Add(a, b) => Some(a.exact()? + b.exact()?),
            RealExpr::Mul(a, b) => {
                let (x, y) = (a.exact(), b.exact());
                match (x, y) {
                    (Some(x), _) if x.is_zero() => Some(x),
                    (_, Some(y)) if y.is_zero() => Some(y),
                    (Some(x), Some(y)) => Some(x * y),
                    _ => None,
                }
            }
            RealExpr::Exp(a) => a.exact().filter(|x| x.is_zero()).map(|_| Rational::one()),
            RealExpr::Ln(a) => a.exact().filter(|x| x.is_one()).map(|_| Rational::zero()),
        }
    }

    /// Bracket at `bits` bits of absolute working precision.
    pub fn bracket(&self, bits: u32) -> Result<Bracket> {
        if let Some(q) = self.exact() {
            return Ok(Bracket::point(q));
        }
        match self {
            RealExpr::Const(q) => Ok(Bracket::point(q.clone())),
            RealExpr::Add(a, b) => Ok(a.bracket(bits)?.add(&b.bracket(bits)?)),
            RealExpr::Mul(a, b) => Ok(a.bracket(bits)?.mul(&b.bracket(bits)?)),
            RealExpr::Exp(a) => {
                let x = a.bracket(bits)?;
                Ok(Bracket { lo: exp_bracket(&x.lo, bits)?.lo, hi: exp_bracket(&x.hi, bits)?.hi })
            }
            RealExpr::Ln(a) => {
                let x = a.bracket(bits)?;
                if !x.lo.is_positive() {
                    return Err(Error::PrecisionFailure(format!("cannot separate {a} from zero")));
                }
                Ok(Bracket { lo: ln_bracket(&x.lo, bits)?.lo, hi: ln_bracket(&x.hi, bits)?.hi })
            }
        }
    }

    /// Outward f64 enclosure at the starting precision.
    pub fn to_interval(&self, prec: &Precision) -> Result<RealInterval> {
        Ok(self.bracket(prec.start_bits)?.to_interval())
    }

    /// Decides the sign of `self - n`, refining until the bracket excludes `n`.
    pub fn compare_integer(&self, n: &Integer, prec: &Precision) -> Result<Ordering> {
        let nq = Rational::from_integer(n.clone());
        self.compare_rational(&nq, prec)
    }

    pub fn compare_rational(&self, q: &Rational, prec: &Precision) -> Result<Ordering> {
        if let Some(v) = self.exact() {
            return Ok(v.cmp(q));
        }
        let mut bits = prec.start_bits.max(16);
        loop {
            let b = self.bracket(bits)?;
            if &b.lo > q {
                return Ok(Ordering::Greater);
            }
            if &b.hi < q {
                return Ok(Ordering::Less);
            }
            if bits >= prec.ceiling_bits {
                return Err(Error::PrecisionFailure(format!(
                    "{self} could not be separated from {} within {} bits",
                    crate::exactcore::format_rational(q),
                    prec.ceiling_bits
                )));
            }
            bits = (bits * 2).min(prec.ceiling_bits);
        }
    }
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

fn dyadic(m: BigInt, scale: u64) -> Rational {
    Rational::new(m, pow2(scale))
}

fn floor_scaled(q: &Rational, scale: u64) -> BigInt {
    (q.numer() << scale).div_floor(q.denom())
}

fn ceil_scaled(q: &Rational, scale: u64) -> BigInt {
    -((-q.numer() << scale).div_floor(q.denom()))
}

/// Bracket for exp(x) with roughly `bits` bits after the binary point.
pub fn exp_bracket(x: &Rational, bits: u32) -> Result<Bracket> {
    if x.is_zero() {
        return Ok(Bracket::point(Rational::one()));
    }
    let xf = x.to_f64().unwrap_or(f64::INFINITY);
    if !(xf.abs() < 1.0e6) {
        return Err(Error::PrecisionFailure(format!("exp argument {xf} out of range")));
    }
    // Halve until |y| <= 1/2.
    let mut k: u32 = 0;
    let half = Rational::new(1.into(), 2.into());
    let mut y = x.clone();
    while y.abs() > half {
        y /= Rational::from_integer(2.into());
        k += 1;
    }
    let growth = (xf.max(0.0) * std::f64::consts::LOG2_E).ceil() as u64;
    let w: u64 = bits as u64 + k as u64 + growth + 24;

    // Number of Taylor terms: tail 2 (1/2)^(N+1) / (N+1)! < 2^-w.
    let mut n_terms: u64 = 1;
    let mut log2_tail = 1.0 - 2.0; // log2(2 * (1/2)^2 / 2!)
    while log2_tail > -(w as f64) - 2.0 {
        n_terms += 1;
        log2_tail += -1.0 - ((n_terms + 1) as f64).log2();
    }

    let (a, b) = (y.numer().clone(), y.denom().clone());
    let one = pow2(w);
    let mut term = one.clone();
    let mut sum = one;
    for n in 1..=n_terms {
        // Truncation toward zero: error of term n is at most n ulps.
        term = (&term * &a) / (&b * BigInt::from(n));
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    let err = BigInt::from(n_terms * (n_terms + 1) / 2 + 2);
    let mut lo = dyadic(&sum - &err, w);
    let mut hi = dyadic(&sum + &err, w);
    if !lo.is_positive() {
        lo = Rational::new(1.into(), 2.into());
    }
    for _ in 0..k {
        lo = dyadic(floor_scaled(&(&lo * &lo), w), w);
        hi = dyadic(ceil_scaled(&(&hi * &hi), w), w);
    }
    Ok(Bracket { lo, hi })
}

/// Fixed-point atanh(a/b) for 0 <= a/b <= 1/3; returns (sum, err) in ulps of 2^-w
/// with the true value in [sum, sum + err].
fn atanh_fixed(a: &BigInt, b: &BigInt, w: u64) -> (BigInt, BigInt) {
    if a.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    // Tail after N terms <= (9/8) (1/3)^(2N+3) < 2^-w.
    let mut n: u64 = 0;
    while (2 * n + 3) as f64 * 3f64.log2() - 0.17 < w as f64 + 1.0 {
        n += 1;
    }
    let a2 = a * a;
    let b2 = b * b;
    let mut p = (a << w).div_floor(b);
    let mut sum = BigInt::zero();
    for i in 0..=n {
        sum += p.div_floor(&BigInt::from(2 * i + 1));
        p = (&p * &a2).div_floor(&b2);
        if p.is_zero() {
            break;
        }
    }
    let err = BigInt::from((n + 1) * (n + 4) / 2 + 2);
    (sum, err)
}

/// Bracket for ln(x), x > 0.
pub fn ln_bracket(x: &Rational, bits: u32) -> Result<Bracket> {
    if !x.is_positive() {
        return Err(Error::InvalidInput("logarithm of a non-positive number".into()));
    }
    if x.is_one() {
        return Ok(Bracket::point(Rational::zero()));
    }
    // x = m 2^e with m in [1, 2).
    let mut e: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = Rational::from_integer(2.into());
    let scale = |e: i64| -> Rational {
        if e >= 0 {
            Rational::from_integer(pow2(e as u64))
        } else {
            Rational::new(1.into(), pow2((-e) as u64))
        }
    };
    let mut m = x / scale(e);
    while m < Rational::one() {
        m *= &two;
        e -= 1;
    }
    while m >= two {
        m /= &two;
        e += 1;
    }
    let w: u64 = bits as u64 + 64 - (e.unsigned_abs().max(1)).leading_zeros() as u64 + 16;

    let z = (&m - Rational::one()) / (&m + Rational::one());
    let (s, err) = atanh_fixed(z.numer(), z.denom(), w);
    let lnm = Bracket { lo: dyadic(&s * 2, w), hi: dyadic((&s + &err) * 2, w) };

    let (s2, err2) = atanh_fixed(&BigInt::one(), &BigInt::from(3), w);
    let ln2 = Bracket { lo: dyadic(&s2 * 2, w), hi: dyadic((&s2 + &err2) * 2, w) };
    let ev = Bracket::point(Rational::from_integer(e.into()));
    Ok(ev.mul(&ln2).add(&lnm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn f(b: &Bracket) -> (f64, f64) {
        (b.lo.to_f64().unwrap(), b.hi.to_f64().unwrap())
    }

    #[test]
    fn exp_brackets_contain_reference_values() {
        for (x, v) in [(q(1, 1), 1f64.exp()), (q(10, 1), 10f64.exp()), (q(-7, 3), (-7f64 / 3.0).exp())] {
            let b = exp_bracket(&x, 64).unwrap();
            let (lo, hi) = f(&b);
            assert!(lo <= v * (1.0 + 1e-15) && hi >= v * (1.0 - 1e-15), "{x}: [{lo}, {hi}] vs {v}");
            assert!(b.width() < q(1, 1 << 40) * Rational::from_integer(BigInt::from(v.ceil() as i64 + 1)));
        }
    }

    #[test]
    fn ln_brackets_contain_reference_values() {
        for (x, v) in [(q(2, 1), 2f64.ln()), (q(101, 1), 101f64.ln()), (q(1, 7), (1f64 / 7.0).ln())] {
            let b = ln_bracket(&x, 64).unwrap();
            let (lo, hi) = f(&b);
            assert!(lo <= v + 1e-15 && hi >= v - 1e-15, "{x}: [{lo}, {hi}] vs {v}");
            assert!(b.width() < q(1, 1 << 50));
        }
    }

    #[test]
    fn bracket_width_shrinks_with_precision() {
        let e = RealExpr::integer(10).exp();
        let w64 = e.bracket(64).unwrap().width();
        let w256 = e.bracket(256).unwrap().width();
        assert!(w256 < w64);
        assert!(w256 < q(1, 1) / Rational::from_integer(pow2(200)));
    }

    #[test]
    fn exact_cases_stay_exact() {
        assert_eq!(RealExpr::pow(q(5, 1), q(3, 1)).unwrap().exact(), Some(q(125, 1)));
        assert_eq!(RealExpr::integer(0).exp().exact(), Some(q(1, 1)));
        assert_eq!(RealExpr::integer(1).ln().exact(), Some(q(0, 1)));
        assert!(RealExpr::integer(1).exp().exact().is_none());
        assert_eq!(RealExpr::pow(q(4, 9), q(3, 2)).unwrap().exact(), Some(q(8, 27)));
    }

    #[test]
    fn compares_transcendental_against_integers() {
        let prec = Precision::default();
        // e^10 = 22026.4657...
        let e10 = RealExpr::integer(10).exp();
        assert_eq!(e10.compare_integer(&22026.into(), &prec).unwrap(), Ordering::Greater);
        assert_eq!(e10.compare_integer(&22027.into(), &prec).unwrap(), Ordering::Less);
        // 3^(5/4) = 3.948...
        let s = RealExpr::pow(q(3, 1), q(5, 4)).unwrap();
        assert_eq!(s.compare_rational(&q(3948, 1000), &prec).unwrap(), Ordering::Greater);
        assert_eq!(s.compare_rational(&q(3949, 1000), &prec).unwrap(), Ordering::Less);
    }
}
