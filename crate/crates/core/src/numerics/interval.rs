use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exactcore::Rational;

/// Ulps of slack applied to libm transcendentals (which are not correctly rounded).
const LIBM_ULPS: u32 = 4;

pub(crate) fn down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

pub(crate) fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

fn down_n(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = down(x);
    }
    x
}

fn up_n(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = up(x);
    }
    x
}

/// Closed interval [lo, hi] of reals with outward-rounded arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        RealInterval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        RealInterval { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    /// Encloses a value known only to floating-point accuracy, widened by one ulp.
    pub fn around(x: f64) -> Self {
        RealInterval { lo: down(x), hi: up(x) }
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_rationals(q, q)
    }

    pub fn from_rationals(lo: &Rational, hi: &Rational) -> Self {
        let l = crate::exactcore::rational_to_f64(lo);
        let h = crate::exactcore::rational_to_f64(hi);
        // f64 conversion is round-to-nearest; one ulp either way covers it.
        RealInterval { lo: down(l), hi: up(h) }
    }

    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            self.lo + (self.hi - self.lo) / 2.0
        } else {
            (self.lo + self.hi) / 2.0
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, o: &RealInterval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlaps(&self, o: &RealInterval) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Grows the interval by `r` on both sides.
    pub fn inflate(&self, r: f64) -> Self {
        RealInterval { lo: down(self.lo - r), hi: up(self.hi + r) }
    }

    pub fn hull(&self, o: &RealInterval) -> Self {
        RealInterval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn add(&self, o: &RealInterval) -> Self {
        RealInterval { lo: down(self.lo + o.lo), hi: up(self.hi + o.hi) }
    }

    pub fn sub(&self, o: &RealInterval) -> Self {
        RealInterval { lo: down(self.lo - o.hi), hi: up(self.hi - o.lo) }
    }

    pub fn neg(&self) -> Self {
        RealInterval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(&self, o: &RealInterval) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        RealInterval { lo: down(lo), hi: up(hi) }
    }

    pub fn scale(&self, k: f64) -> Self {
        self.mul(&RealInterval::point(k))
    }

    /// Quotient; a denominator containing zero yields the whole line.
    pub fn div(&self, o: &RealInterval) -> Self {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return RealInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        RealInterval { lo: down(lo), hi: up(hi) }
    }

    pub fn recip(&self) -> Self {
        RealInterval::point(1.0).div(self)
    }

    pub fn abs(&self) -> Self {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            self.neg()
        } else {
            RealInterval { lo: 0.0, hi: (-self.lo).max(self.hi) }
        }
    }

    pub fn sqr(&self) -> Self {
        let a = self.abs();
        RealInterval { lo: down(a.lo * a.lo).max(0.0), hi: up(a.hi * a.hi) }
    }

    pub fn sqrt(&self) -> Self {
        let lo = if self.lo <= 0.0 { 0.0 } else { down(self.lo.sqrt()).max(0.0) };
        RealInterval { lo, hi: up(self.hi.max(0.0).sqrt()) }
    }

    pub fn max(&self, o: &RealInterval) -> Self {
        RealInterval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn min(&self, o: &RealInterval) -> Self {
        RealInterval { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn exp(&self) -> Self {
        RealInterval {
            lo: down_n(self.lo.exp(), LIBM_ULPS).max(0.0),
            hi: up_n(self.hi.exp(), LIBM_ULPS),
        }
    }

    /// Natural log; the part of the interval at or below zero maps to −∞.
    pub fn ln(&self) -> Self {
        let lo = if self.lo <= 0.0 { f64::NEG_INFINITY } else { down_n(self.lo.ln(), LIBM_ULPS) };
        let hi = if self.hi <= 0.0 { f64::NEG_INFINITY } else { up_n(self.hi.ln(), LIBM_ULPS) };
        RealInterval { lo, hi }
    }

    /// x^e for x ≥ 0 and a real exponent interval, via exp(e·ln x).
    pub fn pow(&self, e: &RealInterval) -> Self {
        if self.hi <= 0.0 {
            return RealInterval::zero();
        }
        if self.lo <= 0.0 {
            let top = RealInterval { lo: self.hi, hi: self.hi }.pow(e).hi;
            let top = if e.lo < 0.0 { f64::INFINITY } else { top.max(1.0) };
            return RealInterval { lo: 0.0, hi: top };
        }
        let x = RealInterval { lo: self.lo, hi: self.hi };
        e.mul(&x.ln()).exp()
    }

    pub fn powf(&self, e: f64) -> Self {
        self.pow(&RealInterval::point(e))
    }

    /// x^(1/n) for x ≥ 0, with 1/n itself enclosed.
    pub fn root(&self, n: u32) -> Self {
        self.pow(&RealInterval::point(1.0).div(&RealInterval::point(n as f64)))
    }

    /// Non-negative integer power.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = RealInterval::point(1.0);
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        if n % 2 == 0 && acc.lo < 0.0 {
            acc.lo = 0.0;
        }
        acc
    }

    /// max(0, self).
    pub fn pos(&self) -> Self {
        RealInterval { lo: self.lo.max(0.0), hi: self.hi.max(0.0) }
    }

    /// Decimal endpoints with `digits` fractional digits, rounded strictly
    /// outward: an endpoint already on the grid moves one unit out.
    pub fn outward_decimal(&self, digits: u32) -> (String, String) {
        let scale = num_traits::pow(num_bigint::BigInt::from(10), digits as usize);
        let grid = |x: f64, upward: bool| -> String {
            let Some(q) = Rational::from_float(x) else {
                return if x > 0.0 { "inf".into() } else { "-inf".into() };
            };
            let scaled = q * Rational::from_integer(scale.clone());
            let n = if upward { scaled.floor().to_integer() + 1 } else { scaled.ceil().to_integer() - 1 };
            decimal(&n, digits)
        };
        (grid(self.lo, false), grid(self.hi, true))
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

fn decimal(n: &num_bigint::BigInt, digits: u32) -> String {
    let sign = if n.sign() == num_bigint::Sign::Minus { "-" } else { "" };
    let s = n.magnitude().to_string();
    if digits == 0 {
        return format!("{sign}{s}");
    }
    let s = format!("{s:0>width$}", width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{sign}{int}.{frac}")
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    lo: String,
    hi: String,
}

impl Serialize for RealInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { lo: self.lo.to_string(), hi: self.hi.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        let lo: f64 = w.lo.parse().map_err(serde::de::Error::custom)?;
        let hi: f64 = w.hi.parse().map_err(serde::de::Error::custom)?;
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(serde::de::Error::custom("invalid interval"));
        }
        Ok(RealInterval { lo, hi })
    }
}
