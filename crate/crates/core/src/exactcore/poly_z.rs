use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Integer, PolyFq};
use crate::error::{Error, Result};

/// Dense polynomial over Z, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyZ {
    coeffs: Vec<Integer>,
}

impl PolyZ {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyZ { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        PolyZ::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        PolyZ { coeffs: Vec::new() }
    }

    pub fn constant(c: Integer) -> Self {
        PolyZ::new(vec![c])
    }

    /// c·x^n.
    pub fn monomial(c: Integer, n: usize) -> Self {
        let mut v = vec![BigInt::zero(); n + 1];
        v[n] = c;
        PolyZ::new(v)
    }

    /// x^d − n.
    pub fn pure_radical(d: usize, n: &Integer) -> Self {
        let mut v = vec![BigInt::zero(); d + 1];
        v[0] = -n;
        v[d] = BigInt::one();
        PolyZ::new(v)
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Integer {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, o: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyZ::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyZ::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &PolyZ) -> PolyZ {
        if self.is_zero() || o.is_zero() {
            return PolyZ::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        PolyZ::new(v)
    }

    pub fn scale(&self, c: &Integer) -> PolyZ {
        PolyZ::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> PolyZ {
        PolyZ::new(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn derivative(&self) -> PolyZ {
        PolyZ::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, a)| a * BigInt::from(i)).collect(),
        )
    }

    pub fn eval(&self, x: &Integer) -> Integer {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// gcd of the coefficients (non-negative).
    pub fn content(&self) -> Integer {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Content-free part with positive leading coefficient.
    pub fn primitive_part(&self) -> PolyZ {
        if self.is_zero() {
            return PolyZ::zero();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        PolyZ::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Exact quotient self / d in Z[x], or None if d does not divide self.
    pub fn exact_div(&self, d: &PolyZ) -> Option<PolyZ> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(PolyZ::zero());
        }
        let sd = self.degree()?;
        if sd < dd {
            return None;
        }
        let lc = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (c, rem) = top.div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dj;
            }
            q[k] = c;
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(PolyZ::new(q))
        } else {
            None
        }
    }

    /// Pseudo-remainder: lc(d)^(deg self − deg d + 1)·self mod d.
    fn pseudo_rem(&self, d: &PolyZ) -> PolyZ {
        let dd = d.degree().expect("nonzero divisor");
        let mut r = self.clone();
        let lc = d.leading();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let t = PolyZ::monomial(r.leading(), rd - dd);
            r = r.scale(&lc).sub(&t.mul(d));
        }
        r
    }

    /// gcd in Z[x] via the primitive remainder sequence; positive leading coefficient.
    pub fn gcd(&self, o: &PolyZ) -> PolyZ {
        if self.is_zero() {
            return o.primitive_part().scale(&o.content());
        }
        if o.is_zero() {
            return self.primitive_part().scale(&self.content());
        }
        let c = self.content().gcd(&o.content());
        let (mut a, mut b) = (self.primitive_part(), o.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part().scale(&c)
    }

    /// Yun's squarefree decomposition of the primitive part: pairs (factor,
    /// multiplicity) with primitive, pairwise coprime, squarefree factors.
    pub fn squarefree_decomposition(&self) -> Vec<(PolyZ, usize)> {
        let f = self.primitive_part();
        if f.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp).primitive_part();
        let mut b = f.exact_div(&a0).expect("gcd divides f");
        let c = fp.exact_div(&a0).expect("gcd divides f'");
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d).primitive_part();
            b = b.exact_div(&a).expect("gcd divides b");
            let c = d.exact_div(&a).expect("gcd divides d");
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.squarefree_decomposition().iter().all(|(_, m)| *m == 1)
    }

    /// Recognizes a·x^n + c with n ≥ 1.
    pub fn as_binomial(&self) -> Option<(Integer, usize, Integer)> {
        let n = self.degree()?;
        if n == 0 || self.coeffs[1..n].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some((self.leading(), n, self.coeffs[0].clone()))
    }

    /// Reduction modulo a prime q.
    pub fn to_fq(&self, q: &Integer) -> PolyFq {
        PolyFq::new(q.clone(), self.coeffs.clone())
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Parses expressions like "x^3 - 17", "2*x^2+3x-1" or "7".
    pub fn parse(src: &str) -> Result<PolyZ> {
        let s: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Syntax { offset: 0, message: "empty polynomial".into() });
        }
        let syntax = |offset: usize, m: &str| Error::Syntax { offset, message: m.into() };
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut i = 0;
        while i < s.len() {
            let mut sign = BigInt::one();
            if s[i] == '+' || s[i] == '-' {
                if s[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            } else if i > 0 {
                return Err(syntax(i, "expected + or -"));
            }
            let start = i;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
            let coef: Option<BigInt> =
                if i > start { Some(s[start..i].iter().collect::<String>().parse().unwrap()) } else { None };
            let mut power = 0usize;
            if i < s.len() && s[i] == '*' {
                if coef.is_none() {
                    return Err(syntax(i, "unexpected *"));
                }
                i += 1;
                if i >= s.len() || s[i] != 'x' {
                    return Err(syntax(i, "expected x after *"));
                }
            }
            if i < s.len() && s[i] == 'x' {
                i += 1;
                power = 1;
                if i < s.len() && s[i] == '^' {
                    i += 1;
                    let es = i;
                    while i < s.len() && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == es {
                        return Err(syntax(i, "expected exponent"));
                    }
                    power = s[es..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| syntax(es, "exponent too large"))?;
                    if power > 4096 {
                        return Err(syntax(es, "exponent too large"));
                    }
                }
            } else if coef.is_none() {
                return Err(syntax(i, "expected a term"));
            }
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            coeffs[power] += sign * coef.unwrap_or_else(BigInt::one);
        }
        Ok(PolyZ::new(coeffs))
    }
}

impl fmt::Display for PolyZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let show = !a.is_one() || i == 0;
            if show {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Serialize for PolyZ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyZ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(PolyZ::new(coeffs))
    }
}
