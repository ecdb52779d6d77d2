use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::RadicalTower;
use crate::error::{Error, Result};
use crate::exactcore::Integer;

/// Integer polynomial in the tower generators x1…xk with exponent of x_i
/// below d_i. Terms are keyed by exponent vectors; zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerElement {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Integer>,
}

impl TowerElement {
    pub fn zero(nvars: usize) -> Self {
        TowerElement { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Integer) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c)])
    }

    /// x_i (1-based).
    pub fn generator(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i - 1] = 1;
        Self::from_terms(nvars, [(e, BigInt::one())])
    }

    /// Sums duplicate monomials and drops zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Integer)>) -> Self {
        let mut map: BTreeMap<Vec<u32>, Integer> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            *map.entry(e).or_default() += c;
        }
        map.retain(|_, c| !c.is_zero());
        TowerElement { nvars, terms: map }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Integer> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether the element is a rational integer.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&m| m == 0))
    }

    pub fn constant_term(&self) -> Integer {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_default()
    }

    /// Whether some term has a positive exponent on x_var (1-based).
    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var - 1] > 0)
    }

    /// Largest exponent of x_var among the terms.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var - 1]).max().unwrap_or(0)
    }

    /// Largest index of a variable that occurs.
    pub fn top_variable(&self) -> Option<usize> {
        (1..=self.nvars).rev().find(|&v| self.involves(v))
    }

    /// The coefficient of x_var^m, as an element free of x_var.
    pub fn coefficient_in(&self, var: usize, m: u32) -> TowerElement {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[var - 1] == m).map(|(e, c)| {
                let mut e = e.clone();
                e[var - 1] = 0;
                (e, c.clone())
            }),
        )
    }

    pub fn add(&self, o: &TowerElement) -> TowerElement {
        Self::from_terms(self.nvars, self.terms.clone().into_iter().chain(o.terms.clone()))
    }

    pub fn neg(&self) -> TowerElement {
        TowerElement { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &TowerElement) -> TowerElement {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Integer) -> TowerElement {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c * k)))
    }

    /// Product, rejecting any exponent that reaches the step degree.
    pub fn mul(&self, o: &TowerElement, degrees: &[u32]) -> Result<TowerElement> {
        let mut out = Vec::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = Vec::with_capacity(self.nvars);
                for (i, (a, b)) in e1.iter().zip(e2).enumerate() {
                    let m = a + b;
                    if m >= degrees[i] {
                        return Err(Error::ExponentOutOfRange { var: i + 1, exponent: m as u64, bound: degrees[i] });
                    }
                    e.push(m);
                }
                out.push((e, c1 * c2));
            }
        }
        Ok(Self::from_terms(self.nvars, out))
    }

    /// The same element over the first `nvars` generators; None if it uses a later one.
    pub fn restrict(&self, nvars: usize) -> Option<TowerElement> {
        if self.terms.keys().any(|e| e[nvars..].iter().any(|&m| m > 0)) {
            return None;
        }
        Some(Self::from_terms(nvars, self.terms.iter().map(|(e, c)| (e[..nvars].to_vec(), c.clone()))))
    }

    /// The same element over a tower with more generators.
    pub fn extend(&self, nvars: usize) -> TowerElement {
        assert!(nvars >= self.nvars);
        Self::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| {
                let mut e = e.clone();
                e.resize(nvars, 0);
                (e, c.clone())
            }),
        )
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> Integer {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &m)| m > 0)
                .map(|(i, &m)| if m == 1 { format!("x{}", i + 1) } else { format!("x{}^{m}", i + 1) })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Literal exponents on non-variable bases are capped to keep parsing cheap.
const MAX_LITERAL_EXPONENT: u64 = 4096;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    degrees: Vec<u32>,
}

impl Parser<'_> {
    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn nvars(&self) -> usize {
        self.degrees.len()
    }

    fn expr(&mut self) -> Result<TowerElement> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<TowerElement> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.mul(&rhs, &self.degrees)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<TowerElement> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn exponent(&mut self) -> Result<u64> {
        self.skip_ws();
        let s = self.digits();
        if s.is_empty() {
            return self.err("expected a non-negative integer exponent");
        }
        Ok(s.parse::<u64>().unwrap_or(u64::MAX))
    }

    fn power(&mut self) -> Result<TowerElement> {
        let start = self.pos;
        let (base, var) = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let e = self.exponent()?;
        if let Some(v) = var {
            let bound = self.degrees[v - 1];
            if e >= bound as u64 {
                return Err(Error::ExponentOutOfRange { var: v, exponent: e, bound });
            }
            let mut ev = vec![0; self.nvars()];
            ev[v - 1] = e as u32;
            return Ok(TowerElement::from_terms(self.nvars(), [(ev, BigInt::one())]));
        }
        if e > MAX_LITERAL_EXPONENT {
            self.pos = start;
            return self.err("exponent too large");
        }
        let mut acc = TowerElement::constant(self.nvars(), BigInt::one());
        for _ in 0..e {
            acc = acc.mul(&base, &self.degrees)?;
        }
        Ok(acc)
    }

    /// Returns the atom and, for a bare variable, its index.
    fn atom(&mut self) -> Result<(TowerElement, Option<usize>)> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let s = self.digits();
                let n: BigInt = s.parse().unwrap();
                Ok((TowerElement::constant(self.nvars(), n), None))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok((e, None))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let idx = name
                    .strip_prefix('x')
                    .filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()) && !r.starts_with('0'))
                    .and_then(|r| r.parse::<usize>().ok())
                    .filter(|&i| i >= 1 && i <= self.nvars())
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                Ok((TowerElement::generator(self.nvars(), idx), Some(idx)))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an element such as "1 + 2*x1 - x1^2" over `tower`. Exponents at or
/// above the step degree are rejected, never reduced.
pub fn parse_element(src: &str, tower: &RadicalTower) -> Result<TowerElement> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, degrees: tower.degrees() };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}
