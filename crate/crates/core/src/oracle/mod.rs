//! Brute-force oracles used as ground truth by the test suites: element
//! enumeration, empirical minimum house, grid discrepancy and resultant
//! discriminants. They use plain f64 / exact integer arithmetic, independent
//! of the enclosure code they cross-check.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactcore::{Integer, PolyZ};
use crate::heights::{embedding_index, house, RadicalTower, TowerElement};
use crate::numerics::{PointTuple, RealInterval};

pub const DEFAULT_CAP: u64 = 10_000_000;

/// Which elements of O_i = Z[ξ_1, …, ξ_i] to enumerate.
#[derive(Clone, Debug)]
pub struct EnumerationSpec {
    pub tower: RadicalTower,
    /// 1-based step index i.
    pub step: usize,
    /// Coefficients range over [−C, C].
    pub coeff_bound: u32,
    pub include_constants: bool,
    /// Allowed monomial exponent vectors (length i); `None` allows all.
    pub mask: Option<Vec<Vec<u32>>>,
    pub cap: u64,
}

impl EnumerationSpec {
    pub fn new(tower: RadicalTower, step: usize, coeff_bound: u32) -> Self {
        EnumerationSpec { tower, step, coeff_bound, include_constants: true, mask: None, cap: DEFAULT_CAP }
    }

    pub fn with_mask(mut self, mask: Vec<Vec<u32>>) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn without_constants(mut self) -> Self {
        self.include_constants = false;
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    fn prefix(&self) -> Result<RadicalTower> {
        if self.step == 0 || self.step > self.tower.len() {
            return Err(Error::InvalidInput(format!("step {} outside the tower", self.step)));
        }
        Ok(self.tower.prefix(self.step))
    }

    /// Monomial slots in enumeration order (lexicographic exponent vectors).
    pub fn slots(&self) -> Result<Vec<Vec<u32>>> {
        let t = self.prefix()?;
        let degrees = t.degrees();
        let total: u64 = degrees.iter().map(|&d| d as u64).product();
        let mut all = Vec::new();
        if let Some(mask) = &self.mask {
            for e in mask {
                if e.len() != degrees.len() || e.iter().zip(&degrees).any(|(x, d)| x >= d) {
                    return Err(Error::InvalidInput(format!("mask entry {e:?} is not a monomial of the tower")));
                }
            }
            all = mask.clone();
            all.sort();
            all.dedup();
        } else {
            if total > 64 {
                return Err(Error::TooLarge { count: format!("(2C+1)^{total}"), cap: self.cap });
            }
            for idx in 0..total {
                // embedding_index enumerates mixed-radix digits, first variable most significant.
                all.push(embedding_index(&degrees, idx));
            }
        }
        if !self.include_constants {
            all.retain(|e| e.iter().any(|&x| x > 0));
        }
        Ok(all)
    }

    /// (2C+1)^D − (2C+1)^D′ with D′ the slots not involving x_i.
    pub fn count(&self) -> Result<BigInt> {
        let slots = self.slots()?;
        let i = self.step - 1;
        let base = BigInt::from(2 * self.coeff_bound as u64 + 1);
        let old = slots.iter().filter(|e| e[i] == 0).count();
        Ok(num_traits::pow(base.clone(), slots.len()) - num_traits::pow(base, old))
    }
}

fn digit_coeff(digit: u64, c: u64) -> i64 {
    if digit <= c {
        digit as i64
    } else {
        -((digit - c) as i64)
    }
}

/// Enumerates every element of O_i \ O_{i−1} whose coefficients on the allowed
/// slots lie in [−C, C], each exactly once.
pub struct NewElements {
    slots: Vec<Vec<u32>>,
    new_slot: Vec<bool>,
    nvars: usize,
    c: u64,
    digits: Vec<u64>,
    done: bool,
}

impl Iterator for NewElements {
    type Item = TowerElement;

    fn next(&mut self) -> Option<TowerElement> {
        loop {
            if self.done {
                return None;
            }
            let base = 2 * self.c + 1;
            let mut k = 0;
            loop {
                if k == self.digits.len() {
                    self.done = true;
                    return None;
                }
                self.digits[k] += 1;
                if self.digits[k] < base {
                    break;
                }
                self.digits[k] = 0;
                k += 1;
            }
            let is_new = self.digits.iter().zip(&self.new_slot).any(|(&d, &n)| n && d != 0);
            if is_new {
                let terms = self
                    .digits
                    .iter()
                    .zip(&self.slots)
                    .filter(|(&d, _)| d != 0)
                    .map(|(&d, e)| (e.clone(), BigInt::from(digit_coeff(d, self.c))));
                return Some(TowerElement::from_terms(self.nvars, terms));
            }
        }
    }
}

fn checked_count(spec: &EnumerationSpec) -> Result<u64> {
    let count = spec.count()?;
    match count.to_u64() {
        Some(n) if n <= spec.cap => Ok(n),
        _ => Err(Error::TooLarge { count: count.to_string(), cap: spec.cap }),
    }
}

pub fn enumerate_new_elements(spec: &EnumerationSpec) -> Result<NewElements> {
    checked_count(spec)?;
    let slots = spec.slots()?;
    let i = spec.step - 1;
    Ok(NewElements {
        new_slot: slots.iter().map(|e| e[i] > 0).collect(),
        nvars: spec.step,
        c: spec.coeff_bound as u64,
        digits: vec![0; slots.len()],
        done: slots.is_empty() || spec.coeff_bound == 0,
        slots,
    })
}

/// values[e][s] = σ_e(monomial s) for every embedding e of the prefix tower.
fn slot_values(tower: &RadicalTower, slots: &[Vec<u32>]) -> Vec<Vec<(f64, f64)>> {
    let degrees = tower.degrees();
    let total: u64 = degrees.iter().map(|&d| d as u64).product();
    (0..total)
        .map(|idx| {
            let j = embedding_index(&degrees, idx);
            slots
                .iter()
                .map(|e| {
                    let (mut r, mut theta) = (1.0f64, 0.0f64);
                    for (k, s) in tower.steps().iter().enumerate() {
                        let d = degrees[k] as f64;
                        let p = s.p.to_f64().unwrap_or(f64::MAX);
                        r *= p.powf(e[k] as f64 / d);
                        theta += TAU * (j[k] as f64) * (e[k] as f64) / d;
                    }
                    (r * theta.cos(), r * theta.sin())
                })
                .collect()
        })
        .collect()
}

/// The `len` lowest base-`base` digits of n, least significant first.
fn decode(mut n: u64, base: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = n % base;
            n /= base;
            d
        })
        .collect()
}

/// Minimum house over the enumeration with a witness, the minimum located in
/// f64 and the witness's house then enclosed to width ≤ tol. Ties go to the
/// earliest element in enumeration order.
pub fn empirical_min_house(spec: &EnumerationSpec, tol: f64) -> Result<(RealInterval, TowerElement)> {
    checked_count(spec)?;
    let slots = spec.slots()?;
    let i = spec.step - 1;
    if spec.coeff_bound == 0 || !slots.iter().any(|e| e[i] > 0) {
        return Err(Error::EmptyStream);
    }
    let tower = spec.prefix()?;
    let vals = slot_values(&tower, &slots);
    let ne = vals.len();
    let c = spec.coeff_bound as u64;
    let base = 2 * c + 1;
    let new_slot: Vec<bool> = slots.iter().map(|e| e[i] > 0).collect();
    let ns = slots.len();
    let mut inner = 0;
    while inner < ns && base.pow(inner as u32 + 1) <= 4096 {
        inner += 1;
    }
    let n_inner = base.pow(inner as u32);
    let n_outer = base.pow((ns - inner) as u32);
    // Inner table: per combination, its sum in every embedding and whether it touches x_i.
    let mut inner_sum = vec![(0.0f64, 0.0f64); (n_inner as usize) * ne];
    let mut inner_new = vec![false; n_inner as usize];
    for n in 0..n_inner {
        let dg = decode(n, base, inner);
        inner_new[n as usize] = dg.iter().zip(&new_slot).any(|(&d, &f)| f && d != 0);
        for (e, row) in vals.iter().enumerate() {
            let mut acc = (0.0, 0.0);
            for (s, &d) in dg.iter().enumerate() {
                let a = digit_coeff(d, c) as f64;
                acc.0 += a * row[s].0;
                acc.1 += a * row[s].1;
            }
            inner_sum[n as usize * ne + e] = acc;
        }
    }
    let best = (0..n_outer)
        .into_par_iter()
        .map(|o| {
            let dg = decode(o, base, ns - inner);
            let outer_new = dg.iter().zip(&new_slot[inner..]).any(|(&d, &f)| f && d != 0);
            let outer: Vec<(f64, f64)> = vals
                .iter()
                .map(|row| {
                    dg.iter().enumerate().fold((0.0, 0.0), |acc, (s, &d)| {
                        let a = digit_coeff(d, c) as f64;
                        (acc.0 + a * row[inner + s].0, acc.1 + a * row[inner + s].1)
                    })
                })
                .collect();
            let mut best: Option<(f64, u64)> = None;
            for n in 0..n_inner {
                if !(outer_new || inner_new[n as usize]) {
                    continue;
                }
                let row = &inner_sum[n as usize * ne..(n as usize + 1) * ne];
                let mut m = 0.0f64;
                for (a, b) in outer.iter().zip(row) {
                    let (x, y) = (a.0 + b.0, a.1 + b.1);
                    m = m.max(x * x + y * y);
                }
                if best.is_none_or(|(v, _)| m < v) {
                    best = Some((m, o * n_inner + n));
                }
            }
            best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(x), Some(y)) => Some(if y.0.total_cmp(&x.0).then(y.1.cmp(&x.1)).is_lt() { y } else { x }),
            },
        );
    let (_, idx) = best.ok_or(Error::EmptyStream)?;
    let dg = decode(idx, base, ns);
    let witness = TowerElement::from_terms(
        spec.step,
        dg.iter().zip(&slots).filter(|(&d, _)| d != 0).map(|(&d, e)| (e.clone(), BigInt::from(digit_coeff(d, c)))),
    );
    let value = house(&tower, &witness, tol)?.value;
    Ok((value, witness))
}

/// min over the rotations θ_k = 2πk/(gridN·d), k < gridN, of D_u at the
/// point centers.
pub fn brute_discrepancy(points: &PointTuple, grid_n: usize) -> Result<f64> {
    if grid_n < 8 {
        return Err(Error::InvalidInput("grid size must be at least 8".into()));
    }
    let c = points.centers();
    let d = c.len();
    let step = TAU / (grid_n as f64 * d as f64);
    let value = (0..grid_n)
        .map(|k| {
            let theta = k as f64 * step;
            (0..d)
                .map(|j| {
                    let (s, co) = (theta + TAU * j as f64 / d as f64).sin_cos();
                    c.iter().map(|z| ((z.re - co).powi(2) + (z.im - s).powi(2)).sqrt()).fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(value)
}

/// Fraction-free (Bareiss) determinant.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        return BigInt::from(1);
    }
    m[n - 1][n - 1].clone() * sign
}

/// Sylvester matrix of f and g (descending coefficients).
fn sylvester(f: &PolyZ, g: &PolyZ) -> Vec<Vec<BigInt>> {
    let n = f.degree().unwrap_or(0);
    let m = g.degree().unwrap_or(0);
    let size = n + m;
    let fc: Vec<BigInt> = f.coeffs().iter().rev().cloned().collect();
    let gc: Vec<BigInt> = g.coeffs().iter().rev().cloned().collect();
    let mut rows = Vec::with_capacity(size);
    for r in 0..m {
        let mut row = vec![BigInt::zero(); size];
        row[r..r + n + 1].clone_from_slice(&fc);
        rows.push(row);
    }
    for r in 0..n {
        let mut row = vec![BigInt::zero(); size];
        row[r..r + m + 1].clone_from_slice(&gc);
        rows.push(row);
    }
    rows
}

pub const MAX_RESULTANT_DEGREE: usize = 12;

/// |Res(f, f′)| for monic f, which equals |disc f|.
pub fn discriminant_via_resultant(f: &PolyZ) -> Result<Integer> {
    let n = f.degree().ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    if n > MAX_RESULTANT_DEGREE {
        return Err(Error::DegreeTooLarge { degree: n, limit: MAX_RESULTANT_DEGREE });
    }
    if !f.is_monic() || n == 0 {
        return Err(Error::InvalidInput("need a monic polynomial of positive degree".into()));
    }
    Ok(bareiss_det(sylvester(f, &f.derivative())).abs())
}

/// Capelli: x^d − n (n > 0) is irreducible over Q iff n is not a p-th power
/// for a prime p | d, and not −4m⁴ when 4 | d (impossible for n > 0).
pub fn pure_radical_irreducible(d: u32, n: &Integer) -> bool {
    if d == 0 || !n.is_positive() {
        return false;
    }
    let mut rest = d;
    let mut p = 2;
    while rest > 1 {
        if rest % p == 0 {
            if n.nth_root(p).pow(p) == *n {
                return false;
            }
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::OrderingMode;

    fn tower(pairs: &[(u64, u64)]) -> RadicalTower {
        RadicalTower::from_pairs(pairs, OrderingMode::Weak).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let spec = EnumerationSpec::new(tower(&[(5, 3)]), 1, 1);
        assert_eq!(spec.count().unwrap(), BigInt::from(24));
        let v: Vec<_> = enumerate_new_elements(&spec).unwrap().collect();
        assert_eq!(v.len(), 24);
        let mut seen: Vec<String> = v.iter().map(|e| e.to_string()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 24);
        assert!(v.iter().all(|e| e.involves(1)));
        let zero = EnumerationSpec::new(tower(&[(5, 3)]), 1, 0);
        assert_eq!(enumerate_new_elements(&zero).unwrap().count(), 0);
    }

    #[test]
    fn masked_two_step_slice() {
        let mask: Vec<Vec<u32>> = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1], vec![0, 2]];
        let spec = EnumerationSpec::new(tower(&[(251, 7), (2309, 11)]), 2, 1).with_mask(mask);
        assert_eq!(spec.count().unwrap(), BigInt::from(243 - 9));
        assert!(enumerate_new_elements(&spec).unwrap().all(|e| e.involves(2)));
    }

    #[test]
    fn cap_is_enforced() {
        let spec = EnumerationSpec::new(tower(&[(131, 11)]), 1, 2).with_cap(1000);
        assert!(matches!(enumerate_new_elements(&spec), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn min_house_at_generator() {
        let spec = EnumerationSpec::new(tower(&[(5, 3)]), 1, 2);
        let (v, w) = empirical_min_house(&spec, 1e-9).unwrap();
        assert_eq!(w, TowerElement::generator(1, 1));
        assert!((v.mid() - 5f64.cbrt()).abs() < 1e-9);
        let spec = EnumerationSpec::new(tower(&[(131, 11)]), 1, 1).without_constants();
        let (v, w) = empirical_min_house(&spec, 1e-9).unwrap();
        assert_eq!(w, TowerElement::generator(1, 1));
        assert!((v.mid() - 131f64.powf(1.0 / 11.0)).abs() < 1e-9);
    }

    #[test]
    fn constant_mask_is_empty() {
        let spec = EnumerationSpec::new(tower(&[(5, 3)]), 1, 1).with_mask(vec![vec![0]]);
        assert!(matches!(empirical_min_house(&spec, 1e-9), Err(Error::EmptyStream)));
    }

    #[test]
    fn brute_discrepancy_examples() {
        let p = |v: &[(f64, f64)]| PointTuple::from_points(v).unwrap();
        assert!(brute_discrepancy(&p(&[(1.0, 0.0), (-1.0, 0.0)]), 1024).unwrap() < 1e-2);
        assert!((brute_discrepancy(&p(&[(1.0, 0.0), (1.0, 0.0)]), 1024).unwrap() - 2f64.sqrt()).abs() < 1e-2);
        assert!((brute_discrepancy(&p(&[(3.0, 0.0)]), 64).unwrap() - 2.0).abs() < 1e-2);
        assert!(brute_discrepancy(&p(&[(3.0, 0.0)]), 4).is_err());
    }

    #[test]
    fn resultant_discriminants() {
        let disc = |s: &str| discriminant_via_resultant(&PolyZ::parse(s).unwrap()).unwrap();
        assert_eq!(disc("x^3-2"), BigInt::from(108));
        assert_eq!(disc("x^2-3"), BigInt::from(12));
        assert_eq!(disc("x^2+1"), BigInt::from(4));
        assert_eq!(disc("x^2-x-1"), BigInt::from(5));
        let big = PolyZ::parse("x^13-2").unwrap();
        assert!(matches!(discriminant_via_resultant(&big), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn capelli() {
        assert!(pure_radical_irreducible(3, &BigInt::from(2)));
        assert!(!pure_radical_irreducible(3, &BigInt::from(8)));
        assert!(!pure_radical_irreducible(4, &BigInt::from(9)));
        assert!(!pure_radical_irreducible(6, &BigInt::from(8)));
        assert!(pure_radical_irreducible(4, &BigInt::from(2)));
    }
}
