use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};

use super::{Integer, PolyZ};
use crate::error::{Error, Result};

/// Polynomial over the prime field F_q, coefficients in [0, q), ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyFq {
    q: Integer,
    coeffs: Vec<Integer>,
}

impl PolyFq {
    pub fn new(q: Integer, coeffs: Vec<Integer>) -> Self {
        let mut coeffs: Vec<Integer> = coeffs.into_iter().map(|c| c.mod_floor(&q)).collect();
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyFq { q, coeffs }
    }

    pub fn from_u64(q: u64, coeffs: &[u64]) -> Self {
        PolyFq::new(q.into(), coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn modulus(&self) -> &Integer {
        &self.q
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    fn zero_like(&self) -> PolyFq {
        PolyFq { q: self.q.clone(), coeffs: Vec::new() }
    }

    fn one_like(&self) -> PolyFq {
        PolyFq { q: self.q.clone(), coeffs: vec![BigInt::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    fn inv(&self, a: &Integer) -> Integer {
        a.modpow(&(&self.q - 2u32), &self.q)
    }

    pub fn add(&self, o: &PolyFq) -> PolyFq {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyFq::new(self.q.clone(), (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &PolyFq) -> PolyFq {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyFq::new(self.q.clone(), (0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &PolyFq) -> PolyFq {
        if self.is_zero() || o.is_zero() {
            return self.zero_like();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        PolyFq::new(self.q.clone(), v)
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn monic(&self) -> PolyFq {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) => {
                let li = self.inv(lc);
                PolyFq::new(self.q.clone(), self.coeffs.iter().map(|c| c * &li).collect())
            }
        }
    }

    pub fn derivative(&self) -> PolyFq {
        PolyFq::new(
            self.q.clone(),
            self.coeffs.iter().enumerate().skip(1).map(|(i, a)| a * BigInt::from(i)).collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &PolyFq) -> (PolyFq, PolyFq) {
        let dd = d.degree().expect("division by zero polynomial");
        let li = self.inv(d.coeffs.last().unwrap());
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (self.zero_like(), self.clone());
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = (&r[k + dd] * &li).mod_floor(&self.q);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[k + j] = (&r[k + j] - &c * dj).mod_floor(&self.q);
            }
            q[k] = c;
        }
        (PolyFq::new(self.q.clone(), q), PolyFq::new(self.q.clone(), r))
    }

    pub fn divides(&self, f: &PolyFq) -> bool {
        f.divrem(self).1.is_zero()
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &PolyFq) -> PolyFq {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// For f with f' = 0, the polynomial h with h(x)^q = f (Frobenius is the
    /// identity on the prime field).
    fn frobenius_root(&self) -> PolyFq {
        let q = self.q.to_usize().expect("p-th root only arises for small q");
        PolyFq::new(self.q.clone(), self.coeffs.iter().step_by(q).cloned().collect())
    }

    /// Product of the distinct monic irreducible factors.
    pub fn radical(&self) -> PolyFq {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return self.one_like();
        }
        let fp = f.derivative();
        if fp.is_zero() {
            return f.frobenius_root().radical();
        }
        let g = f.gcd(&fp);
        if g.is_one() {
            return f;
        }
        // f/g carries every factor whose multiplicity is prime to q; the rest live in g.
        let w = f.divrem(&g).0.monic();
        let r = g.radical();
        let common = w.gcd(&r);
        w.mul(&r).divrem(&common).0.monic()
    }

    /// Lift to Z with coefficients in [0, q).
    pub fn lift(&self) -> PolyZ {
        PolyZ::new(self.coeffs.clone())
    }
}

impl fmt::Display for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.lift(), self.q)
    }
}

/// Upper bound on the number of trial divisors factor_fq_naive will try.
const NAIVE_TRIAL_CAP: f64 = 5.0e6;

/// Factorization into monic irreducibles by trial division with every monic
/// polynomial of increasing degree. Test oracle only: inputs with more than a
/// few million candidate divisors are rejected.
pub fn factor_fq_naive(f: &PolyFq) -> Result<Vec<(PolyFq, usize)>> {
    let deg = f.degree().ok_or_else(|| Error::InvalidInput("cannot factor zero".into()))?;
    let q = f
        .q
        .to_u64()
        .filter(|&q| q >= 2)
        .ok_or_else(|| Error::InvalidInput("modulus outside the naive range".into()))?;
    if deg > 12 {
        return Err(Error::DegreeTooLarge { degree: deg, limit: 12 });
    }
    let trials: f64 = (1..=deg / 2).map(|k| (q as f64).powi(k as i32)).sum();
    if trials > NAIVE_TRIAL_CAP {
        return Err(Error::InvalidInput(format!(
            "naive factorization over F_{q} in degree {deg} needs {trials:.0} trial divisors"
        )));
    }
    let mut rest = f.monic();
    let mut out = Vec::new();
    let mut k = 1;
    while rest.degree().unwrap_or(0) >= 2 * k {
        // Monic candidates of degree k in lexicographic order of the low coefficients.
        let mut low = vec![0u64; k];
        loop {
            let mut c: Vec<BigInt> = low.iter().map(|&v| BigInt::from(v)).collect();
            c.push(BigInt::one());
            let phi = PolyFq::new(f.q.clone(), c);
            let mut e = 0;
            loop {
                let (quo, r) = rest.divrem(&phi);
                if !r.is_zero() {
                    break;
                }
                rest = quo;
                e += 1;
            }
            if e > 0 {
                out.push((phi, e));
            }
            if rest.degree().unwrap_or(0) < 2 * k {
                break;
            }
            let mut i = 0;
            while i < k {
                low[i] += 1;
                if low[i] < q {
                    break;
                }
                low[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        k += 1;
    }
    if rest.degree().unwrap_or(0) >= 1 {
        // No factor of degree ≤ deg/2 remains: rest is irreducible, possibly a repeat.
        if let Some(entry) = out.iter_mut().find(|(p, _)| *p == rest) {
            entry.1 += 1;
        } else {
            out.push((rest, 1));
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fq(q: u64, c: &[u64]) -> PolyFq {
        PolyFq::from_u64(q, c)
    }

    #[test]
    fn radical_handles_vanishing_derivative() {
        // x^3 + 1 = (x + 1)^3 over F_3
        assert_eq!(fq(3, &[1, 0, 0, 1]).radical(), fq(3, &[1, 1]));
        // x^2 (x + 1)^3 over F_3
        let f = fq(3, &[0, 0, 1]).mul(&fq(3, &[1, 0, 0, 1]));
        assert_eq!(f.radical(), fq(3, &[0, 1, 1]));
        assert_eq!(fq(5, &[0, 0, 0, 1]).radical(), fq(5, &[0, 1]));
    }

    #[test]
    fn naive_factorization_examples() {
        assert_eq!(factor_fq_naive(&fq(5, &[0, 0, 0, 1])).unwrap(), vec![(fq(5, &[0, 1]), 3)]);
        assert_eq!(factor_fq_naive(&fq(3, &[1, 0, 0, 1])).unwrap(), vec![(fq(3, &[1, 1]), 3)]);
        assert_eq!(
            factor_fq_naive(&fq(5, &[1, 0, 1])).unwrap(),
            vec![(fq(5, &[2, 1]), 1), (fq(5, &[3, 1]), 1)]
        );
        // x^2 + 1 is irreducible over F_3
        assert_eq!(factor_fq_naive(&fq(3, &[1, 0, 1])).unwrap(), vec![(fq(3, &[1, 0, 1]), 1)]);
        // (x^2 + 1)^2 over F_3
        let f = fq(3, &[1, 0, 1]).mul(&fq(3, &[1, 0, 1]));
        assert_eq!(factor_fq_naive(&f).unwrap(), vec![(fq(3, &[1, 0, 1]), 2)]);
    }

    #[test]
    fn naive_factorization_rejects_large_inputs() {
        assert!(factor_fq_naive(&PolyFq::from_u64(1009, &[1; 13])).is_err());
    }
}
