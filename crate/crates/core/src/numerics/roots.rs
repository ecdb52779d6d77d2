use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::{ComplexBox, PointTuple, RealInterval};
use crate::error::{Error, Result};
use crate::exactcore::{PolyZ, Rational};

const MAX_ITER: usize = 2000;

/// Evaluates a polynomial with box coefficients (ascending) at a box.
pub fn eval_box(coeffs: &[ComplexBox], z: &ComplexBox) -> ComplexBox {
    let mut acc = ComplexBox::real(0.0);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

/// Coefficient boxes of an integer polynomial (exact up to f64 conversion).
pub fn coeff_boxes(f: &PolyZ) -> Vec<ComplexBox> {
    f.coeffs()
        .iter()
        .map(|c| ComplexBox::from_interval(&RealInterval::from_rational(&Rational::from_integer(c.clone()))))
        .collect()
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Simultaneous Aberth–Ehrlich iteration.
fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lc = c[n];
    // Fujiwara's bound on root moduli.
    let bound = (1..=n)
        .map(|i| {
            let r = (c[n - i] / lc).norm();
            if i == n {
                (r / 2.0).powf(1.0 / i as f64)
            } else {
                r.powf(1.0 / i as f64)
            }
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if bound > 0.0 { bound / 2.0 } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut quiet = 0;
    for _ in 0..MAX_ITER {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                worst = worst.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if worst < 1e-15 {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        }
    }
    z
}

/// Inclusion radii n·|W_i| from Weierstrass corrections; None when the disks
/// are not pairwise disjoint.
fn certify(cb: &[ComplexBox], z: &[Complex64]) -> Option<Vec<f64>> {
    let n = z.len();
    let lc = cb[n];
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let zi = ComplexBox::point(z[i].re, z[i].im);
        let mut den = lc;
        for (j, zj) in z.iter().enumerate() {
            if j != i {
                den = den.mul(&zi.sub(&ComplexBox::point(zj.re, zj.im)));
            }
        }
        let w = eval_box(cb, &zi).div(&den);
        let r = w.abs().hi * n as f64;
        if !r.is_finite() {
            return None;
        }
        radii.push(super::interval::up(r));
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = ComplexBox::point(z[i].re, z[i].im).dist(&ComplexBox::point(z[j].re, z[j].im));
            if d.lo <= radii[i] + radii[j] {
                return None;
            }
        }
    }
    Some(radii)
}

fn squarefree_roots(g: &PolyZ, tol: f64) -> Result<Vec<ComplexBox>> {
    let n = g.degree().unwrap_or(0);
    if n == 1 {
        let r = Rational::new(-g.coeff(0), g.coeff(1));
        return Ok(vec![ComplexBox::from_interval(&RealInterval::from_rational(&r))]);
    }
    if let Some((a, n, c)) = g.as_binomial() {
        if !c.is_zero() {
            // Roots of x^n = w with w = −c/a real.
            let w = Rational::new(-c, a);
            let modulus = RealInterval::from_rational(&w.abs()).root(n as u32);
            let nn = n as u64;
            return Ok((0..n as i64)
                .map(|k| {
                    if w.is_positive() {
                        ComplexBox::from_polar(&modulus, k, nn)
                    } else {
                        ComplexBox::from_polar(&modulus, 2 * k + 1, 2 * nn)
                    }
                })
                .collect());
        }
    }
    let c: Vec<Complex64> = g.coeffs_f64().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    if c.iter().any(|x| !x.re.is_finite()) {
        return Err(Error::NonConvergence { tol });
    }
    let z = aberth(&c);
    let radii = certify(&coeff_boxes(g), &z).ok_or(Error::NonConvergence { tol })?;
    Ok(z.iter().zip(radii).map(|(z, r)| ComplexBox::new(z.re, z.im, r)).collect())
}

/// Certified enclosures of all complex roots, repeated by multiplicity.
/// Pure binomials a·x^n + c use the closed form.
pub fn complex_roots(f: &PolyZ, tol: f64) -> Result<PointTuple> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if f.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidInput("polynomial has no roots".into()));
    }
    let mut out = Vec::new();
    for (g, m) in f.squarefree_decomposition() {
        let roots = squarefree_roots(&g, tol)?;
        for _ in 0..m {
            out.extend_from_slice(&roots);
        }
    }
    if out.iter().any(|b| b.rad > tol) {
        return Err(Error::NonConvergence { tol });
    }
    PointTuple::new(out)
}

/// |lc(f)|·∏ max(1, |root|).
pub fn mahler_measure(f: &PolyZ, tol: f64) -> Result<RealInterval> {
    if f.is_zero() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    let lc = RealInterval::from_rational(&Rational::from_integer(f.leading().abs()));
    if f.degree() == Some(0) {
        return Ok(lc);
    }
    let roots = complex_roots(f, tol)?;
    let one = RealInterval::point(1.0);
    let m = roots.iter().fold(lc, |acc, r| acc.mul(&r.abs().max(&one)));
    if m.width() > tol {
        return Err(Error::NonConvergence { tol });
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PolyZ {
        PolyZ::parse(s).unwrap()
    }

    fn contains_root(t: &PointTuple, z: Complex64) -> bool {
        t.iter().any(|b| b.contains(z))
    }

    #[test]
    fn closed_form_radicals() {
        let r = complex_roots(&p("x^2-2"), 1e-12).unwrap();
        assert!(contains_root(&r, Complex64::new(2f64.sqrt(), 0.0)));
        assert!(contains_root(&r, Complex64::new(-(2f64.sqrt()), 0.0)));
        let r = complex_roots(&p("x^3-5"), 1e-12).unwrap();
        for b in r.iter() {
            assert!(b.abs().contains(5f64.cbrt()));
        }
        let r = complex_roots(&p("x^2+1"), 1e-12).unwrap();
        assert!(contains_root(&r, Complex64::new(0.0, 1.0)));
        assert!(contains_root(&r, Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn general_polynomials_are_certified() {
        let f = p("x^5 - 3x^4 + x^2 - x + 7");
        let r = complex_roots(&f, 1e-9).unwrap();
        assert_eq!(r.len(), 5);
        let cb = coeff_boxes(&f);
        for b in r.iter() {
            assert!(eval_box(&cb, b).contains_zero());
        }
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let g = complex_roots(&p("x^2-x-1"), 1e-12).unwrap();
        assert!(contains_root(&g, Complex64::new(phi, 0.0)));
    }

    #[test]
    fn multiplicities_are_kept() {
        let r = complex_roots(&p("x^3 - 3x + 2"), 1e-9).unwrap(); // (x−1)^2 (x+2)
        assert_eq!(r.len(), 3);
        assert_eq!(r.iter().filter(|b| b.contains(Complex64::new(1.0, 0.0))).count(), 2);
    }

    #[test]
    fn mahler_examples() {
        assert!(mahler_measure(&p("x-2"), 1e-9).unwrap().contains(2.0));
        let m = mahler_measure(&p("x^3-5"), 1e-9).unwrap();
        assert!(m.contains(5.0) && m.width() < 1e-9);
        let g = mahler_measure(&p("x^2-x-1"), 1e-9).unwrap();
        assert!(g.contains((1.0 + 5f64.sqrt()) / 2.0));
        assert!(mahler_measure(&p("3x^2+1"), 1e-9).unwrap().contains(3.0));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(complex_roots(&p("5"), 1e-9).is_err());
        assert!(complex_roots(&p("x-1"), 0.0).is_err());
    }
}
