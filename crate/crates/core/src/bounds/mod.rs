//! Lower bounds for the maximum of a polynomial on a point tuple, for the
//! house of new elements in a tower step, and for the Weil height; plus the
//! finite-prefix Northcott report of a tower.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::discrepancy::{discrepancy, eta_radical_step, normalized_tuple, one_minus_weighted};
use crate::error::{Error, Result};
use crate::exactcore::{format_rational, is_prime, Integer, Rational};
use crate::heights::{embeddings, house, OrderingMode, RadicalStep, RadicalTower, TowerElement};
use crate::numerics::{ComplexBox, PointTuple, RealInterval};

/// Coefficients b_0, …, b_n of a complex polynomial, ascending, trailing zeros dropped.
fn trimmed(b: &[ComplexBox]) -> &[ComplexBox] {
    let mut n = b.len();
    while n > 0 && b[n - 1] == ComplexBox::point(0.0, 0.0) {
        n -= 1;
    }
    &b[..n]
}

fn l2(b: &[ComplexBox]) -> RealInterval {
    b.iter().fold(RealInterval::zero(), |acc, c| acc.add(&c.abs().sqr())).sqrt()
}

/// Integer coefficients as exact boxes.
pub fn int_coeffs(b: &[i64]) -> Vec<ComplexBox> {
    b.iter().map(|&c| ComplexBox::real(c as f64)).collect()
}

/// max_i |B(ξ_i)| ≥ (1 − d^(3/2)·D(ξ)·max_i max{1, |ξ_i|}^(d−2))·‖b‖₂,
/// the first factor dropped for constant B.
pub fn l2_bound_lemma32(points: &PointTuple, b: &[ComplexBox], tol: f64) -> Result<RealInterval> {
    let b = trimmed(b);
    let d = points.len();
    if b.is_empty() {
        return Ok(RealInterval::zero());
    }
    let n = b.len() - 1;
    if n >= d {
        return Err(Error::DegreeTooLarge { degree: n, limit: d - 1 });
    }
    let norm = l2(b);
    if n == 0 {
        return Ok(norm);
    }
    let disc = discrepancy(points, tol)?.value;
    let big = points.norm().max(&RealInterval::point(1.0)).powi(d as u32 - 2);
    let w = RealInterval::point(d as f64).powf(1.5);
    let factor = RealInterval::point(1.0).sub(&w.mul(&disc).mul(&big));
    Ok(factor.mul(&norm))
}

/// max_i |B(ξ_i)| ≥ (1 − d^(3/2)·D(ξ/‖ξ‖))·(Σ |b_i·‖ξ‖^i|²)^(1/2).
pub fn l2_bound_cor33(points: &PointTuple, b: &[ComplexBox], tol: f64) -> Result<RealInterval> {
    let b = trimmed(b);
    let d = points.len();
    let norm = points.norm();
    if norm.hi <= 0.0 {
        return Err(Error::ZeroTuple);
    }
    if b.is_empty() {
        return Ok(RealInterval::zero());
    }
    let n = b.len() - 1;
    if n >= d {
        return Err(Error::DegreeTooLarge { degree: n, limit: d - 1 });
    }
    let scaled: Vec<ComplexBox> = b.iter().enumerate().map(|(i, c)| c.scale_real(&norm.powi(i as u32))).collect();
    let l = l2(&scaled);
    if n == 0 {
        return Ok(l);
    }
    let disc = discrepancy(&normalized_tuple(points)?, tol)?.value;
    Ok(one_minus_weighted(d, &disc).mul(&l))
}

/// For unit-circle points, index set I and exponent window J with
/// max J − min J < |I|:
/// max_i |B(ξ_i)| ≥ (1 − |I|^(3/2)·D_I)·(Σ_{j∈J} |b_j|²)^(1/2) − Σ_{k∉J} |b_k|.
pub fn l2_bound_cor34(
    points: &PointTuple,
    b: &[ComplexBox],
    idx: &BTreeSet<usize>,
    window: &BTreeSet<usize>,
    tol: f64,
) -> Result<RealInterval> {
    if let Some(p) = points.iter().find(|p| !p.abs().contains(1.0)) {
        return Err(Error::InvalidInput(format!("point {} + {}i is not on the unit circle", p.re, p.im)));
    }
    if idx.is_empty() || window.is_empty() {
        return Err(Error::InvalidInput("index set and exponent set must be nonempty".into()));
    }
    let (jmin, jmax) = (*window.first().unwrap(), *window.last().unwrap());
    if jmax - jmin >= idx.len() {
        return Err(Error::InvalidInput(format!(
            "exponent spread {} must be below |I| = {}",
            jmax - jmin,
            idx.len()
        )));
    }
    let sub = points.select(&idx.iter().copied().collect::<Vec<_>>())?;
    let disc = discrepancy(&sub, tol)?.value;
    let inside: Vec<ComplexBox> = window.iter().map(|&j| b.get(j).copied().unwrap_or(ComplexBox::real(0.0))).collect();
    let penalty = b
        .iter()
        .enumerate()
        .filter(|(k, _)| !window.contains(k))
        .fold(RealInterval::zero(), |acc, (_, c)| acc.add(&c.abs()));
    Ok(one_minus_weighted(idx.len(), &disc).mul(&l2(&inside)).sub(&penalty))
}

/// Lower bound for house(elt) with elt = Σ a_m·ξ_k^m written in the top
/// generator ξ_k = p_k^(1/d_k) and a_m in the subtower:
/// max over σ of the subtower of (1 − d^(3/2)·D(τ_σ/‖τ_σ‖))·|σ(a_n)|·‖τ_σ‖^n.
pub fn house_lower_bound_lemma41(tower: &RadicalTower, elt: &TowerElement, tol: f64) -> Result<RealInterval> {
    let k = tower.len();
    if k == 0 {
        return Err(Error::EmptyTower);
    }
    if elt.nvars() != k {
        return Err(Error::InvalidInput("element and tower sizes differ".into()));
    }
    if !elt.involves(k) {
        return Err(Error::NotInTopGenerator(k));
    }
    let top = &tower.steps()[k - 1];
    let d = top.d_u32();
    let n = elt.degree_in(k);
    let lead = elt.coefficient_in(k, n).restrict(k - 1).expect("coefficient is free of x_k");
    // Conjugates of ξ_k over every σ: p^(1/d)·ζ_d^j, the same tuple for all σ.
    let modulus = top.generator_modulus();
    let tau = PointTuple::new((0..d).map(|j| ComplexBox::from_polar(&modulus, j as i64, d as u64)).collect())?;
    let disc = discrepancy(&normalized_tuple(&tau)?, tol)?.value;
    let factor = one_minus_weighted(d as usize, &disc).mul(&tau.norm().powi(n));
    let lead_abs: Vec<RealInterval> = if k == 1 {
        vec![RealInterval::from_rational(&Rational::from_integer(lead.constant_term())).abs()]
    } else {
        let sub = tower.prefix(k - 1);
        embeddings(&sub, &lead, tol)?.iter().map(|z| z.abs()).collect()
    };
    let mut best: Option<RealInterval> = None;
    for a in lead_abs {
        let v = factor.mul(&a);
        best = Some(match best {
            None => v,
            Some(b) => b.max(&v),
        });
    }
    Ok(best.unwrap())
}

/// Every element of O_i \ O_{i−1} has house at least η(K_{i−1}, ξ_i).
pub fn delta_lower_bound_prop45(tower: &RadicalTower, i: usize, tol: f64) -> Result<RealInterval> {
    eta_radical_step(tower, i, tol)
}

/// d^γ·(log p/(2d) − log d/(2(d−1))): lower bound for h_γ on K_i \ K_{i−1}
/// when p_i is fresh. Non-positive values are returned as is.
pub fn lemma91_delta_bound(gamma: f64, p: &Integer, d: &Integer) -> Result<RealInterval> {
    if !is_prime(p) || !is_prime(d) {
        return Err(Error::InvalidInput(format!("p = {p} and d = {d} must be prime")));
    }
    let pf = RealInterval::from_rational(&Rational::from_integer(p.clone()));
    let df = RealInterval::from_rational(&Rational::from_integer(d.clone()));
    let two = RealInterval::point(2.0);
    let a = pf.ln().div(&two.mul(&df));
    let b = df.ln().div(&two.mul(&df.sub(&RealInterval::point(1.0))));
    let core = a.sub(&b);
    Ok(if gamma == 0.0 { core } else { df.powf(gamma).mul(&core) })
}

/// True when a lower bound carries no information (≤ 0).
pub fn is_vacuous(bound: &RealInterval) -> bool {
    bound.hi <= 0.0
}

/// Side from which a claimed limit is approached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitSide {
    /// house(ξ_i) ∈ (t, 2^(1/d_i)·t).
    Above,
    /// house(ξ_i) ∈ (2^(−1/d_i)·t, t).
    Below,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub eta_values: Vec<RealInterval>,
    pub house_values: Vec<RealInterval>,
    pub prefix_liminf_eta: RealInterval,
    pub prefix_min_house: RealInterval,
    pub claimed_limit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_side: Option<LimitSide>,
    /// Per step: the house enclosure lies strictly inside the claimed window.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub window_checks: Vec<bool>,
    pub eta_vacuous: Vec<bool>,
    pub label: String,
}

pub const FINITE_PREFIX_LABEL: &str =
    "finite-prefix evidence: aggregates are minima over the listed steps, not the asymptotic liminf";

/// Window (t, 2^(1/d)·t) or (2^(−1/d)·t, t) for the claimed limit t.
pub fn claimed_window(t: &Rational, d: u32, side: LimitSide) -> (RealInterval, RealInterval) {
    let ti = RealInterval::from_rational(t);
    let root2 = RealInterval::point(2.0).root(d);
    match side {
        LimitSide::Above => (ti, root2.mul(&ti)),
        LimitSide::Below => (ti.div(&root2), ti),
    }
}

/// Per-step η and house of ξ_i with prefix minima. The aggregates describe the
/// finite prefix only.
pub fn northcott_report_thm13(
    tower: &RadicalTower,
    tol: f64,
    claimed: Option<(&Rational, LimitSide)>,
) -> Result<BoundsReport> {
    if tower.is_empty() {
        return Err(Error::EmptyTower);
    }
    let mut eta_values = Vec::new();
    let mut house_values = Vec::new();
    let mut window_checks = Vec::new();
    for (i, s) in tower.steps().iter().enumerate() {
        eta_values.push(eta_radical_step(tower, i + 1, tol)?);
        // house(ξ_i) depends only on the minimal polynomial x^d − p.
        let single = RadicalTower::new(vec![RadicalStep::new(s.p.clone(), s.d.clone())], OrderingMode::Weak)?;
        let h = house(&single, &TowerElement::generator(1, 1), tol)?.value;
        if let Some((t, side)) = claimed {
            let (lo, hi) = claimed_window(t, s.d_u32(), side);
            window_checks.push(h.lo > lo.hi && h.hi < hi.lo);
        }
        house_values.push(h);
    }
    let fold_min = |v: &[RealInterval]| v[1..].iter().fold(v[0], |a, b| a.min(b));
    Ok(BoundsReport {
        prefix_liminf_eta: fold_min(&eta_values),
        prefix_min_house: fold_min(&house_values),
        eta_vacuous: eta_values.iter().map(is_vacuous).collect(),
        eta_values,
        house_values,
        claimed_limit: claimed.map(|(t, _)| format_rational(t)),
        claimed_side: claimed.map(|(_, s)| s),
        window_checks,
        label: FINITE_PREFIX_LABEL.to_string(),
    })
}

impl BoundsReport {
    /// CSV with one row per step.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,eta_lo,eta_hi,house_lo,house_hi,window_ok\n");
        for (i, (e, h)) in self.eta_values.iter().zip(&self.house_values).enumerate() {
            let w = self.window_checks.get(i).map(|b| b.to_string()).unwrap_or_default();
            s.push_str(&format!("{},{},{},{},{},{}\n", i + 1, e.lo, e.hi, h.lo, h.hi, w));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::parse_element;

    const TOL: f64 = 1e-8;

    fn pts(v: &[(f64, f64)]) -> PointTuple {
        PointTuple::from_points(v).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn l2_bound_examples() {
        let pm = pts(&[(1.0, 0.0), (-1.0, 0.0)]);
        let v = l2_bound_lemma32(&pm, &int_coeffs(&[1, 1]), TOL).unwrap();
        assert!((v.mid() - 2f64.sqrt()).abs() < 1e-6);
        assert_eq!(l2_bound_lemma32(&pm, &int_coeffs(&[5]), TOL).unwrap().mid(), 5.0);
        let v = l2_bound_lemma32(&pts(&[(1.0, 0.0), (1.0, 0.0)]), &int_coeffs(&[1, 1]), TOL).unwrap();
        assert!(v.hi < 0.0);
        assert!(matches!(
            l2_bound_lemma32(&pm, &int_coeffs(&[1, 0, 1]), TOL),
            Err(Error::DegreeTooLarge { degree: 2, limit: 1 })
        ));
    }

    #[test]
    fn normalized_l2_bound_examples() {
        let roots = crate::numerics::complex_roots(&crate::exactcore::PolyZ::parse("x^3-5").unwrap(), 1e-12).unwrap();
        let v = l2_bound_cor33(&roots, &int_coeffs(&[0, 0, 1]), TOL).unwrap();
        assert!((v.mid() - 5f64.powf(2.0 / 3.0)).abs() < 1e-5);
        let v = l2_bound_cor33(&pts(&[(2.0, 0.0), (-2.0, 0.0)]), &int_coeffs(&[1, 1]), TOL).unwrap();
        assert!((v.mid() - 5f64.sqrt()).abs() < 1e-5);
        let r7 = crate::numerics::complex_roots(&crate::exactcore::PolyZ::parse("x^7-251").unwrap(), 1e-12).unwrap();
        assert!(l2_bound_cor33(&r7, &int_coeffs(&[1]), TOL).unwrap().contains(1.0));
    }

    #[test]
    fn windowed_l2_bound_examples() {
        let z4 = PointTuple::roots_of_unity(4);
        let all = set(&[0, 1, 2, 3]);
        let v = l2_bound_cor34(&z4, &int_coeffs(&[1, 1, 0]), &all, &set(&[0, 1]), TOL).unwrap();
        assert!((v.mid() - 2f64.sqrt()).abs() < 1e-5);
        let v = l2_bound_cor34(&z4, &int_coeffs(&[1, 1, 0, 1]), &all, &set(&[0, 1]), TOL).unwrap();
        assert!((v.mid() - (2f64.sqrt() - 1.0)).abs() < 1e-5);
        let v = l2_bound_cor34(&z4, &int_coeffs(&[2]), &set(&[0]), &set(&[0]), TOL).unwrap();
        assert!((v.mid() - 2.0).abs() < 1e-5);
        assert!(l2_bound_cor34(&z4, &int_coeffs(&[1, 1]), &set(&[0]), &set(&[0, 1]), TOL).is_err());
        assert!(l2_bound_cor34(&pts(&[(2.0, 0.0)]), &int_coeffs(&[1]), &set(&[0]), &set(&[0]), TOL).is_err());
    }

    #[test]
    fn house_bound_examples() {
        let t = RadicalTower::from_pairs(&[(5, 3)], OrderingMode::Weak).unwrap();
        let v = house_lower_bound_lemma41(&t, &parse_element("x1^2", &t).unwrap(), TOL).unwrap();
        assert!((v.mid() - 5f64.powf(2.0 / 3.0)).abs() < 1e-5);
        let t = RadicalTower::from_pairs(&[(131, 11)], OrderingMode::Weak).unwrap();
        let v = house_lower_bound_lemma41(&t, &parse_element("3*x1", &t).unwrap(), TOL).unwrap();
        assert!((v.mid() - 3.0 * 131f64.powf(1.0 / 11.0)).abs() < 1e-5);
        let t = RadicalTower::from_pairs(&[(251, 7), (2309, 11)], OrderingMode::Weak).unwrap();
        let v = house_lower_bound_lemma41(&t, &parse_element("x1*x2", &t).unwrap(), TOL).unwrap();
        assert!((v.mid() - 251f64.powf(1.0 / 7.0) * 2309f64.powf(1.0 / 11.0)).abs() < 1e-5);
        assert_eq!(
            house_lower_bound_lemma41(&t, &parse_element("x1", &t).unwrap(), TOL),
            Err(Error::NotInTopGenerator(2))
        );
    }

    #[test]
    fn height_bound_examples() {
        let v = lemma91_delta_bound(0.0, &101.into(), &5.into()).unwrap();
        assert!((v.mid() - 0.26033).abs() < 1e-4);
        let v = lemma91_delta_bound(0.0, &5.into(), &3.into()).unwrap();
        assert!(v.hi < 0.0 && is_vacuous(&v));
        let v = lemma91_delta_bound(1.0, &53.into(), &3.into()).unwrap();
        assert!((v.mid() - 3.0 * (53f64.ln() / 6.0 - 3f64.ln() / 4.0)).abs() < 1e-9);
        assert!(lemma91_delta_bound(0.0, &100.into(), &5.into()).is_err());
    }

    #[test]
    fn report_examples() {
        let t = RadicalTower::from_pairs(&[(251, 7), (2309, 11), (8293, 13)], OrderingMode::Weak).unwrap();
        let r = northcott_report_thm13(&t, 1e-9, None).unwrap();
        let mids: Vec<f64> = r.house_values.iter().map(|h| h.mid()).collect();
        for (m, want) in mids.iter().zip([2.2019, 2.0219, 2.0019]) {
            assert!((m - want).abs() < 1e-3);
        }
        assert!(mids.windows(2).all(|w| w[0] > w[1]));
        assert!(r.prefix_liminf_eta.lo <= r.prefix_min_house.hi);
        let t = RadicalTower::from_pairs(&[(131, 11)], OrderingMode::Weak).unwrap();
        let half3 = Rational::new(3.into(), 2.into());
        let r = northcott_report_thm13(&t, 1e-9, Some((&half3, LimitSide::Above))).unwrap();
        assert_eq!(r.window_checks, vec![true]);
        let r = northcott_report_thm13(&t, 1e-9, Some((&half3, LimitSide::Below))).unwrap();
        assert_eq!(r.window_checks, vec![false]);
        let empty = RadicalTower::new(vec![], OrderingMode::Weak).unwrap();
        assert_eq!(northcott_report_thm13(&empty, 1e-9, None), Err(Error::EmptyTower));
    }
}
