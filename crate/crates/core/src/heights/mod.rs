//! Radical towers, their elements and embeddings, and the house, Weil height
//! and degree-weighted height of tower elements.

mod element;
mod tower;

pub use element::{parse_element, TowerElement};
pub use tower::{OrderingMode, RadicalStep, RadicalTower, StepChecks, MAX_STEP_DEGREE};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::{Integer, Rational};
use crate::numerics::{ComplexBox, PointTuple, RealInterval};

/// Embedding counts beyond this are refused.
pub const MAX_EMBEDDINGS: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "gamma", rename_all = "lowercase")]
pub enum HeightKind {
    House,
    Weil,
    Weighted(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub value: RealInterval,
    #[serde(flatten)]
    pub kind: HeightKind,
}

/// Boxes for (p^(1/d)·ζ_d^j)^m, indexed [step][j][m].
pub(crate) fn power_table(tower: &RadicalTower) -> Vec<Vec<Vec<ComplexBox>>> {
    tower
        .steps()
        .iter()
        .map(|s| {
            let d = s.d_u32();
            let moduli: Vec<RealInterval> = (0..d).map(|m| s.power_modulus(m)).collect();
            (0..d)
                .map(|j| {
                    (0..d)
                        .map(|m| ComplexBox::from_polar(&moduli[m as usize], ((j * m) % d) as i64, d as u64))
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Branch indices (j_1, …, j_k) of embedding number `idx` (mixed radix, last step fastest).
pub fn embedding_index(degrees: &[u32], mut idx: u64) -> Vec<u32> {
    let mut j = vec![0; degrees.len()];
    for i in (0..degrees.len()).rev() {
        j[i] = (idx % degrees[i] as u64) as u32;
        idx /= degrees[i] as u64;
    }
    j
}

fn embedding_count(tower: &RadicalTower) -> Result<u64> {
    tower
        .degree()
        .to_u64()
        .filter(|&n| n <= MAX_EMBEDDINGS)
        .ok_or_else(|| Error::InvalidInput(format!("tower degree {} exceeds {MAX_EMBEDDINGS}", tower.degree())))
}

fn check_vars(tower: &RadicalTower, elt: &TowerElement) -> Result<()> {
    if elt.nvars() != tower.len() {
        return Err(Error::InvalidInput(format!(
            "element has {} variables, tower has {} steps",
            elt.nvars(),
            tower.len()
        )));
    }
    let degs = tower.degrees();
    for e in elt.terms().keys() {
        for (i, (&m, &d)) in e.iter().zip(&degs).enumerate() {
            if m >= d {
                return Err(Error::ExponentOutOfRange { var: i + 1, exponent: m as u64, bound: d });
            }
        }
    }
    Ok(())
}

fn int_box(c: &Integer) -> ComplexBox {
    ComplexBox::from_interval(&RealInterval::from_rational(&Rational::from_integer(c.clone())))
}

/// σ(elt) for every embedding σ of the top field, in embedding-index order.
pub fn embeddings(tower: &RadicalTower, elt: &TowerElement, tol: f64) -> Result<PointTuple> {
    check_vars(tower, elt)?;
    let n = embedding_count(tower)?;
    let table = power_table(tower);
    let degrees = tower.degrees();
    let terms: Vec<(&Vec<u32>, ComplexBox)> = elt.terms().iter().map(|(e, c)| (e, int_box(c))).collect();
    let values: Vec<ComplexBox> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let j = embedding_index(&degrees, idx);
            let mut acc = ComplexBox::real(0.0);
            for (e, c) in &terms {
                let mut t = *c;
                for (i, &m) in e.iter().enumerate() {
                    if m > 0 {
                        t = t.mul(&table[i][j[i] as usize][m as usize]);
                    }
                }
                acc = acc.add(&t);
            }
            acc
        })
        .collect();
    let pts = PointTuple::new(values)?;
    if pts.max_radius() > tol {
        return Err(Error::PrecisionFailure(format!(
            "embedding radius {:e} exceeds tolerance {tol:e}",
            pts.max_radius()
        )));
    }
    Ok(pts)
}

fn check_width(v: RealInterval, tol: f64) -> Result<RealInterval> {
    if v.width() > tol {
        return Err(Error::PrecisionFailure(format!("enclosure width {:e} exceeds {tol:e}", v.width())));
    }
    Ok(v)
}

/// Maximum modulus over all conjugates.
pub fn house(tower: &RadicalTower, elt: &TowerElement, tol: f64) -> Result<HeightValue> {
    check_vars(tower, elt)?;
    if elt.is_zero() {
        return Err(Error::ZeroElement);
    }
    let value = if elt.is_constant() {
        RealInterval::from_rational(&Rational::from_integer(elt.constant_term().abs()))
    } else {
        check_width(embeddings(tower, elt, tol)?.norm(), tol)?
    };
    Ok(HeightValue { value, kind: HeightKind::House })
}

/// Weil height of an algebraic integer: the mean of log max(1, |σ(elt)|).
pub fn weil_height_integral(tower: &RadicalTower, elt: &TowerElement, tol: f64) -> Result<HeightValue> {
    check_vars(tower, elt)?;
    if elt.is_zero() {
        return Err(Error::ZeroElement);
    }
    let one = RealInterval::point(1.0);
    let value = if elt.is_constant() {
        RealInterval::from_rational(&Rational::from_integer(elt.constant_term().abs())).max(&one).ln().pos()
    } else {
        let pts = embeddings(tower, elt, tol)?;
        let sum = pts.iter().fold(RealInterval::zero(), |acc, z| acc.add(&z.abs().max(&one).ln().pos()));
        check_width(sum.scale(1.0 / pts.len() as f64).inflate(0.0).pos(), tol)?
    };
    Ok(HeightValue { value, kind: HeightKind::Weil })
}

/// deg^γ · h; exact pass-through at γ = 0.
pub fn weighted_height(gamma: f64, degree: &Integer, h: &RealInterval) -> Result<RealInterval> {
    if !degree.is_positive() {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    if gamma == 0.0 {
        return Ok(*h);
    }
    let d = RealInterval::from_rational(&Rational::from_integer(degree.clone()));
    Ok(d.powf(gamma).mul(h))
}

/// Degree of elt over Q from the coincidence pattern of its embedding values.
/// Generators and rational integers are answered exactly.
pub fn element_degree_over_q(tower: &RadicalTower, elt: &TowerElement, tol: f64) -> Result<u64> {
    check_vars(tower, elt)?;
    if elt.is_zero() {
        return Err(Error::ZeroElement);
    }
    if elt.is_constant() {
        return Ok(1);
    }
    if elt.terms().len() == 1 {
        let (e, _) = elt.terms().iter().next().unwrap();
        let used: Vec<usize> = (0..e.len()).filter(|&i| e[i] > 0).collect();
        if used.len() == 1 {
            // c·x_i^m with 0 < m < d_i generates Q(x_i), of degree d_i.
            return Ok(tower.degrees()[used[0]] as u64);
        }
    }
    let pts = embeddings(tower, elt, tol)?;
    let n = pts.len();
    // Connected components of the "enclosures may coincide" graph.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let boxes = pts.points();
    for a in 0..n {
        for b in a + 1..n {
            if boxes[a].dist(&boxes[b]).lo <= 0.0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut sizes = std::collections::BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        *sizes.entry(r).or_insert(0usize) += 1;
    }
    let s = *sizes.values().next().unwrap();
    if sizes.values().any(|&c| c != s) || n % s != 0 {
        return Err(Error::Indeterminate(format!(
            "embedding clusters of unequal sizes {:?}",
            sizes.values().collect::<Vec<_>>()
        )));
    }
    Ok((n / s) as u64)
}

/// Total degree ∏ d_i as a convenience for weighted heights of tower fields.
pub fn tower_degree(tower: &RadicalTower) -> BigInt {
    tower.degree()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn tower(pairs: &[(u64, u64)]) -> RadicalTower {
        RadicalTower::from_pairs(pairs, OrderingMode::Weak).unwrap()
    }

    fn elt(s: &str, t: &RadicalTower) -> TowerElement {
        parse_element(s, t).unwrap()
    }

    #[test]
    fn embeddings_of_generators_and_constants() {
        let t = tower(&[(5, 3)]);
        let e = embeddings(&t, &elt("x1", &t), TOL).unwrap();
        for z in e.iter() {
            assert!(z.abs().contains(5f64.cbrt()));
        }
        let t2 = tower(&[(2, 3)]);
        let h = house(&t2, &elt("1 + x1", &t2), TOL).unwrap();
        assert!(h.value.contains(1.0 + 2f64.cbrt()));
        let c = embeddings(&t, &elt("7", &t), TOL).unwrap();
        assert!(c.iter().all(|z| z.contains(num_complex::Complex64::new(7.0, 0.0))));
    }

    #[test]
    fn house_examples() {
        let t = tower(&[(131, 11)]);
        let h = house(&t, &elt("x1", &t), TOL).unwrap();
        assert!(h.value.contains(131f64.powf(1.0 / 11.0)));
        assert!((h.value.mid() - 1.557683).abs() < 1e-6);
        let h = house(&t, &elt("-3", &t), TOL).unwrap();
        assert_eq!(h.value.mid(), 3.0);
        assert!(matches!(house(&t, &TowerElement::zero(1), TOL), Err(Error::ZeroElement)));
    }

    #[test]
    fn weil_heights() {
        let t = tower(&[(5, 3)]);
        let h = weil_height_integral(&t, &elt("x1", &t), TOL).unwrap();
        assert!(h.value.contains(5f64.ln() / 3.0));
        let h = weil_height_integral(&t, &elt("1", &t), TOL).unwrap();
        assert!(h.value.contains(0.0) && h.value.lo >= 0.0);
        let t = tower(&[(131, 11)]);
        let h = weil_height_integral(&t, &elt("x1", &t), TOL).unwrap();
        assert!((h.value.mid() - 0.443200).abs() < 1e-6);
    }

    #[test]
    fn weighted_examples() {
        let h = RealInterval::around(5f64.ln() / 3.0);
        assert!(weighted_height(1.0, &3.into(), &h).unwrap().contains(5f64.ln()));
        assert_eq!(weighted_height(0.0, &7.into(), &h).unwrap(), h);
        assert!(weighted_height(0.5, &4.into(), &RealInterval::point(1.0)).unwrap().contains(2.0));
    }

    #[test]
    fn degrees() {
        let t = tower(&[(5, 3)]);
        assert_eq!(element_degree_over_q(&t, &elt("x1", &t), TOL).unwrap(), 3);
        assert_eq!(element_degree_over_q(&t, &elt("7", &t), TOL).unwrap(), 1);
        let t2 = tower(&[(251, 7), (2309, 11)]);
        assert_eq!(element_degree_over_q(&t2, &elt("x1*x2", &t2), TOL).unwrap(), 77);
        assert_eq!(element_degree_over_q(&t2, &elt("x1 + x1^2", &t2), TOL).unwrap(), 7);
    }

    #[test]
    fn house_is_submultiplicative() {
        let t = tower(&[(5, 3), (7, 2)]);
        let a = elt("1 + x1", &t);
        let b = elt("x2 - x1", &t);
        let ab = a.mul(&b, &t.degrees()).unwrap();
        let (ha, hb, hab) = (house(&t, &a, TOL).unwrap(), house(&t, &b, TOL).unwrap(), house(&t, &ab, TOL).unwrap());
        assert!(hab.value.lo <= ha.value.hi * hb.value.hi + 1e-9);
    }
}
