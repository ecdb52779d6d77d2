//! Seeded property suites for the lower bounds. Each suite draws its
//! instances from a ChaCha8 stream, so a (suite, seed, count) triple always
//! replays the same instances.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    house_lower_bound_lemma41, int_coeffs, l2_bound_cor33, l2_bound_cor34, l2_bound_lemma32, lemma91_delta_bound,
    delta_lower_bound_prop45,
};
use crate::discrepancy::{discrepancy, product_tuple, root_lift};
use crate::error::{Error, Result};
use crate::heights::{house, weil_height_integral, OrderingMode, RadicalTower, TowerElement};
use crate::numerics::{eval_box, ComplexBox, PointTuple, RealInterval};

/// Suite names with their default instance counts.
pub const SUITES: &[(&str, usize)] = &[
    ("l2-bound", 1000),
    ("l2-bound-normalized", 1000),
    ("l2-bound-window", 1000),
    ("house-bound", 500),
    ("min-house", 500),
    ("root-lift", 500),
    ("product", 500),
    ("weil-bound", 500),
    ("linear-house", 500),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub tol: f64,
    pub instances: usize,
    pub violations: usize,
    /// Smallest value of (observed − bound + 3·tol) over all instances.
    pub worst_margin: f64,
    /// Descriptions of the first few violations.
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// One instance outcome: observed value, bound, and a description.
struct Outcome {
    observed: f64,
    bound: f64,
    what: String,
}

/// Points scattered in the disc of radius r, or a perturbed rotated copy of
/// r·(d-th roots of unity) so the discrepancy is small.
fn random_points(rng: &mut ChaCha8Rng, d: usize, r: f64) -> PointTuple {
    let near = rng.gen_bool(0.5);
    let u = rng.gen_range(0.0..std::f64::consts::TAU);
    let scale = if near { rng.gen_range(0.2..r) } else { r };
    let noise = if near { rng.gen_range(0.0..0.05) } else { 0.0 };
    let pts: Vec<ComplexBox> = (0..d)
        .map(|j| {
            if near {
                let a = u + std::f64::consts::TAU * j as f64 / d as f64;
                let e = (rng.gen_range(-noise..=noise), rng.gen_range(-noise..=noise));
                ComplexBox::point(scale * a.cos() + e.0, scale * a.sin() + e.1)
            } else {
                let (m, a) = (scale * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
                ComplexBox::point(m * a.cos(), m * a.sin())
            }
        })
        .collect();
    PointTuple::new(pts).expect("finite points")
}

/// Unit-circle points at rational turns k/1024, optionally near-equidistributed.
fn unit_points(rng: &mut ChaCha8Rng, d: usize) -> PointTuple {
    let near = rng.gen_bool(0.5);
    let off = rng.gen_range(0..1024i64);
    let pts: Vec<ComplexBox> = (0..d)
        .map(|j| {
            let k = if near { off + (1024 * j as i64) / d as i64 + rng.gen_range(-3..=3) } else { rng.gen_range(0..1024) };
            ComplexBox::unit_turn(k.rem_euclid(1024), 1024)
        })
        .collect();
    PointTuple::new(pts).expect("finite points")
}

fn random_coeffs(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> Vec<i64> {
    let mut b: Vec<i64> = (0..len).map(|_| rng.gen_range(-bound..=bound)).collect();
    if b.iter().all(|&x| x == 0) {
        b[0] = 1;
    }
    b
}

fn max_abs(points: &PointTuple, b: &[ComplexBox]) -> f64 {
    points.iter().map(|z| eval_box(b, z).abs().hi).fold(0.0, f64::max)
}

fn small_towers() -> Vec<RadicalTower> {
    let pairs: &[&[(u64, u64)]] = &[&[(5, 3)], &[(2, 3)], &[(131, 11)], &[(101, 5)], &[(3, 5)], &[(7, 2), (5, 3)], &[(2, 3), (3, 2)]];
    pairs.iter().map(|p| RadicalTower::from_pairs(p, OrderingMode::Weak).expect("valid tower")).collect()
}

/// Random element of O_i with coefficients in [−c, c] involving x_i.
fn random_new_element(rng: &mut ChaCha8Rng, tower: &RadicalTower, c: i64) -> TowerElement {
    let degrees = tower.degrees();
    let k = degrees.len();
    loop {
        let nterms = rng.gen_range(1..=4);
        let terms: Vec<(Vec<u32>, num_bigint::BigInt)> = (0..nterms)
            .map(|_| {
                let e: Vec<u32> = degrees.iter().map(|&d| rng.gen_range(0..d)).collect();
                (e, rng.gen_range(-c..=c).into())
            })
            .collect();
        let elt = TowerElement::from_terms(k, terms);
        if elt.involves(k) {
            return elt;
        }
    }
}

type Instance = Box<dyn Fn(f64) -> Result<Outcome> + Send + Sync>;

fn generate(name: &str, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Instance>> {
    let towers = small_towers();
    let mut out: Vec<Instance> = Vec::with_capacity(n);
    for _ in 0..n {
        let inst: Instance = match name {
            "l2-bound" | "l2-bound-normalized" => {
                let d = rng.gen_range(1..=8);
                let pts = random_points(rng, d, 3.0);
                let deg = rng.gen_range(0..d);
                let b = int_coeffs(&random_coeffs(rng, deg + 1, 5));
                let scaled = name == "l2-bound-normalized";
                Box::new(move |tol| {
                    let bound = if scaled { l2_bound_cor33(&pts, &b, tol)? } else { l2_bound_lemma32(&pts, &b, tol)? };
                    Ok(Outcome { observed: max_abs(&pts, &b), bound: bound.lo, what: format!("d = {}, b = {b:?}", pts.len()) })
                })
            }
            "l2-bound-window" => {
                let d = rng.gen_range(1..=8);
                let pts = unit_points(rng, d);
                let mut all: Vec<usize> = (0..d).collect();
                all.shuffle(rng);
                let size = rng.gen_range(1..=d);
                let idx: BTreeSet<usize> = all[..size].iter().copied().collect();
                let len = rng.gen_range(1..=2 * d);
                let b = int_coeffs(&random_coeffs(rng, len, 5));
                let lo = rng.gen_range(0..len);
                let spread = rng.gen_range(0..size).min(len - 1 - lo);
                let window: BTreeSet<usize> = (lo..=lo + spread).collect();
                Box::new(move |tol| {
                    let bound = l2_bound_cor34(&pts, &b, &idx, &window, tol)?;
                    Ok(Outcome { observed: max_abs(&pts, &b), bound: bound.lo, what: format!("I = {idx:?}, J = {window:?}") })
                })
            }
            "house-bound" | "min-house" => {
                let t = towers.choose(rng).expect("nonempty").clone();
                let elt = random_new_element(rng, &t, 3);
                let key = name == "min-house";
                Box::new(move |tol| {
                    let h = house(&t, &elt, tol)?.value;
                    let bound =
                        if key { delta_lower_bound_prop45(&t, t.len(), tol)? } else { house_lower_bound_lemma41(&t, &elt, tol)? };
                    Ok(Outcome { observed: h.hi, bound: bound.lo, what: format!("{elt} in {t}") })
                })
            }
            "root-lift" => {
                let m = rng.gen_range(1..=5);
                let n = rng.gen_range(1..=7u32);
                let u = rng.gen_range(0.0..std::f64::consts::TAU);
                let noise = rng.gen_range(0.0..0.3);
                let pts: Vec<ComplexBox> = (0..m)
                    .map(|j| {
                        let a = u + std::f64::consts::TAU * j as f64 / m as f64;
                        let r = 1.0 + rng.gen_range(-noise..=noise);
                        ComplexBox::point(r * a.cos(), r * a.sin())
                    })
                    .collect();
                let alpha = PointTuple::new(pts).expect("finite");
                Box::new(move |tol| {
                    let da = discrepancy(&alpha, tol)?.value;
                    if da.lo > 0.5 {
                        // Outside the precondition D(α) ≤ 1/2: vacuous.
                        return Ok(Outcome { observed: 1.0, bound: 0.0, what: "precondition fails".into() });
                    }
                    let dl = discrepancy(&root_lift(&alpha, n)?, tol)?.value;
                    let rhs = RealInterval::point(2.0 / n as f64).mul(&da);
                    // The inequality is an upper bound: observed = rhs, bound = D(lift).
                    Ok(Outcome { observed: rhs.hi, bound: dl.lo, what: format!("m = {m}, n = {n}") })
                })
            }
            "product" => {
                let (m, n) = loop {
                    let (m, n) = (rng.gen_range(1..=5usize), rng.gen_range(1..=5usize));
                    if num_integer::gcd(m, n) == 1 {
                        break (m, n);
                    }
                };
                let a = random_points(rng, m, 2.0);
                let b = random_points(rng, n, 2.0);
                Box::new(move |tol| {
                    let da = discrepancy(&a, tol)?.value;
                    let db = discrepancy(&b, tol)?.value;
                    let dp = discrepancy(&product_tuple(&a, &b)?, tol)?.value;
                    let one = RealInterval::point(1.0);
                    let rhs = one.add(&da).mul(&one.add(&db)).sub(&one);
                    Ok(Outcome { observed: rhs.hi, bound: dp.lo, what: format!("m = {m}, n = {n}") })
                })
            }
            "weil-bound" => {
                let (p, d) = loop {
                    let d = *[2u64, 3, 5, 7, 11, 13].choose(rng).expect("nonempty");
                    let p = rng.gen_range(2..=5000 / d);
                    if crate::exactcore::is_prime(&p.into()) && p != d {
                        let b = lemma91_delta_bound(0.0, &p.into(), &d.into())?;
                        if b.lo > 0.0 {
                            break (p, d);
                        }
                    }
                };
                let t = RadicalTower::from_pairs(&[(p, d)], OrderingMode::Weak)?;
                let elt = random_new_element(rng, &t, 2);
                Box::new(move |tol| {
                    let h = weil_height_integral(&t, &elt, tol)?.value;
                    let b = lemma91_delta_bound(0.0, &p.into(), &d.into())?;
                    Ok(Outcome { observed: h.hi, bound: b.lo, what: format!("{elt} in {t}") })
                })
            }
            "linear-house" => {
                let t = towers.choose(rng).expect("nonempty").clone();
                let k = t.len();
                let (a1, a0) = loop {
                    let a1: i64 = rng.gen_range(-5..=5);
                    if a1 != 0 {
                        break (a1, rng.gen_range(-5..=5i64));
                    }
                };
                let mut e = vec![0u32; k];
                e[k - 1] = 1;
                let elt = TowerElement::from_terms(k, [(e, a1.into()), (vec![0; k], a0.into())]);
                Box::new(move |tol| {
                    let h = house(&t, &elt, tol)?.value;
                    let xi = t.steps()[k - 1].generator_modulus();
                    let rhs = xi.scale(a1.unsigned_abs() as f64);
                    Ok(Outcome { observed: h.hi, bound: rhs.lo, what: format!("{elt} in {t}") })
                })
            }
            _ => return Err(Error::InvalidInput(format!("unknown suite {name:?}"))),
        };
        out.push(inst);
    }
    Ok(out)
}

/// Runs `count` instances (the suite default when `None`) and counts the
/// instances with observed < bound − 3·tol.
pub fn run_suite(name: &str, seed: u64, count: Option<usize>, tol: f64) -> Result<SuiteReport> {
    let default = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, c)| *c)
        .ok_or_else(|| Error::InvalidInput(format!("unknown suite {name:?}")))?;
    let n = count.unwrap_or(default);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances = generate(name, &mut rng, n)?;
    let outcomes: Vec<Result<Outcome>> = instances.par_iter().map(|f| f(tol)).collect();
    let mut report = SuiteReport {
        suite: name.to_string(),
        seed,
        tol,
        instances: n,
        violations: 0,
        worst_margin: f64::INFINITY,
        failures: Vec::new(),
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        let o = o?;
        let margin = o.observed - o.bound + 3.0 * tol;
        report.worst_margin = report.worst_margin.min(margin);
        if margin < 0.0 {
            report.violations += 1;
            if report.failures.len() < 5 {
                report.failures.push(format!("instance {i}: {} < {} ({})", o.observed, o.bound, o.what));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_deterministic() {
        let a = run_suite("l2-bound", 7, Some(20), 1e-8).unwrap();
        let b = run_suite("l2-bound", 7, Some(20), 1e-8).unwrap();
        assert_eq!(a, b);
        assert!(a.passed(), "{:?}", a.failures);
    }

    #[test]
    fn every_suite_runs() {
        for (name, _) in SUITES {
            let r = run_suite(name, 1, Some(10), 1e-8).unwrap();
            assert!(r.passed(), "{name}: {:?}", r.failures);
        }
        assert!(run_suite("nope", 1, None, 1e-8).is_err());
    }
}
