//! Finite discrepancy of point tuples against rotated roots of unity, and the
//! η invariants built from it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heights::RadicalTower;
use crate::numerics::{ComplexBox, PointTuple, RealInterval};

/// Evaluations allowed before the rotation search gives up.
pub const MAX_EVALUATIONS: usize = 4_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: RealInterval,
    pub argmin_u: ComplexBox,
    pub grid_step: f64,
}

/// D_u = max_j min_i |ξ_i − u·ζ_d^j| with box arithmetic.
pub fn d_u(points: &PointTuple, u: &ComplexBox) -> Result<RealInterval> {
    if !u.abs().contains(1.0) {
        return Err(Error::InvalidInput("rotation u must lie on the unit circle".into()));
    }
    let d = points.len();
    let mut worst: Option<RealInterval> = None;
    for j in 0..d {
        let t = u.mul(&ComplexBox::unit_turn(j as i64, d as u64));
        let mut best: Option<RealInterval> = None;
        for p in points.iter() {
            let dist = p.dist(&t);
            best = Some(match best {
                None => dist,
                Some(b) => b.min(&dist),
            });
        }
        let b = best.unwrap();
        worst = Some(match worst {
            None => b,
            Some(w) => w.max(&b),
        });
    }
    Ok(worst.unwrap())
}

/// Fast enclosure of D at rotation angle θ: plain f64 evaluation widened by a
/// bound on its rounding error and the input radii.
struct RotationEvaluator {
    centers: Vec<(f64, f64)>,
    slack: f64,
    d: usize,
}

impl RotationEvaluator {
    fn new(points: &PointTuple) -> Self {
        let centers: Vec<(f64, f64)> = points.iter().map(|p| (p.re, p.im)).collect();
        let scale = centers.iter().map(|(x, y)| x.abs() + y.abs()).fold(1.0, f64::max) + 1.0;
        let d = centers.len();
        let slack = points.max_radius() + 64.0 * f64::EPSILON * scale * (1.0 + (d as f64).log2());
        RotationEvaluator { centers, slack, d }
    }

    fn eval(&self, theta: f64) -> RealInterval {
        let mut worst: f64 = 0.0;
        for j in 0..self.d {
            let (s, c) = (theta + TAU * j as f64 / self.d as f64).sin_cos();
            let best = self
                .centers
                .iter()
                .map(|&(x, y)| (x - c) * (x - c) + (y - s) * (y - s))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        let v = worst.sqrt();
        RealInterval::new((v - self.slack).max(0.0), v + self.slack)
    }
}

struct Cell {
    lower: f64,
    a: f64,
    b: f64,
    mid_value: RealInterval,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    // Min-heap on the lower bound, ties broken by position for determinism.
    fn cmp(&self, o: &Self) -> Ordering {
        o.lower.total_cmp(&self.lower).then_with(|| o.a.total_cmp(&self.a))
    }
}

fn push_cell(heap: &mut BinaryHeap<Cell>, a: f64, b: f64, v: RealInterval, best_hi: &mut f64, best_theta: &mut f64) {
    if v.hi < *best_hi {
        *best_hi = v.hi;
        *best_theta = 0.5 * (a + b);
    }
    heap.push(Cell { lower: v.lo - 0.5 * (b - a) * (1.0 + 1e-12), a, b, mid_value: v });
}

/// D(ξ) = inf over rotations u of D_u(ξ), enclosed to width ≤ tol.
///
/// D_u is 1-Lipschitz in the rotation angle and has period 2π/d, so a cell of
/// width w around θ has infimum at least D(θ) − w/2. Cells are refined in
/// order of their lower bounds until the best upper bound is within tol.
pub fn discrepancy(points: &PointTuple, tol: f64) -> Result<DiscrepancyResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let ev = RotationEvaluator::new(points);
    if 2.0 * ev.slack >= tol {
        return Err(Error::PrecisionFailure(format!(
            "input radius {:e} leaves no room for tolerance {tol:e}",
            points.max_radius()
        )));
    }
    let period = TAU / points.len() as f64;
    let cells0 = 16;
    let mut heap = BinaryHeap::new();
    let mut best_hi = f64::INFINITY;
    let mut best_theta = 0.0;
    let mut evals = 0usize;
    for k in 0..cells0 {
        let a = period * k as f64 / cells0 as f64;
        let b = period * (k + 1) as f64 / cells0 as f64;
        let v = ev.eval(0.5 * (a + b));
        evals += 1;
        push_cell(&mut heap, a, b, v, &mut best_hi, &mut best_theta);
    }
    loop {
        let cell = heap.pop().expect("heap never empties");
        let lower = cell.lower.max(0.0);
        if best_hi - lower <= tol {
            let (s, c) = best_theta.sin_cos();
            return Ok(DiscrepancyResult {
                value: RealInterval::new(lower.min(best_hi), best_hi),
                argmin_u: ComplexBox::new(c, s, 4.0 * f64::EPSILON),
                grid_step: cell.b - cell.a,
            });
        }
        let w = cell.b - cell.a;
        if evals >= MAX_EVALUATIONS || w <= 1e-14 * period {
            return Err(Error::PrecisionFailure(format!(
                "rotation search stalled at width {:e} after {evals} evaluations",
                best_hi - lower
            )));
        }
        let t = w / 3.0;
        let (a, b) = (cell.a, cell.b);
        let left = ev.eval(a + 0.5 * t);
        let right = ev.eval(b - 0.5 * t);
        evals += 2;
        push_cell(&mut heap, a, a + t, left, &mut best_hi, &mut best_theta);
        push_cell(&mut heap, a + t, b - t, cell.mid_value, &mut best_hi, &mut best_theta);
        push_cell(&mut heap, b - t, b, right, &mut best_hi, &mut best_theta);
    }
}

/// c_ξ = ξ / ‖ξ‖.
pub fn normalized_tuple(points: &PointTuple) -> Result<PointTuple> {
    let n = points.norm();
    if n.lo <= 0.0 {
        return Err(Error::ZeroTuple);
    }
    Ok(points.map(|p| p.div_real(&n)))
}

/// η₀ = min{‖α‖, ‖α‖^(d−1)}·(1 − d^(3/2)·D(α/‖α‖)); may be negative.
pub fn eta0(points: &PointTuple, tol: f64) -> Result<RealInterval> {
    let d = points.len();
    let norm = points.norm();
    let c = normalized_tuple(points)?;
    let disc = discrepancy(&c, tol)?.value;
    let m = norm.min(&norm.powi(d as u32 - 1));
    Ok(m.mul(&one_minus_weighted(d, &disc)))
}

/// 1 − d^(3/2)·D.
pub(crate) fn one_minus_weighted(d: usize, disc: &RealInterval) -> RealInterval {
    let w = RealInterval::point(d as f64).powf(1.5);
    RealInterval::point(1.0).sub(&w.mul(disc))
}

/// η for the i-th step (1-based) of a pure radical tower: every conjugate
/// tuple of ξ_i is a rotated copy of p^(1/d)·(d-th roots of unity), so D = 0
/// and η = min{p^(1/d), p^((d−1)/d)} = p^(1/d).
pub fn eta_radical_step(tower: &RadicalTower, i: usize, tol: f64) -> Result<RealInterval> {
    let s = tower.step(i)?;
    let d = s.d_u32();
    let v = s.power_modulus(1).min(&s.power_modulus(d - 1));
    if v.width() > tol {
        return Err(Error::PrecisionFailure(format!("η enclosure width {:e} exceeds {tol:e}", v.width())));
    }
    Ok(v)
}

/// {α_k^(1/n)·ζ_n^ℓ}: all n-th roots of every entry.
pub fn root_lift(points: &PointTuple, n: u32) -> Result<PointTuple> {
    PointTuple::new(points.iter().flat_map(|p| p.nth_roots(n)).collect())
}

/// {α_i·β_j} over all pairs.
pub fn product_tuple(a: &PointTuple, b: &PointTuple) -> Result<PointTuple> {
    PointTuple::new(a.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-7;

    fn pts(v: &[(f64, f64)]) -> PointTuple {
        PointTuple::from_points(v).unwrap()
    }

    #[test]
    fn fixed_rotation_examples() {
        let s2 = 2f64.sqrt();
        let i = ComplexBox::point(0.0, 1.0);
        assert!(d_u(&pts(&[(1.0, 0.0), (-1.0, 0.0)]), &i).unwrap().contains(s2));
        assert!(d_u(&pts(&[(1.0, 0.0), (1.0, 0.0)]), &i).unwrap().contains(s2));
        let z3 = PointTuple::roots_of_unity(3);
        let v = d_u(&z3, &ComplexBox::point(1.0, 0.0)).unwrap();
        assert!(v.contains(0.0) && v.hi < 1e-13);
        assert!(d_u(&z3, &ComplexBox::point(2.0, 0.0)).is_err());
    }

    #[test]
    fn closed_form_discrepancies() {
        let r = discrepancy(&pts(&[(3.0, 0.0)]), TOL).unwrap();
        assert!(r.value.contains(2.0) && r.value.width() <= TOL);
        let r = discrepancy(&pts(&[(1.0, 0.0), (1.0, 0.0)]), TOL).unwrap();
        assert!(r.value.contains(2f64.sqrt()));
        let r = discrepancy(&PointTuple::roots_of_unity(5), TOL).unwrap();
        assert!(r.value.lo == 0.0 && r.value.hi <= TOL);
        // The witness rotation achieves the upper endpoint.
        let w = d_u(&pts(&[(1.0, 0.0), (1.0, 0.0)]), &r.argmin_u).unwrap();
        assert!(w.lo >= 0.0);
    }

    #[test]
    fn witness_is_consistent() {
        let p = pts(&[(0.3, 0.9), (-1.2, 0.1), (0.2, -0.7)]);
        let r = discrepancy(&p, TOL).unwrap();
        let w = d_u(&p, &r.argmin_u).unwrap();
        assert!(w.lo <= r.value.hi + 1e-12);
    }

    #[test]
    fn normalization() {
        let n = normalized_tuple(&pts(&[(2.0, 0.0), (-2.0, 0.0)])).unwrap();
        assert!(n.points()[0].contains(num_complex::Complex64::new(1.0, 0.0)));
        let n = normalized_tuple(&pts(&[(3.0, 0.0), (1.0, 0.0)])).unwrap();
        assert!(n.points()[1].abs().contains(1.0 / 3.0));
        assert_eq!(normalized_tuple(&pts(&[(0.0, 0.0)])), Err(Error::ZeroTuple));
    }

    #[test]
    fn eta_examples() {
        let e = eta0(&pts(&[(1.0, 0.0), (1.0, 0.0)]), TOL).unwrap();
        assert!((e.mid() + 3.0).abs() < 1e-5);
        let roots = crate::numerics::complex_roots(&crate::exactcore::PolyZ::parse("x^3-5").unwrap(), 1e-12).unwrap();
        let e = eta0(&roots, TOL).unwrap();
        assert!((e.mid() - 5f64.cbrt()).abs() < 1e-5);
        let t = RadicalTower::from_pairs(&[(251, 7), (2309, 11)], Default::default()).unwrap();
        let e = eta_radical_step(&t, 2, 1e-9).unwrap();
        assert!(e.contains(2309f64.powf(1.0 / 11.0)));
        assert!(eta_radical_step(&t, 3, 1e-9).is_err());
    }
}
