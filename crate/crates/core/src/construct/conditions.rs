use serde::{Deserialize, Serialize};

use crate::discrepancy::{discrepancy, normalized_tuple};
use crate::numerics::{PointTuple, RealInterval};

/// Allowed distance of (s/house)^(1/n) from 1 on a finite prefix.
pub const RATIO_TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub index: usize,
    pub discrepancy: Option<RealInterval>,
    /// D(c_γ) ≤ m^(−3/2)·(1 − house^(1/n − 1)).
    pub discrepancy_ok: bool,
    pub smallest_modulus: RealInterval,
    pub house: RealInterval,
    /// s ≥ 1.
    pub s_at_least_one: bool,
    /// (s/house)^(1/n).
    pub ratio: RealInterval,
    pub ratio_near_one: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub rows: Vec<ConditionRow>,
    /// Degree multiplicativity is taken from the caller, never checked here.
    pub degree_multiplicativity: String,
}

/// Checks, per index, the three conditions on (γ_i, n_i) that can be read off
/// the conjugates of γ_i: the discrepancy inequality, s_i ≥ 1 and the ratio
/// (s_i/house)^(1/n_i) being close to 1.
pub fn check_cor62_conditions(data: &[(PointTuple, u32)], tol: f64) -> ConditionReport {
    let one = RealInterval::point(1.0);
    let rows = data
        .iter()
        .enumerate()
        .map(|(index, (pts, n))| {
            let m = pts.len();
            let house = pts.norm();
            let smallest = pts.iter().map(|z| z.abs()).reduce(|a, b| a.min(&b)).unwrap_or(one);
            let nf = *n as f64;
            let ratio = if house.lo > 0.0 {
                smallest.div(&house).max(&RealInterval::zero()).powf(1.0 / nf)
            } else {
                RealInterval::zero()
            };
            let mut note = None;
            let disc = match normalized_tuple(pts).and_then(|c| discrepancy(&c, tol)) {
                Ok(r) => Some(r.value),
                Err(e) => {
                    note = Some(e.to_string());
                    None
                }
            };
            let rhs = RealInterval::point(m as f64)
                .powf(-1.5)
                .mul(&one.sub(&house.powf(1.0 / nf - 1.0)));
            ConditionRow {
                index,
                discrepancy_ok: *n > 1 && disc.is_some_and(|d| d.hi <= rhs.lo),
                discrepancy: disc,
                s_at_least_one: smallest.lo >= 1.0,
                smallest_modulus: smallest,
                house,
                ratio_near_one: (ratio.lo - 1.0).abs() <= RATIO_TOLERANCE && (ratio.hi - 1.0).abs() <= RATIO_TOLERANCE,
                ratio,
                note,
            }
        })
        .collect();
    ConditionReport { rows, degree_multiplicativity: "caller-asserted".into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::PolyZ;
    use crate::numerics::complex_roots;

    fn roots(f: &str) -> PointTuple {
        complex_roots(&PolyZ::parse(f).unwrap(), 1e-12).unwrap()
    }

    #[test]
    fn radical_roots_pass() {
        let r = check_cor62_conditions(&[(roots("x^7-251"), 3)], 1e-9);
        let row = &r.rows[0];
        assert!(row.discrepancy_ok && row.s_at_least_one && row.ratio_near_one, "{row:?}");
        assert_eq!(r.degree_multiplicativity, "caller-asserted");
    }

    #[test]
    fn doubled_point_fails_discrepancy() {
        let pts = PointTuple::from_points(&[(1.0, 0.0), (1.0, 0.0)]).unwrap();
        let row = &check_cor62_conditions(&[(pts, 2)], 1e-9).rows[0];
        assert!(!row.discrepancy_ok);
        assert!((row.discrepancy.unwrap().mid() - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn golden_conjugate_fails_lower_modulus() {
        let row = &check_cor62_conditions(&[(roots("x^2-x-1"), 5)], 1e-9).rows[0];
        assert!(!row.s_at_least_one);
        assert!((row.smallest_modulus.mid() - 0.618034).abs() < 1e-5);
    }
}
