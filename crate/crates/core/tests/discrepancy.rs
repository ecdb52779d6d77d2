use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use northcott::discrepancy::discrepancy;
use northcott::numerics::PointTuple;
use northcott::oracle::brute_discrepancy;

const GRID: usize = 4096;

#[test]
fn certified_value_agrees_with_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let d = rng.gen_range(1..=9);
        let pts: Vec<(f64, f64)> = (0..d).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let tuple = PointTuple::from_points(&pts).unwrap();
        let cert = discrepancy(&tuple, 1e-9).unwrap().value;
        let brute = brute_discrepancy(&tuple, GRID).unwrap();
        // The grid minimum overestimates by at most half a grid step.
        let step = TAU / (GRID * d) as f64;
        assert!(brute >= cert.lo - 1e-9, "{brute} < {cert:?}");
        assert!(brute <= cert.hi + 0.5 * step + 1e-9, "{brute} > {cert:?}");
    }
}

#[test]
fn roots_of_unity_have_zero_discrepancy() {
    for d in 1..=12 {
        let v = discrepancy(&PointTuple::roots_of_unity(d), 1e-9).unwrap().value;
        assert!(v.lo <= 0.0 && v.hi < 1e-8, "d = {d}: {v:?}");
        assert!(brute_discrepancy(&PointTuple::roots_of_unity(d), 16).unwrap() < 1e-12);
    }
}

#[test]
fn single_point() {
    let tuple = PointTuple::from_points(&[(3.0, 0.0)]).unwrap();
    let v = discrepancy(&tuple, 1e-6).unwrap().value;
    assert!(v.lo >= 1.999999 - 1e-12 && v.hi <= 2.000001 + 1e-12, "{v:?}");
}
