use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};

use northcott::exactcore::{
    dedekind_index_coprime, factor_fq_naive, fermat_quotient_divides, fermat_quotient_residue, is_prime,
    pure_radical_discriminant, PolyFq, PolyZ,
};
use northcott::oracle::{discriminant_via_resultant, pure_radical_irreducible};

/// Dedekind's criterion from an explicit factorization: q is coprime to the
/// index iff no repeated factor φ of f mod q divides (g·h − f)/q mod q.
fn dedekind_by_factoring(f: &PolyZ, q: u64) -> bool {
    let qb = BigInt::from(q);
    let factors = factor_fq_naive(&f.to_fq(&qb)).unwrap();
    let mut g = PolyZ::from_i64(&[1]);
    let mut h = PolyZ::from_i64(&[1]);
    for (phi, e) in &factors {
        let lift = phi.lift();
        g = g.mul(&lift);
        for _ in 1..*e {
            h = h.mul(&lift);
        }
    }
    let diff = g.mul(&h).sub(f);
    assert!(diff.coeffs().iter().all(|c| (c % &qb).is_zero()));
    let big_f = PolyZ::new(diff.coeffs().iter().map(|c| c / &qb).collect()).to_fq(&qb);
    factors.iter().filter(|(_, e)| *e >= 2).all(|(phi, _)| !big_f.divrem(phi).1.is_zero())
}

fn monic_polys(deg: usize, bound: i64) -> impl Iterator<Item = PolyZ> {
    let width = (2 * bound + 1) as u64;
    let count = width.pow(deg as u32);
    (0..count).map(move |mut idx| {
        let mut c: Vec<i64> = (0..deg)
            .map(|_| {
                let v = (idx % width) as i64 - bound;
                idx /= width;
                v
            })
            .collect();
        c.push(1);
        PolyZ::from_i64(&c)
    })
}

#[test]
fn dedekind_matches_factorization() {
    let mut checked = 0;
    for deg in 1..=5 {
        let bound = if deg == 5 { 2 } else { 3 };
        for f in monic_polys(deg, bound) {
            for q in [2u64, 3, 5] {
                let fast = dedekind_index_coprime(&f, &BigInt::from(q)).unwrap();
                assert_eq!(fast, dedekind_by_factoring(&f, q), "f = {f}, q = {q}");
                checked += 1;
            }
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn dedekind_known_cases() {
    let f = PolyZ::parse("x^3-17").unwrap();
    assert!(!dedekind_index_coprime(&f, &3.into()).unwrap());
    let f = PolyZ::parse("x^2-5").unwrap();
    assert!(!dedekind_index_coprime(&f, &2.into()).unwrap());
    assert!(dedekind_index_coprime(&PolyZ::parse("x^2-3").unwrap(), &2.into()).is_ok());
}

#[test]
fn fermat_residue_matches_direct_power() {
    for d in (3u64..=200).filter(|&d| is_prime(&d.into())) {
        let db = BigInt::from(d);
        let direct = (num_traits::pow(&db - 1u32, (d - 1) as usize) - 1u32) / &db;
        assert_eq!(fermat_quotient_residue(&db).unwrap(), direct.mod_floor(&db), "d = {d}");
    }
}

#[test]
fn fermat_divisibility_matches_direct_power() {
    let odd_primes: Vec<u64> = (3u64..120).filter(|&n| is_prime(&n.into())).collect();
    for &p in &odd_primes {
        for &d in odd_primes.iter().filter(|&&d| d != p && d < 40) {
            let (pb, db) = (BigInt::from(p), BigInt::from(d));
            let direct = ((num_traits::pow(pb.clone(), d as usize) - &pb) % (&db * &db)).is_zero();
            assert_eq!(fermat_quotient_divides(&pb, &db).unwrap(), direct, "p = {p}, d = {d}");
        }
    }
    // 11^70 ≡ 1 (mod 71²).
    assert!(fermat_quotient_divides(&11.into(), &71.into()).unwrap());
}

#[test]
fn discriminant_matches_resultant() {
    let mut checked = 0;
    for d in 2u32..=6 {
        for n in 2i64..=30 {
            let nb = BigInt::from(n);
            if !pure_radical_irreducible(d, &nb) {
                continue;
            }
            let f = PolyZ::pure_radical(d as usize, &nb);
            let closed = pure_radical_discriminant(&BigInt::from(d), &nb).unwrap();
            assert_eq!(closed, discriminant_via_resultant(&f).unwrap(), "d = {d}, n = {n}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn irreducibility_rejects_powers() {
    assert!(!pure_radical_irreducible(2, &BigInt::from(9)));
    assert!(!pure_radical_irreducible(6, &BigInt::from(8)));
    assert!(pure_radical_irreducible(6, &BigInt::from(12)));
    assert!(pure_radical_irreducible(1, &BigInt::one()));
}

#[test]
fn naive_factorization_reassembles() {
    let q = BigInt::from(3);
    let f = PolyFq::from_u64(3, &[2, 0, 0, 0, 1]);
    let mut prod = PolyFq::from_u64(3, &[1]);
    for (phi, e) in factor_fq_naive(&f).unwrap() {
        for _ in 0..e {
            prod = prod.mul(&phi);
        }
    }
    assert_eq!(prod.lift(), f.monic().lift());
    assert_eq!(prod.modulus(), &q);
}
