//! Arithmetic of pure radical polynomials x^d − n.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{is_prime, modpow, Integer, PolyZ};
use crate::error::{invalid, Result};

/// |disc(x^d − n)| = d^d · n^(d−1).
pub fn pure_radical_discriminant(d: &Integer, n: &Integer) -> Result<Integer> {
    if d < &BigInt::one() || n < &BigInt::one() {
        return invalid("need d >= 1 and n >= 1");
    }
    let du = d.to_usize().filter(|&v| v <= 10_000).ok_or_else(|| {
        crate::error::Error::InvalidInput(format!("degree {d} too large"))
    })?;
    Ok(num_traits::pow(d.clone(), du) * num_traits::pow(n.clone(), du - 1))
}

fn require_odd_prime(x: &Integer, name: &str) -> Result<()> {
    if x.is_even() || !is_prime(x) {
        return invalid(format!("{name} = {x} is not an odd prime"));
    }
    Ok(())
}

/// Whether d² | p^d − p, i.e. p^(d−1) ≡ 1 (mod d²).
pub fn fermat_quotient_divides(p: &Integer, d: &Integer) -> Result<bool> {
    require_odd_prime(p, "p")?;
    require_odd_prime(d, "d")?;
    if p == d {
        return invalid("p and d must differ");
    }
    let d2 = d * d;
    Ok(modpow(p, &(d - 1u32), &d2).is_one())
}

/// ((d−1)^(d−1) − 1)/d mod d for an odd prime d.
pub fn fermat_quotient_residue(d: &Integer) -> Result<Integer> {
    require_odd_prime(d, "d")?;
    let d2 = d * d;
    let r = modpow(&(d - 1u32), &(d - 1u32), &d2);
    // (d−1)^(d−1) ≡ 1 (mod d), so r − 1 is divisible by d.
    Ok(((r - 1u32) / d).mod_floor(d))
}

/// Whether some prime divides n exactly once, making x^d − n Eisenstein.
///
/// Cofactors left after trial division to 10^6 are resolved only when prime;
/// composite cofactors with no small factor give `false` (inconclusive).
pub fn eisenstein_applicable(d: &Integer, n: &Integer) -> bool {
    if d < &BigInt::from(2) || n < &BigInt::from(2) {
        return false;
    }
    if is_prime(n) {
        return true;
    }
    let mut rest = n.clone();
    let mut f = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while &f * &f <= rest && f <= limit {
        if (&rest % &f).is_zero() {
            let mut e = 0;
            while (&rest % &f).is_zero() {
                rest /= &f;
                e += 1;
            }
            if e == 1 {
                return true;
            }
        }
        f += 1u32;
    }
    // Whatever is left is 1, a prime appearing once, or an unresolved composite.
    rest > BigInt::one() && is_prime(&rest)
}

/// Dedekind's criterion: whether q does not divide [O_K : Z[θ]] for θ a root
/// of the monic irreducible f.
///
/// With g the radical of f mod q and h = f̄/ḡ, lift both with coefficients in
/// [0, q), set F = (g·h − f)/q; q is coprime to the index iff gcd(F̄, ḡ, h̄) = 1.
pub fn dedekind_index_coprime(f: &PolyZ, q: &Integer) -> Result<bool> {
    if !f.is_monic() {
        return invalid("polynomial must be monic");
    }
    if !q.is_positive() || !is_prime(q) {
        return invalid(format!("q = {q} is not prime"));
    }
    let fbar = f.to_fq(q);
    let g = fbar.radical();
    let h = fbar.divrem(&g).0;
    let gh = g.lift().mul(&h.lift());
    let diff = gh.sub(f);
    let big_f = PolyZ::new(diff.coeffs().iter().map(|c| c / q).collect());
    debug_assert!(diff.coeffs().iter().all(|c| (c % q).is_zero()));
    let common = big_f.to_fq(q).gcd(&g).gcd(&h);
    Ok(common.degree() == Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(n: i64) -> Integer {
        n.into()
    }

    #[test]
    fn discriminants() {
        assert_eq!(pure_radical_discriminant(&i(3), &i(2)).unwrap(), i(108));
        assert_eq!(pure_radical_discriminant(&i(2), &i(3)).unwrap(), i(12));
        assert_eq!(pure_radical_discriminant(&i(3), &i(5)).unwrap(), i(675));
        assert!(pure_radical_discriminant(&i(0), &i(5)).is_err());
    }

    #[test]
    fn fermat_quotients() {
        assert!(!fermat_quotient_divides(&i(5), &i(3)).unwrap());
        assert!(fermat_quotient_divides(&i(17), &i(3)).unwrap());
        assert!(!fermat_quotient_divides(&i(131), &i(11)).unwrap());
        assert!(fermat_quotient_divides(&i(4), &i(3)).is_err());
        assert!(fermat_quotient_divides(&i(3), &i(3)).is_err());
        for d in [3, 5, 7] {
            assert_eq!(fermat_quotient_residue(&i(d)).unwrap(), i(1));
        }
        assert!(fermat_quotient_residue(&i(9)).is_err());
    }

    #[test]
    fn eisenstein() {
        assert!(eisenstein_applicable(&i(7), &i(251)));
        assert!(!eisenstein_applicable(&i(3), &i(4)));
        assert!(eisenstein_applicable(&i(5), &i(12)));
        assert!(!eisenstein_applicable(&i(5), &i(36)));
    }

    #[test]
    fn dedekind_examples() {
        let f5 = PolyZ::parse("x^3-5").unwrap();
        let f17 = PolyZ::parse("x^3-17").unwrap();
        assert!(dedekind_index_coprime(&f5, &i(3)).unwrap());
        assert!(!dedekind_index_coprime(&f17, &i(3)).unwrap());
        assert!(dedekind_index_coprime(&f5, &i(5)).unwrap());
        // x^2 − 5: index of Z[√5] is 2.
        assert!(!dedekind_index_coprime(&PolyZ::parse("x^2-5").unwrap(), &i(2)).unwrap());
        assert!(dedekind_index_coprime(&PolyZ::parse("x^2-3").unwrap(), &i(2)).unwrap());
        assert!(dedekind_index_coprime(&PolyZ::parse("2x^2-3").unwrap(), &i(2)).is_err());
        assert!(dedekind_index_coprime(&f5, &i(4)).is_err());
    }
}
