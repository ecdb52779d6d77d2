use proptest::prelude::*;

use northcott::exactcore::{parse_rational, Rational};
use northcott::heights::{house, parse_element, weil_height_integral, OrderingMode, RadicalTower, TowerElement};
use northcott::numerics::RealInterval;

fn tower() -> RadicalTower {
    RadicalTower::from_pairs(&[(5, 3), (7, 2)], OrderingMode::Weak).unwrap()
}

fn element() -> impl Strategy<Value = TowerElement> {
    prop::collection::vec(((0u32..3, 0u32..2), -4i64..=4), 1..6)
        .prop_map(|terms| TowerElement::from_terms(2, terms.into_iter().map(|((a, b), c)| (vec![a, b], c.into()))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn element_display_parses_back(e in element()) {
        prop_assert_eq!(parse_element(&e.to_string(), &tower()).unwrap(), e);
    }

    #[test]
    fn nonzero_integral_elements_have_house_at_least_one(e in element()) {
        prop_assume!(!e.is_zero());
        let h = house(&tower(), &e, 1e-9).unwrap().value;
        prop_assert!(h.hi >= 1.0 - 1e-9, "{} has house {}", e, h);
        let w = weil_height_integral(&tower(), &e, 1e-9).unwrap().value;
        prop_assert!(w.hi >= 0.0);
    }

    #[test]
    fn interval_arithmetic_contains_float_results(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let (x, y) = (RealInterval::point(a), RealInterval::point(b));
        prop_assert!(x.add(&y).contains(a + b));
        prop_assert!(x.mul(&y).contains(a * b));
        prop_assert!(x.sub(&y).contains(a - b));
        if b != 0.0 {
            prop_assert!(x.div(&y).contains(a / b));
        }
    }

    #[test]
    fn outward_decimals_enclose(lo in -100f64..100.0, w in 0f64..1.0, digits in 0u32..12) {
        let v = RealInterval::new(lo, lo + w);
        let (l, h) = v.outward_decimal(digits);
        let (l, h) = (parse_rational(&l).unwrap(), parse_rational(&h).unwrap());
        prop_assert!(l < Rational::from_float(v.lo).unwrap());
        prop_assert!(h > Rational::from_float(v.hi).unwrap());
    }
}
