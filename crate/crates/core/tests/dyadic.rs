use henon_lab::dyadic::{factorize, ring_arith, subgroup_membership, unit_decompose, unit_value, RingElem, RingOp, UnitDecomposition};
use henon_lab::selftest::has_bounded_inverse;
use proptest::prelude::*;

fn el(m: i128, k: u32, d: u64) -> RingElem {
    RingElem::new(m, k, d).unwrap()
}

#[test]
fn ring_examples() {
    assert_eq!(el(1, 1, 2).add(&el(1, 1, 2)).unwrap(), el(1, 0, 2));
    assert_eq!(el(4, 1, 6).mul(&el(9, 1, 6)).unwrap(), RingElem::one(6));
    let x = el(-7, 3, 12);
    assert_eq!(ring_arith(RingOp::Add, &x, &RingElem::zero(12)).unwrap(), x);
    assert_eq!(ring_arith(RingOp::Mul, &x, &RingElem::one(12)).unwrap(), x);
    assert_eq!(ring_arith(RingOp::Neg, &x, &x).unwrap(), el(7, 3, 12));
}

#[test]
fn unit_examples() {
    let u = unit_decompose(&el(4, 1, 6)).unwrap();
    assert_eq!(u, UnitDecomposition { sign: 1, exponents: vec![1, -1] });
    assert_eq!(unit_value(&u, 6).unwrap(), el(4, 1, 6));
    assert_eq!(subgroup_membership(&u, 6), None);
    assert!(unit_decompose(&el(5, 1, 6)).is_none());
    assert!(!has_bounded_inverse(&el(5, 1, 6)).unwrap());
    assert!(unit_decompose(&RingElem::zero(6)).is_none());
    let one = unit_decompose(&RingElem::one(6)).unwrap();
    assert_eq!(one.exponents, vec![0, 0]);
    assert_eq!(subgroup_membership(&one, 6), Some(0));
    for d in [2u64, 6, 12, 30] {
        let ud = unit_decompose(&el(d as i128, 0, d)).unwrap();
        assert_eq!(subgroup_membership(&ud, d), Some(1));
        let inv = unit_decompose(&el(1, 1, d)).unwrap();
        assert_eq!(subgroup_membership(&inv, d), Some(-1));
    }
    assert_eq!(subgroup_membership(&unit_decompose(&el(-6, 0, 6)).unwrap(), 6), None);
}

#[test]
fn unit_criterion_matches_inverse_search() {
    for d in [2u64, 6, 12] {
        for m in -500i128..=500 {
            for k in 0..=4 {
                let x = el(m, k, d);
                assert_eq!(unit_decompose(&x).is_some(), has_bounded_inverse(&x).unwrap(), "{x}");
            }
        }
    }
}

#[test]
fn normal_form_is_unique() {
    for d in [2u64, 6, 12] {
        for m in -500i128..=500 {
            for k in 0..=4 {
                let x = el(m, k, d);
                assert_eq!(el(x.numerator(), x.exponent(), d), x);
                // m/d^k = (m·d)/d^{k+1}.
                assert_eq!(el(m * d as i128, k + 1, d), x);
                assert!(x.exponent() == 0 || x.numerator() % d as i128 != 0);
            }
        }
    }
}

/// x ↦ u·x on the window {m/d^k : |m| ≤ M, k ≤ K} hits 1 exactly when u is
/// a unit, and is injective there.
#[test]
fn multiplication_by_units_is_bijective_on_windows() {
    let d = 6u64;
    let window: Vec<RingElem> = (-300i128..=300).flat_map(|m| (0..=3).map(move |k| el(m, k, d))).collect();
    for (m, k) in [(4i128, 1u32), (3, 0), (-2, 2), (5, 0), (7, 1), (10, 1)] {
        let u = el(m, k, d);
        let images: std::collections::HashSet<_> = window.iter().map(|x| u.mul(x).unwrap()).collect();
        let unique: std::collections::HashSet<_> = window.iter().collect();
        assert_eq!(images.len(), unique.len());
        let hits_one = window.iter().any(|x| u.mul(x).unwrap() == RingElem::one(d));
        assert_eq!(hits_one, unit_decompose(&u).is_some(), "{u}");
    }
}

#[test]
fn factorization_of_small_numbers() {
    assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    assert_eq!(factorize(97), vec![(97, 1)]);
    assert!(factorize(1).is_empty());
}

fn elem(d: u64) -> impl Strategy<Value = RingElem> {
    (-500i128..=500, 0u32..=4).prop_map(move |(m, k)| el(m, k, d))
}

fn unit(d: u64) -> impl Strategy<Value = RingElem> {
    let primes: Vec<u64> = factorize(d).into_iter().map(|(p, _)| p).collect();
    (proptest::collection::vec(0u32..=3, primes.len()), 0u32..=3, any::<bool>()).prop_map(move |(e, k, neg)| {
        let m: i128 = primes.iter().zip(&e).map(|(&p, &n)| (p as i128).pow(n)).product();
        el(if neg { -m } else { m }, k, d)
    })
}

proptest! {
    #[test]
    fn ring_laws(x in elem(12), y in elem(12), z in elem(12)) {
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.mul(&y.add(&z).unwrap()).unwrap(), x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap());
        prop_assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn decompositions_add_under_multiplication(u in unit(12), v in unit(12)) {
        let (du, dv) = (unit_decompose(&u).unwrap(), unit_decompose(&v).unwrap());
        let duv = unit_decompose(&u.mul(&v).unwrap()).unwrap();
        prop_assert_eq!(duv.sign, du.sign * dv.sign);
        let sum: Vec<i64> = du.exponents.iter().zip(&dv.exponents).map(|(a, b)| a + b).collect();
        prop_assert_eq!(duv.exponents, sum);
        prop_assert_eq!(unit_value(&du, 12).unwrap(), u);
    }

    #[test]
    fn parse_round_trips(x in elem(6)) {
        prop_assert_eq!(RingElem::parse_with(&x.to_string(), 6).unwrap(), x);
    }
}
