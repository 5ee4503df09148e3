use henon_lab::boettcher::{derive_lift_polynomial, DeriveOptions, LiftPolynomial, Strategy as LiftStrategy};
use henon_lab::covering::{
    compute_l_prime, deck_compose, deck_eval, is_subgroup, lifted_map, ratio_power, satisfies_l_prime_relation, DeckRational,
    LiftAlgebra, PushDirection, RootOfUnity,
};
use henon_lab::exact::{Coeff, QComplex};
use henon_lab::{sampling, HenonMap, Point};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn q(n: i64) -> QComplex {
    QComplex::from_int(n)
}

fn lift(d: u32, a0: QComplex) -> LiftPolynomial {
    let mut ex = vec![QComplex::default(); d as usize];
    ex[0] = a0;
    LiftPolynomial::from_exact(d, ex)
}

fn derived(d: u32, terms: &[(u32, i64)], a: i64) -> (HenonMap, LiftPolynomial) {
    let terms: Vec<(u32, QComplex)> = terms.iter().map(|&(j, c)| (j, q(c))).collect();
    let h = HenonMap::from_terms(d, &terms, q(a)).unwrap();
    let lp = derive_lift_polynomial(&h, LiftStrategy::FormalSeries, &DeriveOptions::for_degree(d)).unwrap();
    (h, lp)
}

fn dist(p: Point, r: Point) -> f64 {
    (p.0 - r.0).norm().hypot((p.1 - r.1).norm())
}

#[test]
fn push_examples() {
    let alg = LiftAlgebra::new(3, q(9)).unwrap();
    let zero = lift(3, q(0));
    for dir in [PushDirection::Plus, PushDirection::Minus] {
        assert_eq!(alg.push(&alg.identity(), dir, &zero).unwrap(), alg.identity());
    }
    let gamma = QComplex::from_ratio(5, 7);
    let f = alg.map(0, &gamma);
    let pushed = alg.push(&f, PushDirection::Plus, &zero).unwrap();
    assert_eq!(pushed, alg.map(0, &(&gamma * &q(3))));
}

#[test]
fn push_iterated_closed_forms() {
    let alg = LiftAlgebra::new(3, q(9)).unwrap();
    let gamma = QComplex::new((2, 3).into(), (-1).into());
    // c_α = 0: (d/a)^10 γ with exponent d^10·e.
    let f = alg.map(2, &gamma);
    let g = alg.push_iterated(&f, PushDirection::Minus, 10, &lift(3, q(0))).unwrap();
    assert_eq!(g.alpha, RootOfUnity::new(2 * 3i64.pow(10), 3));
    assert_eq!(g.gamma, alg.embed(&(&ratio_power(3, &q(9), 10) * &gamma)));
    // c_α ≠ 0, n = 2: γ₂ = γ/9 + (1 + 1/3)c_α.
    let qp = lift(3, q(2));
    let f = alg.map(1, &gamma);
    let c = alg.c_alpha(&f.alpha, &qp).unwrap();
    assert_eq!(c.to_qcomplex(), Some(q(-4)));
    let two = alg.push_iterated(&f, PushDirection::Minus, 2, &qp).unwrap();
    let expect = alg.embed(&gamma.scale(&(1, 9).into())).add_ref(&c.scale(&(4, 3).into()));
    assert_eq!(two.gamma, expect);
    assert_eq!(two, alg.push(&alg.push(&f, PushDirection::Minus, &qp).unwrap(), PushDirection::Minus, &qp).unwrap());
    assert_eq!(alg.push_iterated(&f, PushDirection::Minus, 0, &qp).unwrap(), f);
}

#[test]
fn deck_identity_and_quarter_squares_to_half() {
    let (h, qp) = derived(2, &[], 3);
    let a = h.a_c64();
    let mut rng = sampling::rng(11);
    let quarter = DeckRational::new(1, 2, 2).unwrap();
    let half = DeckRational::new(1, 1, 2).unwrap();
    for _ in 0..20 {
        let p = (sampling::in_disc(&mut rng, 3.0), Complex64::from_polar(rng.random_range(1.01..1.5), rng.random_range(0.0..6.3)));
        assert_eq!(deck_eval(&DeckRational::zero(2), p, &qp, a).unwrap(), p);
        let twice = deck_eval(&quarter, deck_eval(&quarter, p, &qp, a).unwrap(), &qp, a).unwrap();
        assert!(dist(twice, deck_eval(&half, p, &qp, a).unwrap()) < 1e-10);
    }
}

/// With H̃ = ((a/d)z + Q(ζ), ζ^d), H̃∘γ_r = γ_{dr}∘H̃; with d/a in place of
/// a/d the identity breaks.
#[test]
fn deck_commutation_pins_the_convention() {
    for (d, a) in [(2u32, 3i64), (3, 9)] {
        let (h, qp) = derived(d, &[], a);
        let a = h.a_c64();
        let mut rng = sampling::rng(d as u64);
        let (mut good, mut bad) = (0.0f64, 0.0f64);
        for _ in 0..50 {
            let n = rng.random_range(1..=3u32);
            let r = DeckRational::new(rng.random_range(1..(d as i128).pow(n)), n, d).unwrap();
            let p = (sampling::in_disc(&mut rng, 2.0), Complex64::from_polar(rng.random_range(1.05..1.3), rng.random_range(0.0..6.3)));
            for (kappa, worst) in [(a / d as f64, &mut good), (d as f64 / a, &mut bad)] {
                let lhs = lifted_map(&qp, kappa, deck_eval(&r, p, &qp, a).unwrap());
                let rhs = deck_eval(&r.times_d(), lifted_map(&qp, kappa, p), &qp, a).unwrap();
                *worst = worst.max(dist(lhs, rhs));
            }
        }
        assert!(good < 1e-10, "d={d}: {good}");
        assert!(bad > 1.0, "d={d}: {bad}");
    }
}

/// Fiber-preserving lifts of one map differ by no nontrivial deck
/// transformation: f∘γ_r = g forces r = 0 and f = g (d = 2, denominators ≤ 8).
#[test]
fn fibered_lifts_are_unique() {
    let (h, qp) = derived(2, &[], 3);
    let alg = LiftAlgebra::new(2, q(3)).unwrap();
    let a = h.a_c64();
    let gammas = [q(0), q(1), QComplex::from_ratio(-1, 2), QComplex::i()];
    let maps: Vec<_> = (0..3).flat_map(|e| gammas.iter().map(move |g| (e, g.clone()))).map(|(e, g)| alg.map(e, &g)).collect();
    let pts: Vec<Point> = [(0.3, 1.2, 0.4), (-1.0, 1.7, 2.0), (0.5, 1.1, -2.5)]
        .iter()
        .map(|&(z, r, t)| (Complex64::new(z, 0.2), Complex64::from_polar(r, t)))
        .collect();
    let decks: Vec<DeckRational> = (0..8).map(|k| DeckRational::new(k, 3, 2).unwrap()).collect();
    for f in &maps {
        for g in &maps {
            for r in &decks {
                let same = pts.iter().all(|&p| {
                    let lhs = alg.apply(f, deck_eval(r, p, &qp, a).unwrap());
                    dist(lhs, alg.apply(g, p)) < 1e-9
                });
                assert_eq!(same, *r == DeckRational::zero(2) && f == g, "{r} {f:?} {g:?}");
            }
        }
    }
}

#[test]
fn l_prime_relation_and_vanishing_c_alpha() {
    for (d, terms, a) in [(2u32, vec![], 3i64), (2, vec![(0, 1)], 3), (3, vec![], 9), (3, vec![(1, 1)], 5), (4, vec![(1, 1)], 16)] {
        let (h, qp) = derived(d, &terms, a);
        let alg = LiftAlgebra::new(d, h.a().clone()).unwrap();
        let lp = compute_l_prime(&qp, 1e-9);
        assert!(is_subgroup(&lp));
        for e in 0..alg.modulus() as i64 {
            let alpha = alg.root(e);
            assert_eq!(satisfies_l_prime_relation(&alg, &alpha, &qp).unwrap(), lp.contains(&alpha), "d={d} e={e}");
            if lp.contains(&alpha) {
                // a/d ≠ 1 for every map here.
                assert!(alg.c_alpha(&alpha, &qp).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn compose_example_for_quadratic() {
    let alg = LiftAlgebra::new(2, q(3)).unwrap();
    let f = alg.map(1, &q(2));
    let g = alg.map(2, &q(5));
    let fg = alg.compose(&f, &g);
    assert_eq!(fg.alpha.e, 0);
    assert_eq!(fg.gamma, alg.embed(&q(7)));
    assert_eq!(alg.compose(&fg, &alg.invert(&fg)), alg.identity());
}

fn deck(d: u32) -> impl Strategy<Value = DeckRational> {
    (0u32..=3).prop_flat_map(move |n| (0..(d as i128).pow(n).max(1)).prop_map(move |k| DeckRational::new(k, n, d).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deck_eval_is_a_homomorphism(r1 in deck(3), r2 in deck(3), zr in -2.0f64..2.0, rho in 1.05f64..1.3, t in 0.0f64..6.3) {
        let qp = LiftPolynomial::from_exact(3, vec![QComplex::from_ratio(1, 2), q(-1), QComplex::i()]);
        let a = Complex64::new(9.0, 0.0);
        let p = (Complex64::new(zr, 0.5), Complex64::from_polar(rho, t));
        let lhs = deck_eval(&r1, deck_eval(&r2, p, &qp, a).unwrap(), &qp, a).unwrap();
        let rhs = deck_eval(&deck_compose(&r1, &r2), p, &qp, a).unwrap();
        prop_assert!(dist(lhs, rhs) < 1e-10);
    }

    #[test]
    fn deck_addition_is_abelian(r1 in deck(2), r2 in deck(2)) {
        prop_assert_eq!(deck_compose(&r1, &r2), deck_compose(&r2, &r1));
        prop_assert_eq!(deck_compose(&r1, &DeckRational::zero(2)), r1);
    }

    #[test]
    fn fiber_maps_form_a_group(e1 in 0i64..8, e2 in 0i64..8, e3 in 0i64..8, n1 in -9i64..9, n2 in -9i64..9, n3 in -9i64..9) {
        let alg = LiftAlgebra::new(3, q(9)).unwrap();
        let f = alg.map(e1, &QComplex::from_ratio(n1, 4));
        let g = alg.map(e2, &QComplex::new((n2, 3).into(), 1.into()));
        let h = alg.map(e3, &q(n3));
        prop_assert_eq!(alg.compose(&alg.compose(&f, &g), &h), alg.compose(&f, &alg.compose(&g, &h)));
        prop_assert_eq!(alg.compose(&f, &alg.invert(&f)), alg.identity());
        prop_assert_eq!(alg.compose(&alg.invert(&f), &f), alg.identity());
    }
}
