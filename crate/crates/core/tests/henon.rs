use henon_lab::exact::QComplex;
use henon_lab::henon::{boundary_samples, estimate_filtration_radius, normalize, Direction, RawHenonMap};
use henon_lab::polymap::{compose_poly_maps, Poly2, PolyMap2};
use henon_lab::HenonMap;
use num_complex::Complex64;
use proptest::prelude::*;

fn q(n: i64) -> QComplex {
    QComplex::from_int(n)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quadratic() -> HenonMap {
    HenonMap::from_terms(2, &[], q(3)).unwrap()
}

#[test]
fn forward_fixed_point_and_round_trip() {
    let h = quadratic();
    assert_eq!(h.forward((c(4.0, 0.0), c(4.0, 0.0))), (c(4.0, 0.0), c(4.0, 0.0)));
    let z = (c(1.5, 0.0), c(-2.25, 0.5));
    let back = h.evaluate(h.evaluate(z, Direction::Forward), Direction::Inverse);
    assert!((back.0 - z.0).norm() < 1e-12 && (back.1 - z.1).norm() < 1e-12);
}

#[test]
fn orbit_overflows_for_huge_n() {
    let h = quadratic();
    let orbit = h.iterate_orbit((c(0.0, 0.0), c(10.0, 0.0)), 1000);
    let step = orbit.overflow_step.expect("doubly exponential growth overflows");
    assert!(step < 20);
    assert_eq!(orbit.points.len(), step);
    assert_eq!(h.iterate_orbit((c(0.0, 0.0), c(10.0, 0.0)), 0).points.len(), 1);
}

#[test]
fn second_iterate_by_hand() {
    // H∘H = (y² − 3x, (y² − 3x)² − 3y).
    let h = quadratic().to_polymap();
    let hh = compose_poly_maps(&h, &h);
    let u = Poly2::y().mul(&Poly2::y()).sub(&Poly2::x().scale(&q(3)));
    let second = u.mul(&u).sub(&Poly2::y().scale(&q(3)));
    assert_eq!(hh, PolyMap2::new(u, second));
}

#[test]
fn inverse_composes_to_identity() {
    let h = HenonMap::from_terms(3, &[(0, QComplex::from_ratio(1, 2)), (1, q(-2))], QComplex::new(2.into(), 1.into())).unwrap();
    let id = PolyMap2::identity();
    assert_eq!(compose_poly_maps(&h.to_polymap(), &h.inverse_polymap()), id);
    assert_eq!(compose_poly_maps(&h.inverse_polymap(), &h.to_polymap()), id);
    assert_eq!(compose_poly_maps(&h.to_polymap(), &id), h.to_polymap());
}

#[test]
fn normalize_round_trips_exactly() {
    // P(y) = 2y² + 4y + 1, a = 3.
    let raw = RawHenonMap {
        p: vec![q(1), q(4), q(2)],
        a: q(3),
    };
    let (h, conj) = normalize(&raw).unwrap();
    assert!(conj.exact);
    assert_eq!(h.d(), 2);
    // A∘H′ = H∘A with A(x, y) = (λx + μ, λy + μ).
    let a = conj.to_polymap();
    assert_eq!(compose_poly_maps(&a, &h.to_polymap()), compose_poly_maps(&raw.to_polymap(), &a));
    // Idempotence.
    let mut full = h.coeffs().to_vec();
    full.extend([q(0), q(1)]);
    let again = RawHenonMap { p: full, a: h.a().clone() };
    let (h2, conj2) = normalize(&again).unwrap();
    assert!(conj2.is_identity());
    assert_eq!(h2, h);
}

#[test]
fn filtration_radius_examples() {
    assert_eq!(estimate_filtration_radius(&quadratic()).r, 8.0);
    let cubic = HenonMap::from_terms(3, &[], q(9)).unwrap();
    let fr = estimate_filtration_radius(&cubic);
    assert!((fr.r - 20f64.sqrt()).abs() < 1e-12);
    let r = fr.r;
    let (x1, y1) = cubic.forward((c(r, 0.0), c(r, 0.0)));
    assert!(y1.norm() >= 2.0 * r && y1.norm() >= x1.norm());
}

#[test]
fn boundary_doubling_on_ten_thousand_samples() {
    for h in [quadratic(), HenonMap::from_terms(3, &[], q(9)).unwrap(), HenonMap::from_terms(4, &[(1, q(1))], q(16)).unwrap()] {
        let r = estimate_filtration_radius(&h).r;
        for z in boundary_samples(r, 10_000) {
            let (x1, y1) = h.forward(z);
            assert!(y1.norm() >= 2.0 * z.1.norm() * (1.0 - 1e-12), "{z:?}");
            assert!(y1.norm() >= x1.norm().max(r));
        }
    }
}

#[test]
fn points_outside_the_bidisc_enter_v_plus() {
    // Outside V_R ∪ V_R⁻ means V_R⁺ already; points of V_R⁻ with a large
    // y-coordinate reach V_R⁺ within a few steps unless they sit near K⁺.
    let h = quadratic();
    let r = estimate_filtration_radius(&h).r;
    let mut entered = 0;
    let total = 1000;
    for k in 0..total {
        let t = k as f64 / total as f64;
        let x = Complex64::from_polar(r * (1.0 + 3.0 * t), 37.0 * t);
        let y = Complex64::from_polar(r * (0.2 + 0.7 * t), 11.0 * t);
        if h.in_v_minus((x, y), r) {
            let orbit = h.iterate_orbit((x, y), 64);
            if orbit.overflow_step.is_some() || orbit.points.iter().any(|&p| h.in_v_plus(p, r)) {
                entered += 1;
            }
        }
    }
    assert!(entered > 0);
}

fn small_q() -> impl Strategy<Value = QComplex> {
    (-6i64..=6, 1i64..=4, -6i64..=6).prop_map(|(a, b, c)| QComplex::new((a, b).into(), (c, b).into()))
}

fn quadratic_map() -> impl Strategy<Value = PolyMap2<QComplex>> {
    proptest::collection::vec(small_q(), 6).prop_map(|v| {
        let mono = |i, j, c: &QComplex| {
            let mut p = Poly2::zero();
            p.add_term(i, j, c.clone());
            p
        };
        let first = mono(0, 0, &v[0]).add(&mono(1, 0, &v[1])).add(&mono(0, 2, &v[2]));
        let second = mono(0, 1, &v[3]).add(&mono(2, 0, &v[4])).add(&mono(1, 1, &v[5]));
        PolyMap2::new(first, second)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_is_associative(f in quadratic_map(), g in quadratic_map(), h in quadratic_map()) {
        prop_assert_eq!(
            compose_poly_maps(&compose_poly_maps(&f, &g), &h),
            compose_poly_maps(&f, &compose_poly_maps(&g, &h))
        );
    }
}

proptest! {
    #[test]
    fn inverse_undoes_forward(xr in -7.0f64..7.0, xi in -7.0f64..7.0, yr in -7.0f64..7.0, yi in -7.0f64..7.0) {
        let h = HenonMap::from_terms(3, &[(0, QComplex::from_ratio(1, 3)), (1, q(2))], q(5)).unwrap();
        let z = (c(xr, xi), c(yr, yi));
        let back = h.inverse(h.forward(z));
        let scale = 1.0 + z.0.norm().max(z.1.norm()).powi(3);
        prop_assert!((back.0 - z.0).norm() <= 1e-12 * scale && (back.1 - z.1).norm() <= 1e-12 * scale);
    }
}
