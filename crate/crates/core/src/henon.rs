//! Centered monic Hénon maps H(x, y) = (y, p(y) − a·x).

use std::f64::consts::TAU;

use num_complex::Complex64;
use rug::{ops::Pow, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Coeff, QComplex};
use crate::polymap::{Poly2, PolyMap2};

pub type Point = (Complex64, Complex64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// H(x, y) = (y, p(y) − a·x) with p(y) = y^d + a_{d−2}y^{d−2} + … + a₀.
#[derive(Clone, Debug, PartialEq)]
pub struct HenonMap {
    d: u32,
    a: QComplex,
    coeffs: Vec<QComplex>,
    a_c: Complex64,
    /// All coefficients of p as doubles, constant term first.
    p_c: Vec<Complex64>,
}

impl HenonMap {
    /// `coeffs` are a₀, …, a_{d−2}.
    pub fn new(d: u32, coeffs: Vec<QComplex>, a: QComplex) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidMap(format!("degree {d} is below 2")));
        }
        if coeffs.len() != d as usize - 1 {
            return Err(Error::InvalidMap(format!(
                "degree {d} needs {} centered coefficients, got {}",
                d - 1,
                coeffs.len()
            )));
        }
        if a.is_zero() {
            return Err(Error::InvalidMap("a must be nonzero".into()));
        }
        let mut p_c: Vec<Complex64> = coeffs.iter().map(QComplex::to_c64).collect();
        p_c.push(Complex64::new(0.0, 0.0));
        p_c.push(Complex64::new(1.0, 0.0));
        Ok(HenonMap {
            d,
            a_c: a.to_c64(),
            a,
            coeffs,
            p_c,
        })
    }

    /// The map (y, y^d − a·x) with the given coefficient pattern given as
    /// `(j, a_j)` pairs; convenient for tests and examples.
    pub fn from_terms(d: u32, terms: &[(u32, QComplex)], a: QComplex) -> Result<Self> {
        let mut coeffs = vec![QComplex::default(); d.saturating_sub(1) as usize];
        for (j, c) in terms {
            let slot = coeffs
                .get_mut(*j as usize)
                .ok_or_else(|| Error::InvalidMap(format!("coefficient index {j} outside 0..=d−2")))?;
            *slot = c.clone();
        }
        HenonMap::new(d, coeffs, a)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn a(&self) -> &QComplex {
        &self.a
    }

    pub fn a_c64(&self) -> Complex64 {
        self.a_c
    }

    /// a₀, …, a_{d−2}.
    pub fn coeffs(&self) -> &[QComplex] {
        &self.coeffs
    }

    /// a₀, …, a_{d−2} as doubles.
    pub fn coeffs_c64(&self) -> &[Complex64] {
        &self.p_c[..self.d as usize - 1]
    }

    pub fn p(&self, y: Complex64) -> Complex64 {
        self.p_c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c)
    }

    pub fn forward(&self, (x, y): Point) -> Point {
        (y, self.p(y) - self.a_c * x)
    }

    pub fn inverse(&self, (x, y): Point) -> Point {
        ((self.p(x) - y) / self.a_c, x)
    }

    pub fn evaluate(&self, z: Point, dir: Direction) -> Point {
        match dir {
            Direction::Forward => self.forward(z),
            Direction::Inverse => self.inverse(z),
        }
    }

    /// Orbit of length |n| + 1 (forward for n > 0, backward for n < 0),
    /// truncated at the first non-finite iterate.
    pub fn iterate_orbit(&self, z: Point, n: i64) -> Orbit {
        let dir = if n >= 0 { Direction::Forward } else { Direction::Inverse };
        let mut points = vec![z];
        let mut overflow_step = None;
        let mut cur = z;
        for step in 1..=n.unsigned_abs() {
            let next = self.evaluate(cur, dir);
            if !is_finite(next) {
                overflow_step = Some(step as usize);
                break;
            }
            points.push(next);
            cur = next;
        }
        Orbit {
            points,
            overflow_step,
        }
    }

    /// p as a polynomial in y with exact coefficients.
    pub fn p_poly(&self) -> Poly2<QComplex> {
        let mut p = Poly2::monomial(QComplex::from_int(1), 0, self.d);
        for (j, c) in self.coeffs.iter().enumerate() {
            p.add_term(0, j as u32, c.clone());
        }
        p
    }

    pub fn to_polymap(&self) -> PolyMap2<QComplex> {
        let second = self.p_poly().sub(&Poly2::x().scale(&self.a));
        PolyMap2::new(Poly2::y(), second)
    }

    pub fn inverse_polymap(&self) -> PolyMap2<QComplex> {
        let a_inv = self.a.inv().expect("a is nonzero");
        let p_of_x = self.p_poly().substitute(&Poly2::y(), &Poly2::x());
        PolyMap2::new(p_of_x.sub(&Poly2::y()).scale(&a_inv), Poly2::x())
    }

    /// τ(r) = Σ|a_j| r^{j−d} + |a| r^{1−d}, bounding |q(x,y)/y^d| for
    /// |y| = r ≥ |x|; decreasing in r.
    pub fn escape_tau(&self, r: f64) -> f64 {
        self.tau_with(r, self.a_c.norm())
    }

    /// Backward analogue of [`escape_tau`](Self::escape_tau) on V_R⁻.
    pub fn backward_tau(&self, r: f64) -> f64 {
        self.tau_with(r, 1.0)
    }

    fn tau_with(&self, r: f64, lin: f64) -> f64 {
        let d = self.d as i32;
        let s: f64 = self
            .coeffs_c64()
            .iter()
            .enumerate()
            .map(|(j, c)| c.norm() * r.powi(j as i32 - d))
            .sum();
        s + lin * r.powi(1 - d)
    }

    pub fn in_v_plus(&self, (x, y): Point, r: f64) -> bool {
        y.norm() >= x.norm().max(r)
    }

    pub fn in_v_minus(&self, (x, y): Point, r: f64) -> bool {
        x.norm() >= y.norm().max(r)
    }
}

fn is_finite((x, y): Point) -> bool {
    x.re.is_finite() && x.im.is_finite() && y.re.is_finite() && y.im.is_finite()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Orbit {
    pub points: Vec<Point>,
    /// Step at which an iterate left the double range; such orbits escape.
    pub overflow_step: Option<usize>,
}

/// (x, y) ↦ (λx + μ, λy + μ).
#[derive(Clone, Debug, PartialEq)]
pub struct AffineConjugation {
    pub lambda: QComplex,
    pub mu: QComplex,
    /// False when λ had no exact Gaussian-rational value and the normalized
    /// coefficients were rounded from double precision.
    pub exact: bool,
}

impl AffineConjugation {
    pub fn identity() -> Self {
        AffineConjugation {
            lambda: QComplex::from_int(1),
            mu: QComplex::default(),
            exact: true,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.lambda == QComplex::from_int(1) && self.mu.is_zero()
    }

    pub fn to_polymap(&self) -> PolyMap2<QComplex> {
        let mu = Poly2::constant(self.mu.clone());
        PolyMap2::new(
            Poly2::x().scale(&self.lambda).add(&mu),
            Poly2::y().scale(&self.lambda).add(&mu),
        )
    }
}

/// A Hénon map (y, P(y) − a·x) with arbitrary polynomial P of degree ≥ 2.
#[derive(Clone, Debug, PartialEq)]
pub struct RawHenonMap {
    /// Coefficients of P, constant term first; the last entry is the
    /// leading coefficient.
    pub p: Vec<QComplex>,
    pub a: QComplex,
}

impl RawHenonMap {
    pub fn degree(&self) -> usize {
        self.p.len().saturating_sub(1)
    }

    pub fn to_polymap(&self) -> PolyMap2<QComplex> {
        let mut second = Poly2::x().scale(&self.a.neg_ref());
        for (j, c) in self.p.iter().enumerate() {
            second.add_term(0, j as u32, c.clone());
        }
        PolyMap2::new(Poly2::y(), second)
    }
}

/// Conjugates a raw Hénon map to centered monic form H' = A⁻¹∘H∘A.
///
/// λ is the principal (d−1)-th root of 1/c_d and μ = −c_{d−1}/(d·c_d).
pub fn normalize(raw: &RawHenonMap) -> Result<(HenonMap, AffineConjugation)> {
    let d = raw.degree();
    if d < 2 {
        return Err(Error::InvalidMap(format!("degree {d} is below 2")));
    }
    let lead = &raw.p[d];
    if lead.is_zero() {
        return Err(Error::InvalidMap("leading coefficient is zero".into()));
    }
    if raw.a.is_zero() {
        return Err(Error::InvalidMap("a must be nonzero".into()));
    }
    let lead_inv = lead.inv().expect("nonzero");
    let mu = (&raw.p[d - 1] * &lead_inv)
        .scale(&Rational::from((-1, d as i64)));
    match exact_principal_root(&lead_inv, d as u32 - 1) {
        Some(lambda) => {
            let conj = AffineConjugation {
                lambda,
                mu,
                exact: true,
            };
            let p_new = conjugated_p(raw, &conj);
            let coeffs = p_new[..d - 1].to_vec();
            debug_assert_eq!(p_new[d], QComplex::from_int(1));
            debug_assert!(p_new[d - 1].is_zero());
            Ok((HenonMap::new(d as u32, coeffs, raw.a.clone())?, conj))
        }
        None => {
            let w = lead_inv.to_c64();
            let lambda = (w.ln() / (d as f64 - 1.0)).exp();
            let mu_c = mu.to_c64();
            let p_new = conjugated_p_c64(raw, lambda, mu_c);
            let mut coeffs = Vec::with_capacity(d - 1);
            for c in &p_new[..d - 1] {
                coeffs.push(QComplex::from_c64(*c).ok_or_else(|| {
                    Error::InvalidMap("normalized coefficients are not finite".into())
                })?);
            }
            let conj = AffineConjugation {
                lambda: QComplex::from_c64(lambda).expect("finite"),
                mu,
                exact: false,
            };
            Ok((HenonMap::new(d as u32, coeffs, raw.a.clone())?, conj))
        }
    }
}

/// Coefficients of (P(λy+μ) − aμ − μ)/λ.
fn conjugated_p(raw: &RawHenonMap, c: &AffineConjugation) -> Vec<QComplex> {
    let d = raw.degree();
    let mut out = vec![QComplex::default(); d + 1];
    // Horner in the polynomial ring: acc ← acc·(λy + μ) + c_j.
    for cj in raw.p.iter().rev() {
        let mut next = vec![QComplex::default(); d + 1];
        for (k, ak) in out.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            next[k] = &next[k] + &(ak * &c.mu);
            if k < d {
                next[k + 1] = &next[k + 1] + &(ak * &c.lambda);
            }
        }
        next[0] = &next[0] + cj;
        out = next;
    }
    let shift = &(&raw.a * &c.mu) + &c.mu;
    out[0] = &out[0] - &shift;
    let lambda_inv = c.lambda.inv().expect("nonzero");
    out.iter().map(|v| v * &lambda_inv).collect()
}

fn conjugated_p_c64(raw: &RawHenonMap, lambda: Complex64, mu: Complex64) -> Vec<Complex64> {
    let d = raw.degree();
    let mut out = vec![Complex64::new(0.0, 0.0); d + 1];
    for cj in raw.p.iter().rev() {
        let mut next = vec![Complex64::new(0.0, 0.0); d + 1];
        for k in 0..=d {
            next[k] += out[k] * mu;
            if k < d {
                next[k + 1] += out[k] * lambda;
            }
        }
        next[0] += cj.to_c64();
        out = next;
    }
    out[0] -= raw.a.to_c64() * mu + mu;
    let mut res: Vec<Complex64> = out.iter().map(|v| v / lambda).collect();
    res[d] = Complex64::new(1.0, 0.0);
    res[d - 1] = Complex64::new(0.0, 0.0);
    res
}

/// Principal n-th root of a Gaussian rational when it is again a Gaussian
/// rational and easy to recognise (real input, or the square root of a
/// negative rational).
fn exact_principal_root(w: &QComplex, n: u32) -> Option<QComplex> {
    if n == 1 {
        return Some(w.clone());
    }
    if !w.is_real() {
        return None;
    }
    let r = &w.re;
    let abs_root = rational_root(&Rational::from(r.abs_ref()), n)?;
    if *r > 0 {
        Some(QComplex::real(abs_root))
    } else if n == 2 {
        Some(QComplex::new(Rational::new(), abs_root))
    } else {
        None
    }
}

fn rational_root(r: &Rational, n: u32) -> Option<Rational> {
    let int_root = |i: &Integer| {
        let root = Integer::from(i.root_ref(n));
        (Integer::from((&root).pow(n)) == *i).then_some(root)
    };
    Some(Rational::from((int_root(r.numer())?, int_root(r.denom())?)))
}

/// Certified radius R with H(V_R⁺) ⊂ V_R⁺ and H⁻¹(V_R⁻) ⊂ V_R⁻, both with
/// modulus doubling.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FiltrationRadius {
    pub r: f64,
    /// max(1, (2(1+|a|+Σ|a_j|))^{1/(d−1)}); `r` exceeds it only when that
    /// value fails the doubling certificate.
    pub formula_r: f64,
    pub certificate_samples: Vec<Point>,
}

impl FiltrationRadius {
    /// Same certificate at radius `factor·R` (valid for factor ≥ 1).
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor >= 1.0);
        FiltrationRadius {
            r: self.r * factor,
            formula_r: self.formula_r,
            certificate_samples: Vec::new(),
        }
    }
}

/// Doubling holds for all radii ≥ r once it holds at r, since τ decreases
/// and r^{d−1} increases.
fn doubling_certified(map: &HenonMap, r: f64) -> bool {
    let dm1 = map.d as i32 - 1;
    let tf = map.escape_tau(r);
    let tb = map.backward_tau(r);
    tf < 0.5
        && tb < 0.5
        && r.powi(dm1) * (1.0 - tf) >= 2.0
        && r.powi(dm1) * (1.0 - tb) >= 2.0 * map.a_c.norm()
}

pub fn estimate_filtration_radius(map: &HenonMap) -> FiltrationRadius {
    let s: f64 = map.a_c.norm() + map.coeffs_c64().iter().map(|c| c.norm()).sum::<f64>();
    let formula_r = (2.0 * (1.0 + s)).powf(1.0 / (map.d as f64 - 1.0)).max(1.0);
    let mut r = formula_r;
    loop {
        while !doubling_certified(map, r) {
            r *= 2.0;
        }
        let samples = boundary_samples(r, 64);
        if samples.iter().all(|&z| {
            let (x1, y1) = map.forward(z);
            y1.norm() >= 2.0 * z.1.norm() && y1.norm() >= x1.norm().max(r)
        }) {
            return FiltrationRadius {
                r,
                formula_r,
                certificate_samples: samples,
            };
        }
        r *= 2.0;
    }
}

/// Points of ∂V_R⁺ (|y| = R ≥ |x|), including the corner |x| = |y| = R.
pub fn boundary_samples(r: f64, n: usize) -> Vec<Point> {
    const GOLDEN: f64 = 0.618_033_988_749_894_9;
    (0..n)
        .map(|k| {
            let t = k as f64;
            let ry = r;
            let rx = r * ((k % 4) as f64 / 3.0);
            (
                Complex64::from_polar(rx, TAU * (t * GOLDEN).fract()),
                Complex64::from_polar(ry, TAU * (t * GOLDEN * GOLDEN).fract()),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quadratic() -> HenonMap {
        HenonMap::from_terms(2, &[], QComplex::from_int(3)).unwrap()
    }

    #[test]
    fn fixed_points() {
        let h = quadratic();
        assert_eq!(h.forward((c(0.0, 0.0), c(0.0, 0.0))), (c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(h.forward((c(4.0, 0.0), c(4.0, 0.0))), (c(4.0, 0.0), c(4.0, 0.0)));
    }

    #[test]
    fn orbit_by_hand() {
        let h = quadratic();
        let z = (c(0.0, 0.0), c(10.0, 0.0));
        assert_eq!(h.iterate_orbit(z, 0).points, vec![z]);
        let o = h.iterate_orbit(z, 2);
        assert_eq!(
            o.points,
            vec![z, (c(10.0, 0.0), c(100.0, 0.0)), (c(100.0, 0.0), c(9970.0, 0.0))]
        );
        assert_eq!(o.overflow_step, None);
        let long = h.iterate_orbit(z, 1_000_000);
        let step = long.overflow_step.expect("doubly exponential growth overflows");
        assert_eq!(long.points.len(), step);
        assert!(step < 20);
    }

    #[test]
    fn backward_orbit_inverts() {
        let h = quadratic();
        let z = (c(1.5, 0.0), c(-2.25, 0.5));
        let back = h.iterate_orbit(h.forward(z), -1);
        let w = back.points[1];
        assert!((w.0 - z.0).norm() < 1e-12 && (w.1 - z.1).norm() < 1e-12);
    }

    #[test]
    fn radius_examples() {
        let r2 = estimate_filtration_radius(&quadratic());
        assert_eq!(r2.r, 8.0);
        let cubic = HenonMap::from_terms(3, &[], QComplex::from_int(9)).unwrap();
        let r3 = estimate_filtration_radius(&cubic);
        assert!((r3.r - 20f64.sqrt()).abs() < 1e-12);
        let z = (c(r3.r, 0.0), c(r3.r, 0.0));
        let w = cubic.forward(z);
        assert!(cubic.in_v_plus(w, r3.r) && w.1.norm() >= 2.0 * r3.r);
    }

    #[test]
    fn radius_grows_when_formula_is_not_certified() {
        // Large a_{d−2} for d = 4: the closed-form radius misses the doubling bound.
        let h = HenonMap::from_terms(4, &[(2, QComplex::from_int(1000))], QComplex::from_int(1)).unwrap();
        let fr = estimate_filtration_radius(&h);
        assert!(fr.r > fr.formula_r);
        let (x, y) = (c(fr.r, 0.0), c(0.0, fr.r));
        let w = h.forward((x, y));
        assert!(w.1.norm() >= 2.0 * fr.r);
    }

    #[test]
    fn normalize_identity_case() {
        let raw = RawHenonMap {
            p: vec![0, 0, 0, 1].into_iter().map(QComplex::from_int).collect(),
            a: QComplex::from_int(2),
        };
        let (h, conj) = normalize(&raw).unwrap();
        assert!(conj.is_identity() && conj.exact);
        assert_eq!(h.coeffs(), &[QComplex::default(), QComplex::default()]);
    }

    #[test]
    fn normalize_rejects_low_degree() {
        let raw = RawHenonMap {
            p: vec![QComplex::from_int(1), QComplex::from_int(2)],
            a: QComplex::from_int(3),
        };
        assert!(matches!(normalize(&raw), Err(Error::InvalidMap(_))));
    }
}
