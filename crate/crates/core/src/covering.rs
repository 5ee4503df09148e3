//! Fiber-affine lifts (z, ζ) ↦ (βz + γ, αζ) over ℂ × (ℂ∖𝔻̄), their push
//! forward/backward under the lifted map, and deck transformations γ_{k/dⁿ}.
//!
//! α = exp(2πi·e/(d²−1)) is kept as the exponent e; β = α^{d+1}. Translations
//! γ live in ℚ(ζ_N), N = lcm(4, d²−1), so every identity here is exact.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::boettcher::LiftPolynomial;
use crate::error::{Error, Result};
use crate::exact::{Coeff, Cyclo, CycloField, QComplex};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// α = exp(2πi·e/(d²−1)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub e: u64,
    pub modulus: u64,
}

impl RootOfUnity {
    pub fn new(e: i64, d: u32) -> Self {
        let modulus = (d as u64) * (d as u64) - 1;
        RootOfUnity {
            e: e.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    /// Exponent of β = α^{d+1}; β^{d−1} = 1 always.
    pub fn beta_exponent(&self, d: u32) -> u64 {
        (self.e * (d as u64 + 1)) % self.modulus
    }

    pub fn pow(&self, k: u64) -> Self {
        RootOfUnity {
            e: ((self.e as u128 * k as u128) % self.modulus as u128) as u64,
            modulus: self.modulus,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        RootOfUnity {
            e: (self.e + other.e) % self.modulus,
            modulus: self.modulus,
        }
    }

    pub fn order(&self) -> u64 {
        self.modulus / gcd(self.e, self.modulus)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.e as f64 / self.modulus as f64)
    }
}

/// (z, ζ) ↦ (α^{d+1}z + γ, αζ).
#[derive(Clone, Debug, PartialEq)]
pub struct FiberAffineMap {
    pub alpha: RootOfUnity,
    pub gamma: Cyclo,
}

impl FiberAffineMap {
    pub fn gamma_c64(&self) -> Complex64 {
        self.gamma.to_c64()
    }
}

/// JSON form of a [`FiberAffineMap`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiberAffineMapView {
    pub e: u64,
    pub modulus: u64,
    pub beta_exponent: u64,
    pub gamma: Complex64,
    /// γ as an exact Gaussian rational, when it is one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma_exact: Option<QComplex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PushDirection {
    Plus,
    Minus,
}

/// Exact algebra of fiber-affine lifts for fixed (d, a).
#[derive(Clone, Debug)]
pub struct LiftAlgebra {
    d: u32,
    a: QComplex,
    field: Arc<CycloField>,
    /// N/(d²−1): converts α-exponents into ζ_N-exponents.
    step: u64,
}

impl LiftAlgebra {
    pub fn new(d: u32, a: QComplex) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidMap(format!("degree {d} is below 2")));
        }
        if a.is_zero() {
            return Err(Error::InvalidMap("a must be nonzero".into()));
        }
        let m = (d as u64) * (d as u64) - 1;
        let n = m * 4 / gcd(m, 4);
        Ok(LiftAlgebra {
            d,
            a,
            field: CycloField::new(n as u32),
            step: n / m,
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn modulus(&self) -> u64 {
        (self.d as u64) * (self.d as u64) - 1
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn root(&self, e: i64) -> RootOfUnity {
        RootOfUnity::new(e, self.d)
    }

    /// α as an exact field element.
    pub fn embed_root(&self, alpha: &RootOfUnity) -> Cyclo {
        self.field.zeta_pow((alpha.e * self.step) as i64)
    }

    pub fn embed(&self, z: &QComplex) -> Cyclo {
        self.field.embed(z)
    }

    pub fn map(&self, e: i64, gamma: &QComplex) -> FiberAffineMap {
        FiberAffineMap {
            alpha: self.root(e),
            gamma: self.embed(gamma),
        }
    }

    pub fn identity(&self) -> FiberAffineMap {
        FiberAffineMap {
            alpha: self.root(0),
            gamma: Cyclo::zero(),
        }
    }

    fn beta(&self, alpha: &RootOfUnity) -> Cyclo {
        self.embed_root(&alpha.pow(self.d as u64 + 1))
    }

    /// f ∘ g.
    pub fn compose(&self, f: &FiberAffineMap, g: &FiberAffineMap) -> FiberAffineMap {
        FiberAffineMap {
            alpha: f.alpha.mul(&g.alpha),
            gamma: self.beta(&f.alpha).mul_ref(&g.gamma).add_ref(&f.gamma),
        }
    }

    pub fn invert(&self, f: &FiberAffineMap) -> FiberAffineMap {
        let inv = RootOfUnity {
            e: (f.alpha.modulus - f.alpha.e) % f.alpha.modulus,
            modulus: f.alpha.modulus,
        };
        FiberAffineMap {
            alpha: inv,
            gamma: self.beta(&inv).mul_ref(&f.gamma).neg_ref(),
        }
    }

    fn exact_a0(q: &LiftPolynomial) -> Result<&QComplex> {
        q.a0_exact()
            .ok_or_else(|| Error::Domain("exact lift-polynomial coefficients are required".into()))
    }

    /// c_α = (α^{d+1} − 1)·A₀.
    pub fn c_alpha(&self, alpha: &RootOfUnity, q: &LiftPolynomial) -> Result<Cyclo> {
        let a0 = self.embed(Self::exact_a0(q)?);
        Ok(self.beta(alpha).sub_ref(&Cyclo::one()).mul_ref(&a0))
    }

    fn ratio(&self, dir: PushDirection) -> Cyclo {
        let d = QComplex::from_int(self.d as i64);
        let r = match dir {
            PushDirection::Plus => self.a.div(&d),
            PushDirection::Minus => d.div(&self.a),
        };
        self.embed(&r.expect("nonzero"))
    }

    /// Plus: (e, γ) ↦ (d·e, (a/d)γ − c_α); minus: (e, γ) ↦ (d·e, (d/a)γ + c_α).
    pub fn push(&self, f: &FiberAffineMap, dir: PushDirection, q: &LiftPolynomial) -> Result<FiberAffineMap> {
        let c = self.c_alpha(&f.alpha, q)?;
        let scaled = self.ratio(dir).mul_ref(&f.gamma);
        let gamma = match dir {
            PushDirection::Plus => scaled.sub_ref(&c),
            PushDirection::Minus => scaled.add_ref(&c),
        };
        Ok(FiberAffineMap {
            alpha: f.alpha.pow(self.d as u64),
            gamma,
        })
    }

    /// n-fold push in closed form, using c_{α^d} = c_α:
    /// γ_n = r^n γ ± c_α Σ_{j=1}^{n} r^{j−1} with r = d/a (minus) or a/d (plus).
    pub fn push_iterated(&self, f: &FiberAffineMap, dir: PushDirection, n: u32, q: &LiftPolynomial) -> Result<FiberAffineMap> {
        let c = self.c_alpha(&f.alpha, q)?;
        let r = self.ratio(dir);
        let mut rn = Cyclo::one();
        let mut geom = Cyclo::zero();
        for _ in 0..n {
            geom = geom.add_ref(&rn);
            rn = rn.mul_ref(&r);
        }
        let corr = c.mul_ref(&geom);
        let scaled = rn.mul_ref(&f.gamma);
        let gamma = match dir {
            PushDirection::Plus => scaled.sub_ref(&corr),
            PushDirection::Minus => scaled.add_ref(&corr),
        };
        let dn = (0..n).fold(1u64, |acc, _| (acc * self.d as u64) % self.modulus());
        Ok(FiberAffineMap {
            alpha: f.alpha.pow(dn),
            gamma,
        })
    }

    pub fn view(&self, f: &FiberAffineMap) -> FiberAffineMapView {
        FiberAffineMapView {
            e: f.alpha.e,
            modulus: f.alpha.modulus,
            beta_exponent: f.alpha.beta_exponent(self.d),
            gamma: f.gamma.to_c64(),
            gamma_exact: f.gamma.to_qcomplex(),
        }
    }

    /// Applies the lift to a point (z, ζ).
    pub fn apply(&self, f: &FiberAffineMap, (z, zeta): (Complex64, Complex64)) -> (Complex64, Complex64) {
        let alpha = f.alpha.to_c64();
        let beta = f.alpha.pow(self.d as u64 + 1).to_c64();
        (beta * z + f.gamma.to_c64(), alpha * zeta)
    }
}

/// [k/dⁿ] ∈ ℤ[1/d]/ℤ in lowest terms: 0 ≤ k < dⁿ and d ∤ k unless n = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeckRational {
    pub k: u64,
    pub n: u32,
    pub d: u32,
}

impl DeckRational {
    pub fn new(k: i128, n: u32, d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("degree {d} is below 2")));
        }
        let dn = (d as i128)
            .checked_pow(n)
            .filter(|v| *v <= u64::MAX as i128)
            .ok_or_else(|| Error::Domain(format!("denominator {d}^{n} is too large")))?;
        let mut k = k.rem_euclid(dn);
        let mut n = n;
        while n > 0 && k % d as i128 == 0 {
            k /= d as i128;
            n -= 1;
        }
        Ok(DeckRational { k: k as u64, n, d })
    }

    pub fn zero(d: u32) -> Self {
        DeckRational { k: 0, n: 0, d }
    }

    pub fn denominator(&self) -> u64 {
        (self.d as u64).pow(self.n)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "deck rationals over different d");
        let n = self.n.max(other.n);
        let d = self.d as i128;
        let k = self.k as i128 * d.pow(n - self.n) + other.k as i128 * d.pow(n - other.n);
        DeckRational::new(k, n, self.d).expect("bounded by inputs")
    }

    /// d·r, the class that r is sent to by the lifted map.
    pub fn times_d(&self) -> Self {
        DeckRational::new(self.k as i128 * self.d as i128, self.n, self.d).expect("bounded")
    }

    /// exp(2πi·m·k/dⁿ), reduced exactly before converting to an angle.
    fn rotation(&self, m: u64) -> Complex64 {
        let den = self.denominator() as u128;
        let num = (self.k as u128 * m as u128) % den;
        Complex64::from_polar(1.0, TAU * (num as f64 / den as f64))
    }
}

impl std::fmt::Display for DeckRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.k, self.denominator())
    }
}

/// deck_compose: the sum in ℤ[1/d]/ℤ.
pub fn deck_compose(r1: &DeckRational, r2: &DeckRational) -> DeckRational {
    r1.add(r2)
}

/// The deck transformation γ_r:
/// ζ′ = ωζ, z′ = z + (d/a)Σ_{l<n}(d/a)^l (Q(ζ^{d^l}) − Q((ωζ)^{d^l})), ω = e^{2πik/dⁿ}.
pub fn deck_eval(
    r: &DeckRational,
    (z, zeta): (Complex64, Complex64),
    q: &LiftPolynomial,
    a: Complex64,
) -> Result<(Complex64, Complex64)> {
    if zeta.norm() <= 1.0 {
        return Err(Error::Domain(format!("|ζ| = {} is not > 1", zeta.norm())));
    }
    let d = r.d as f64;
    let ratio = d / a;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = ratio;
    let mut zl = zeta; // ζ^{d^l}
    let mut dl = 1u64; // d^l mod dⁿ
    for _ in 0..r.n {
        let rotated = r.rotation(dl) * zl;
        acc += w * (q.eval(zl) - q.eval(rotated));
        w *= ratio;
        zl = zl.powu(r.d);
        dl = dl.wrapping_mul(r.d as u64) % r.denominator().max(1);
    }
    Ok((z + acc, r.rotation(1) * zeta))
}

/// H̃(z, ζ) = (κz + Q(ζ), ζ^d); κ = a/d is the adopted convention.
pub fn lifted_map(q: &LiftPolynomial, kappa: Complex64, (z, zeta): (Complex64, Complex64)) -> (Complex64, Complex64) {
    (kappa * z + q.eval(zeta), zeta.powu(q.d))
}

/// 𝓛′: exponents e with (d+1−j)·e ≡ 0 mod d²−1 for every A_j (1 ≤ j ≤ d−1)
/// with |A_j| ≥ `zero_threshold`.
pub fn compute_l_prime(q: &LiftPolynomial, zero_threshold: f64) -> Vec<RootOfUnity> {
    let d = q.d;
    let m = (d as u64) * (d as u64) - 1;
    let active: Vec<u64> = (1..d as usize)
        .filter(|&j| q.coeffs[j].norm() >= zero_threshold)
        .map(|j| d as u64 + 1 - j as u64)
        .collect();
    let out: Vec<RootOfUnity> = (0..m)
        .filter(|&e| active.iter().all(|&w| (w * e) % m == 0))
        .map(|e| RootOfUnity::new(e as i64, d))
        .collect();
    debug_assert!(is_subgroup(&out));
    out
}

/// Closure under exponent addition and presence of the identity.
pub fn is_subgroup(elems: &[RootOfUnity]) -> bool {
    let Some(first) = elems.first() else {
        return false;
    };
    let m = first.modulus;
    elems.iter().any(|r| r.e == 0)
        && elems
            .iter()
            .all(|x| elems.iter().all(|y| elems.contains(&RootOfUnity { e: (x.e + y.e) % m, modulus: m })))
}

/// Checks α^{d+1}Q(ζ) = Q(αζ) + c_α coefficient-wise in exact arithmetic.
pub fn satisfies_l_prime_relation(alg: &LiftAlgebra, alpha: &RootOfUnity, q: &LiftPolynomial) -> Result<bool> {
    let exact = q
        .exact
        .as_ref()
        .ok_or_else(|| Error::Domain("exact lift-polynomial coefficients are required".into()))?;
    let beta = alg.embed_root(&alpha.pow(alg.d() as u64 + 1));
    let c = alg.c_alpha(alpha, q)?;
    for (j, aj) in exact.iter().enumerate() {
        let aj = alg.embed(aj);
        let lhs = beta.mul_ref(&aj);
        let mut rhs = alg.embed_root(&alpha.pow(j as u64)).mul_ref(&aj);
        if j == 0 {
            rhs = rhs.add_ref(&c);
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The rational (d/a)^k as an exact Gaussian rational, for tests and reports.
pub fn ratio_power(d: u32, a: &QComplex, k: u32) -> QComplex {
    let r = QComplex::real(Rational::from(d)).div(a).expect("a ≠ 0");
    r.pow(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lift(d: u32, a0: i64) -> LiftPolynomial {
        let mut ex = vec![QComplex::default(); d as usize];
        ex[0] = QComplex::from_int(a0);
        LiftPolynomial::from_exact(d, ex)
    }

    #[test]
    fn compose_and_invert() {
        let alg = LiftAlgebra::new(2, QComplex::from_int(3)).unwrap();
        let f = alg.map(1, &QComplex::from_ratio(2, 5));
        assert_eq!(alg.compose(&f, &alg.identity()), f);
        assert_eq!(alg.compose(&f, &alg.invert(&f)), alg.identity());
        let g = alg.map(2, &QComplex::default());
        let fg = alg.compose(&f, &g);
        assert_eq!(fg.alpha.e, 0);
        assert_eq!(fg.alpha.beta_exponent(2), 0);
    }

    #[test]
    fn c_alpha_examples() {
        let alg2 = LiftAlgebra::new(2, QComplex::from_int(3)).unwrap();
        assert!(alg2.c_alpha(&alg2.root(0), &lift(2, 2)).unwrap().is_zero());
        assert!(alg2.c_alpha(&alg2.root(1), &lift(2, 2)).unwrap().is_zero());
        let alg3 = LiftAlgebra::new(3, QComplex::from_int(9)).unwrap();
        let c = alg3.c_alpha(&alg3.root(1), &lift(3, 2)).unwrap();
        assert_eq!(c.to_qcomplex(), Some(QComplex::from_int(-4)));
    }

    #[test]
    fn deck_rational_arithmetic() {
        let half = DeckRational::new(1, 1, 2).unwrap();
        assert_eq!(deck_compose(&half, &half), DeckRational::zero(2));
        let quarter = DeckRational::new(1, 2, 2).unwrap();
        assert_eq!(deck_compose(&quarter, &quarter), half);
        let a = DeckRational::new(2, 2, 3).unwrap();
        let b = DeckRational::new(8, 2, 3).unwrap();
        assert_eq!(deck_compose(&a, &b), DeckRational::new(1, 2, 3).unwrap());
        assert_eq!(DeckRational::new(6, 2, 3).unwrap(), DeckRational::new(2, 1, 3).unwrap());
        assert_eq!(DeckRational::new(-1, 1, 2).unwrap(), half);
    }

    #[test]
    fn deck_half_for_quadratic() {
        let q = lift(2, 5);
        let a = Complex64::new(3.0, 0.0);
        let p = (Complex64::new(0.3, -1.0), Complex64::new(1.2, 0.4));
        let (z1, zeta1) = deck_eval(&DeckRational::new(1, 1, 2).unwrap(), p, &q, a).unwrap();
        let expect = p.0 + 4.0 / 3.0 * p.1.powu(3);
        assert!((z1 - expect).norm() < 1e-12);
        assert!((zeta1 + p.1).norm() < 1e-15);
        assert!(deck_eval(&DeckRational::new(1, 1, 2).unwrap(), (p.0, Complex64::new(0.5, 0.0)), &q, a).is_err());
    }

    #[test]
    fn l_prime_examples() {
        assert_eq!(compute_l_prime(&lift(3, 0), 1e-9).len(), 8);
        let mut q = lift(2, 0);
        q.coeffs[1] = Complex64::new(0.5, 0.0);
        let lp = compute_l_prime(&q, 1e-9);
        assert_eq!(lp, vec![RootOfUnity::new(0, 2)]);
    }
}
