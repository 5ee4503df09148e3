//! Linear symmetries L_η(x, y) = (ηx, η^d y), η^{d²−1} = 1, with
//! H∘L_η = L_{η^d}∘H, and the classification of fiber-preserving lifts.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boettcher::LiftPolynomial;
use crate::covering::{compute_l_prime, LiftAlgebra, RootOfUnity};
use crate::error::{Error, Result};
use crate::exact::{Coeff, Cyclo};
use crate::henon::{FiltrationRadius, HenonMap, Point};
use crate::polymap::{Poly2, PolyMap2};
use crate::potential::{green_plus, GreenOptions};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    /// Sorted exponents e, η = exp(2πi·e/(d²−1)).
    pub exponents: Vec<u64>,
    pub modulus: u64,
    pub k: usize,
}

impl SymmetryGroup {
    pub fn from_exponents(d: u32, mut exponents: Vec<u64>) -> Self {
        let modulus = (d as u64) * (d as u64) - 1;
        exponents.iter_mut().for_each(|e| *e %= modulus);
        exponents.sort_unstable();
        exponents.dedup();
        SymmetryGroup {
            k: exponents.len(),
            exponents,
            modulus,
        }
    }

    pub fn is_subgroup(&self) -> bool {
        self.exponents.contains(&0)
            && self.exponents.iter().all(|x| {
                self.exponents
                    .iter()
                    .all(|y| self.exponents.binary_search(&((x + y) % self.modulus)).is_ok())
            })
    }
}

/// Exponents allowed by the congruences (dj − 1)·e ≡ 0 mod d²−1 for every
/// nonzero a_j; equivalently d(d−j)·e ≡ 0.
pub fn congruence_exponents(map: &HenonMap) -> Vec<u64> {
    let d = map.d() as u64;
    let m = d * d - 1;
    let active: Vec<u64> = map
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, _)| d * (d - j as u64))
        .collect();
    (0..m).filter(|e| active.iter().all(|w| (w * e) % m == 0)).collect()
}

/// Exact check of H∘L_η = L_{η^d}∘H over ℚ(ζ_N).
pub fn is_symbolic_symmetry(map: &HenonMap, alg: &LiftAlgebra, e: u64) -> bool {
    let d = map.d() as u64;
    let eta = alg.embed_root(&RootOfUnity::new(e as i64, map.d()));
    let eta_d = alg.embed_root(&RootOfUnity::new((e * d) as i64, map.d()));
    let eta_d2 = alg.embed_root(&RootOfUnity::new((e * d * d) as i64, map.d()));
    let h: PolyMap2<Cyclo> = {
        let hq = map.to_polymap();
        PolyMap2::new(
            hq.first.map_coeffs(|c| alg.embed(c)),
            hq.second.map_coeffs(|c| alg.embed(c)),
        )
    };
    let linear = |s1: &Cyclo, s2: &Cyclo| PolyMap2::new(Poly2::x().scale(s1), Poly2::y().scale(s2));
    let lhs = h.compose(&linear(&eta, &eta_d));
    let rhs = linear(&eta_d, &eta_d2).compose(&h);
    lhs == rhs
}

/// The group 𝓛 of linear symmetries, each verified symbolically.
pub fn detect_linear_symmetries(map: &HenonMap) -> Result<SymmetryGroup> {
    let alg = LiftAlgebra::new(map.d(), map.a().clone())?;
    let exps = congruence_exponents(map);
    if let Some(bad) = exps.iter().find(|&&e| !is_symbolic_symmetry(map, &alg, e)) {
        return Err(Error::Inconsistent(format!(
            "exponent {bad} passes the congruence test but not exact composition"
        )));
    }
    Ok(SymmetryGroup::from_exponents(map.d(), exps))
}

/// L_η(x, y) = (ηx, η^d y).
pub fn apply_symmetry(d: u32, e: u64, (x, y): Point) -> Point {
    let eta = RootOfUnity::new(e as i64, d);
    (eta.to_c64() * x, eta.pow(d as u64).to_c64() * y)
}

/// max |G⁺(L_η z) − G⁺(z)| over the samples and group elements.
pub fn green_invariance_check(
    map: &HenonMap,
    radius: &FiltrationRadius,
    group: &SymmetryGroup,
    samples: &[Point],
) -> Result<f64> {
    let opts = GreenOptions::default();
    let devs: Vec<Result<f64>> = samples
        .par_iter()
        .map(|&z| {
            let g0 = green_plus(map, radius, z, &opts)?.value;
            let mut worst = 0.0f64;
            for &e in &group.exponents {
                let g1 = green_plus(map, radius, apply_symmetry(map.d(), e, z), &opts)?.value;
                worst = worst.max((g1 - g0).abs());
            }
            Ok(worst)
        })
        .collect();
    devs.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aut1Case {
    I,
    Ii,
    Iii,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Aut1Classification {
    pub k: usize,
    pub k_prime: usize,
    pub case: Aut1Case,
    /// Reported, not required: k | k′ is observed but not asserted.
    pub k_divides_k_prime: bool,
}

pub fn classify_aut1(map: &HenonMap, q: &LiftPolynomial, zero_threshold: f64) -> Result<Aut1Classification> {
    let group = detect_linear_symmetries(map)?;
    let lp = compute_l_prime(q, zero_threshold);
    let m = group.modulus as usize;
    let (k, k_prime) = (group.k, lp.len());
    let case = if !map.coeffs()[0].is_zero() {
        Aut1Case::I
    } else if map.coeffs().iter().all(Coeff::is_zero) {
        Aut1Case::Ii
    } else {
        Aut1Case::Iii
    };
    if k > k_prime || !m.is_multiple_of(k) || !m.is_multiple_of(k_prime) {
        return Err(Error::Inconsistent(format!(
            "symmetry orders k = {k}, k′ = {k_prime} violate k ≤ k′ | d²−1 = {m}"
        )));
    }
    Ok(Aut1Classification {
        k,
        k_prime,
        case,
        k_divides_k_prime: k_prime % k == 0,
    })
}

/// max |G⁺(L_η H^s z) − d^s G⁺(z)| over the samples.
pub fn verify_rigidity_family(
    map: &HenonMap,
    radius: &FiltrationRadius,
    e: u64,
    s: i32,
    samples: &[Point],
) -> Result<f64> {
    let opts = GreenOptions::default();
    let d = map.d() as f64;
    let devs: Vec<Result<f64>> = samples
        .par_iter()
        .map(|&z| {
            let mut w = z;
            for _ in 0..s.unsigned_abs() {
                w = if s > 0 { map.forward(w) } else { map.inverse(w) };
            }
            let fw = apply_symmetry(map.d(), e, w);
            if !(fw.0.norm().is_finite() && fw.1.norm().is_finite()) {
                return Err(Error::Domain("H^s(z) left the double range; use a smaller |s|".into()));
            }
            let g = green_plus(map, radius, z, &opts)?.value;
            let gf = green_plus(map, radius, fw, &opts)?.value;
            Ok((gf - d.powi(s) * g).abs())
        })
        .collect();
    devs.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

/// η as a double-precision complex number.
pub fn eta(d: u32, e: u64) -> Complex64 {
    RootOfUnity::new(e as i64, d).to_c64()
}
