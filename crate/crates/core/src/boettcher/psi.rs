//! The companion function ψ, defined by telescoping
//! ψ_N(z) = (d/a)^N x_N y_N − Σ_{j<N} (d/a)^{j+1} Q(φ(H^j z)).
//!
//! The two sums cancel catastrophically, so every evaluation sizes its
//! precision from the orbit magnitudes first and refuses to run short.

use num_complex::Complex64;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::Complex;
use serde::Serialize;

use super::bigc::{bits_for_digits, to_c64, abs_f64, BigMap, BigPoint};
use super::phi::{forward_log_run, Stop};
use super::LiftPolynomial;
use crate::error::{Error, Result};
use crate::exact::QComplex;
use crate::henon::{FiltrationRadius, HenonMap, Point};

/// Digits kept beyond the largest intermediate magnitude.
const GUARD_DIGITS: f64 = 30.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PsiValue {
    pub value: Complex64,
    pub depth: u32,
    pub precision_digits: u32,
    /// |ψ_N − ψ_{N−1}|, with ψ₀ = x·y.
    pub convergence_gap: f64,
}

/// Decimal digits needed to evaluate ψ_N at z (z ∈ V_R⁺).
pub fn required_digits(map: &HenonMap, radius: &FiltrationRadius, z: Point, depth: u32) -> Result<u32> {
    let ln10 = std::f64::consts::LN_10;
    let da = (map.d() as f64 / map.a_c64().norm()).log10();
    let mut worst = 0.0f64;
    for j in 0..=depth {
        let run = forward_log_run(map, radius.r, z, Stop::Terms(j as usize))?;
        let mag = j as f64 * da + (run.log_abs_x_last.max(0.0) + run.log_y_last.re) / ln10;
        worst = worst.max(mag);
    }
    Ok((worst + GUARD_DIGITS).ceil() as u32)
}

/// (ψ_N(z), ψ_{N−1}(z)) in working precision.
fn psi_pair(bm: &BigMap, da: &Complex, qc: &[Complex], z: &BigPoint, depth: u32) -> (Complex, Complex) {
    let prec = bm.prec;
    let mut cur = z.clone();
    let mut sum = bm.zero(); // Σ_{j<N} (d/a)^{j+1} Q(φ(H^j z))
    let mut scale = Complex::with_val(prec, (1, 0)); // (d/a)^j
    let mut prev = Complex::with_val(prec, &z.0 * &z.1);
    for _ in 0..depth {
        let qv = bm.q_eval(qc, &bm.phi(&cur));
        scale *= da;
        let term = Complex::with_val(prec, &scale * &qv);
        let seed = Complex::with_val(prec, &cur.0 * &cur.1);
        // Seed of depth j is (d/a)^j x_j y_j with the previous scale.
        prev = Complex::with_val(prec, &scale / da) * seed - &sum;
        sum += term;
        cur = bm.forward(&cur);
    }
    let seed = Complex::with_val(prec, &cur.0 * &cur.1);
    let value = Complex::with_val(prec, &scale * seed) - &sum;
    (value, prev)
}

fn check_precision(map: &HenonMap, radius: &FiltrationRadius, z: Point, depth: u32, digits: u32) -> Result<()> {
    let required = required_digits(map, radius, z, depth)?;
    if required > digits {
        return Err(Error::Precision {
            required_digits: required,
        });
    }
    Ok(())
}

fn ratio_d_over_a(map: &HenonMap, bm: &BigMap) -> Complex {
    bm.ratio(&QComplex::from_int(map.d() as i64), map.a())
}

pub fn psi(
    map: &HenonMap,
    radius: &FiltrationRadius,
    z: Point,
    q: &LiftPolynomial,
    depth: u32,
    digits: u32,
) -> Result<PsiValue> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    if !map.in_v_plus(z, radius.r) {
        return Err(Error::Domain(format!("point is not in V_R+ for R = {}", radius.r)));
    }
    check_precision(map, radius, z, depth, digits)?;
    let bm = BigMap::new(map, bits_for_digits(digits));
    let qc = q.big_coeffs(bm.prec);
    let da = ratio_d_over_a(map, &bm);
    let (value, prev) = psi_pair(&bm, &da, &qc, &bm.point(z), depth);
    let gap = abs_f64(&Complex::with_val(bm.prec, &value - &prev));
    Ok(PsiValue {
        value: to_c64(&value),
        depth,
        precision_digits: digits,
        convergence_gap: gap,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SemiconjugacyResidual {
    /// max ‖(first, second)‖ over the samples.
    pub max: f64,
    /// max |(a/d)ψ(z) + Q(φ(z)) − ψ(Hz)|.
    pub first: f64,
    /// max |φ(z)^d − φ(Hz)|.
    pub second: f64,
}

/// Residual of H̃∘(ψ, φ) = (ψ, φ)∘H over the samples, with ψ evaluated at
/// the same depth on both sides.
pub fn semiconjugacy_residual(
    map: &HenonMap,
    radius: &FiltrationRadius,
    q: &LiftPolynomial,
    samples: &[Point],
    depth: u32,
    digits: u32,
) -> Result<SemiconjugacyResidual> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let per_point: Vec<Result<(f64, f64)>> = samples
        .par_iter()
        .map(|&z| {
            if !map.in_v_plus(z, radius.r) {
                return Err(Error::Domain(format!("sample ({}, {}) is not in V_R+", z.0, z.1)));
            }
            check_precision(map, radius, map.forward(z), depth, digits)?;
            let bm = BigMap::new(map, bits_for_digits(digits));
            let prec = bm.prec;
            let qc = q.big_coeffs(prec);
            let da = ratio_d_over_a(map, &bm);
            let ad = bm.ratio(map.a(), &QComplex::from_int(map.d() as i64));
            let zb = bm.point(z);
            let hz = bm.forward(&zb);
            let (psi_z, _) = psi_pair(&bm, &da, &qc, &zb, depth);
            let (psi_hz, _) = psi_pair(&bm, &da, &qc, &hz, depth);
            let phi_z = bm.phi(&zb);
            let phi_hz = bm.phi(&hz);
            let lhs1 = Complex::with_val(prec, &ad * &psi_z) + bm.q_eval(&qc, &phi_z);
            let r1 = abs_f64(&Complex::with_val(prec, lhs1 - &psi_hz));
            let lhs2 = Complex::with_val(prec, (&phi_z).pow(map.d()));
            let r2 = abs_f64(&Complex::with_val(prec, lhs2 - &phi_hz));
            Ok((r1, r2))
        })
        .collect();
    let mut out = SemiconjugacyResidual::default();
    for r in per_point {
        let (r1, r2) = r?;
        out.first = out.first.max(r1);
        out.second = out.second.max(r2);
        out.max = out.max.max(r1.hypot(r2));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boettcher::{derive_lift_polynomial, DeriveOptions, Strategy};
    use crate::henon::estimate_filtration_radius;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn seed_normalization() {
        let h = HenonMap::from_terms(2, &[], QComplex::from_int(3)).unwrap();
        let fr = estimate_filtration_radius(&h);
        let q = derive_lift_polynomial(&h, Strategy::FormalSeries, &DeriveOptions::for_degree(2)).unwrap();
        let mut prev = f64::INFINITY;
        for t in [1e2, 1e4, 1e6] {
            let z = (c(t, 0.0), c(2.0 * t, 0.0));
            let p = psi(&h, &fr, z, &q, 2, 120).unwrap();
            let dev = (p.value / (z.0 * z.1) - 1.0).norm();
            assert!(dev < prev);
            prev = dev;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn precision_is_checked() {
        let h = HenonMap::from_terms(3, &[], QComplex::from_int(9)).unwrap();
        let fr = estimate_filtration_radius(&h);
        let q = LiftPolynomial::from_exact(3, vec![QComplex::default(); 3]);
        let z = (c(0.0, 0.0), c(10.0, 0.0));
        match psi(&h, &fr, z, &q, 5, 200) {
            Err(Error::Precision { required_digits }) => assert!(required_digits > 300),
            other => panic!("unexpected {other:?}"),
        }
        assert!(psi(&h, &fr, z, &q, 4, 200).is_ok());
    }

    #[test]
    fn empty_sample_set() {
        let h = HenonMap::from_terms(2, &[], QComplex::from_int(3)).unwrap();
        let fr = estimate_filtration_radius(&h);
        let q = LiftPolynomial::from_exact(2, vec![QComplex::default(); 2]);
        assert_eq!(semiconjugacy_residual(&h, &fr, &q, &[], 2, 50).unwrap().max, 0.0);
    }
}
