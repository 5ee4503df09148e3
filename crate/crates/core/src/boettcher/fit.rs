//! Independent high-precision fit of A₀, …, A_{d−1}.
//!
//! At a point w far out in V_R⁺ the telescoping identity reduces to
//! F(w) = x′y′ − (a/d)·x·y − φ(w)^{d+1} ≈ Σ_j A_j φ(w)^j with (x′, y′) = H(w),
//! up to terms that decay like a negative power of |y|. Sampling w on two
//! circles and solving the least-squares problem gives the coefficients and
//! an error estimate from the difference between the radii.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};

use super::bigc::{abs_f64, bits_for_digits, to_c64, BigMap};
use super::{LiftPolynomial, Strategy};
use crate::error::{Error, Result};
use crate::exact::QComplex;
use crate::henon::{estimate_filtration_radius, HenonMap};

/// Digits reserved for the fitted coefficients themselves.
const RESERVED_DIGITS: f64 = 40.0;

pub(crate) fn fit_lift(map: &HenonMap, digits: u32) -> Result<LiftPolynomial> {
    let d = map.d();
    // |F| ~ ρ^{d(d+1)} for base radius ρ, so this exponent keeps the
    // cancellation within the digit budget.
    let log10_rho = (digits as f64 - RESERVED_DIGITS) / (d * (d + 1)) as f64;
    let r = estimate_filtration_radius(map).r;
    if log10_rho < 2.0 || 10f64.powf(log10_rho * 0.75) < 4.0 * r {
        return Err(Error::Precision {
            required_digits: (RESERVED_DIGITS + (d * (d + 1)) as f64 * (4.0 * r).log10().max(2.0) / 0.75).ceil() as u32,
        });
    }
    let prec = bits_for_digits(digits);
    let coarse = fit_at_radius(map, prec, log10_rho * 0.75)?;
    let fine = fit_at_radius(map, prec, log10_rho)?;
    let err = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(LiftPolynomial {
        d,
        coeffs: fine,
        exact: None,
        strategy: Strategy::BigfloatFit,
        error_estimate: err,
    })
}

fn fit_at_radius(map: &HenonMap, prec: u32, log10_rho: f64) -> Result<Vec<Complex64>> {
    let d = map.d();
    let bm = BigMap::new(map, prec);
    let ad = bm.ratio(map.a(), &QComplex::from_int(d as i64));
    // K coprime to d so the φ-values (≈ y^d) are all distinct.
    let k = 4 * d as usize + 1;
    let rho = Float::with_val(prec, 10).pow(Float::with_val(prec, log10_rho));
    let scale_w = Float::with_val(prec, (&rho).pow(d)); // |φ(w)| ≈ ρ^d
    let rows: Vec<(Vec<Complex>, Complex)> = (0..k)
        .into_par_iter()
        .map(|idx| {
            let theta = TAU * (idx as f64 + 0.5) / k as f64;
            let y0 = Complex::with_val(prec, (theta.cos(), theta.sin())) * &rho;
            let z = (Complex::new(prec), y0);
            let w = bm.forward(&z);
            let hw = bm.forward(&w);
            let phi = bm.phi(&w);
            let mut f = Complex::with_val(prec, &hw.0 * &hw.1);
            f -= Complex::with_val(prec, &w.0 * &w.1) * &ad;
            f -= Complex::with_val(prec, (&phi).pow(d + 1));
            // Columns (φ/|φ|)^j keep the normal equations well conditioned.
            let zeta = Complex::with_val(prec, &phi / &scale_w);
            let mut cols = Vec::with_capacity(d as usize);
            let mut pw = Complex::with_val(prec, (1, 0));
            for _ in 0..d {
                cols.push(pw.clone());
                pw *= &zeta;
            }
            (cols, f)
        })
        .collect();
    let n = d as usize;
    let mut m = vec![vec![Complex::new(prec); n + 1]; n];
    for (cols, f) in &rows {
        for i in 0..n {
            let ci = Complex::with_val(prec, cols[i].conj_ref());
            for j in 0..n {
                m[i][j] += Complex::with_val(prec, &ci * &cols[j]);
            }
            m[i][n] += Complex::with_val(prec, &ci * f);
        }
    }
    let b = solve(m).ok_or_else(|| Error::Inconsistent("singular least-squares system".into()))?;
    // Undo the column scaling: A_j = B_j / |φ|^j.
    let mut out = Vec::with_capacity(n);
    let mut s = Float::with_val(prec, 1);
    for bj in b {
        out.push(to_c64(&Complex::with_val(prec, &bj / &s)));
        s *= &scale_w;
    }
    Ok(out)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(mut m: Vec<Vec<Complex>>) -> Option<Vec<Complex>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| abs_f64(&m[i][col]).total_cmp(&abs_f64(&m[j][col])))?;
        if m[piv][col].is_zero() {
            return None;
        }
        m.swap(col, piv);
        let pivot = m[col][col].clone();
        for row in col + 1..n {
            let factor = Complex::with_val(pivot.prec().0, &m[row][col] / &pivot);
            let (top, bottom) = m.split_at_mut(row);
            for (dst, src) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *dst -= Complex::with_val(pivot.prec().0, &factor * src);
            }
        }
    }
    let mut x: Vec<Complex> = vec![Complex::new(m[0][0].prec().0); n];
    for row in (0..n).rev() {
        let mut acc = m[row][n].clone();
        for k in row + 1..n {
            acc -= Complex::with_val(acc.prec().0, &m[row][k] * &x[k]);
        }
        x[row] = acc / &m[row][row];
    }
    Some(x)
}
