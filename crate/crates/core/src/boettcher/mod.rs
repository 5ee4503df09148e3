//! Böttcher coordinate φ, the lift polynomial Q and the companion function ψ.

mod bigc;
mod fit;
pub mod phi;
mod psi;
pub mod series;

use num_complex::Complex64;
use rug::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::QComplex;
use crate::henon::HenonMap;

pub use phi::{phi, BoettcherValue};
pub use psi::{psi, required_digits, semiconjugacy_residual, PsiValue, SemiconjugacyResidual};

/// Default φ-series truncation for the formal strategy: keep monomials of
/// valuation ≥ −(d + 3).
pub fn default_truncation(d: u32) -> u32 {
    d + 3
}

pub const DEFAULT_FIT_DIGITS: u32 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    FormalSeries,
    BigfloatFit,
}

/// Q(ζ) = ζ^{d+1} + A_{d−1}ζ^{d−1} + … + A₀ (no ζ^d term).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LiftPolynomial {
    pub d: u32,
    /// A₀, …, A_{d−1}.
    pub coeffs: Vec<Complex64>,
    /// Exact A_j when the formal strategy produced them.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<Vec<QComplex>>,
    pub strategy: Strategy,
    /// Estimated absolute error per coefficient (0 for exact output).
    pub error_estimate: f64,
}

impl LiftPolynomial {
    pub fn from_exact(d: u32, exact: Vec<QComplex>) -> Self {
        assert_eq!(exact.len(), d as usize);
        LiftPolynomial {
            d,
            coeffs: exact.iter().map(QComplex::to_c64).collect(),
            exact: Some(exact),
            strategy: Strategy::FormalSeries,
            error_estimate: 0.0,
        }
    }

    /// Full coefficient list of Q, constant term first (length d + 2).
    pub fn full_coeffs(&self) -> Vec<Complex64> {
        let mut v = self.coeffs.clone();
        v.push(Complex64::new(0.0, 0.0));
        v.push(Complex64::new(1.0, 0.0));
        v
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        self.full_coeffs()
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * zeta + c)
    }

    pub(crate) fn big_coeffs(&self, prec: u32) -> Vec<Complex> {
        match &self.exact {
            Some(ex) => ex.iter().map(|c| bigc::big_from_q(c, prec)).collect(),
            None => self.coeffs.iter().map(|c| bigc::big_from_c64(*c, prec)).collect(),
        }
    }

    pub fn a0_exact(&self) -> Option<&QComplex> {
        self.exact.as_ref().map(|e| &e[0])
    }

    /// A copy with A₀ shifted by `delta` (used to probe sensitivity).
    pub fn with_a0_shift(&self, delta: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += delta;
        if let (Some(ex), Some(dq)) = (&mut out.exact, QComplex::from_c64(delta)) {
            ex[0] = &ex[0] + &dq;
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DeriveOptions {
    /// φ-series truncation for the formal strategy.
    pub truncation: u32,
    /// Decimal digits for the bigfloat fit.
    pub digits: u32,
}

impl DeriveOptions {
    pub fn for_degree(d: u32) -> Self {
        DeriveOptions {
            truncation: default_truncation(d),
            digits: DEFAULT_FIT_DIGITS,
        }
    }
}

pub fn derive_lift_polynomial(map: &HenonMap, strategy: Strategy, opts: &DeriveOptions) -> Result<LiftPolynomial> {
    match strategy {
        Strategy::FormalSeries => {
            let sol = series::solve_formal(map, opts.truncation)?;
            Ok(LiftPolynomial::from_exact(map.d(), sol.coeffs))
        }
        Strategy::BigfloatFit => fit::fit_lift(map, opts.digits),
    }
}

/// Runs both strategies and returns the formal result, or an inconsistency
/// error when they differ by more than `tolerance` (plus the fit's own error
/// estimate) in any coefficient.
pub fn derive_lift_polynomial_checked(map: &HenonMap, opts: &DeriveOptions, tolerance: f64) -> Result<LiftPolynomial> {
    let formal = derive_lift_polynomial(map, Strategy::FormalSeries, opts)?;
    let fitted = derive_lift_polynomial(map, Strategy::BigfloatFit, opts)?;
    let worst = formal
        .coeffs
        .iter()
        .zip(&fitted.coeffs)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if worst > tolerance + fitted.error_estimate {
        return Err(Error::Inconsistent(format!(
            "formal and fitted lift polynomials differ by {worst:.3e}"
        )));
    }
    Ok(formal)
}
