//! Double-precision Böttcher coordinate on V_R⁺, evaluated in log space.
//!
//! Along the orbit (x_j, y_j) = H^j(z) we have y_{j+1} = y_j^d (1 + t_j) with
//! t_j = q(x_j, y_j)/y_j^d, q(x, y) = p(y) − y^d − a·x. Tracking L_j = log y_j
//! instead of y_j keeps the orbit representable long after y_j overflows.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::henon::{FiltrationRadius, HenonMap, Point};

/// Branch-safety threshold for |t_j|.
pub const BRANCH_LIMIT: f64 = 0.5;

/// Iteration cap for tolerance-driven runs; the tail shrinks doubly
/// exponentially, so this is never reached in practice.
const MAX_TERMS: usize = 96;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Stop {
    Terms(usize),
    Tail(f64),
}

/// The data of a log-space forward run from a point of V_R⁺.
#[derive(Clone, Debug)]
pub(crate) struct LogRun {
    pub log_y0: Complex64,
    /// Log(1 + t_j) for j < J.
    pub terms: Vec<Complex64>,
    /// log y_J (imaginary part reduced to (−π, π]).
    pub log_y_last: Complex64,
    /// log |x_J|.
    pub log_abs_x_last: f64,
    /// Bound on |Σ_{j≥J} d^{−(j+1)} Log(1 + t_j)|.
    pub tail: f64,
    /// Bound on accumulated floating-point error in log φ.
    pub rounding: f64,
}

impl LogRun {
    /// log φ with principal branches in every factor.
    pub fn log_phi(&self, d: u32) -> Complex64 {
        let d = d as f64;
        let mut w = 1.0 / d;
        let mut s = self.log_y0;
        for t in &self.terms {
            s += t * w;
            w /= d;
        }
        s
    }
}

fn log1p_c(t: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * t.re + t.norm_sqr()).ln_1p();
    let im = t.im.atan2(1.0 + t.re);
    Complex64::new(re, im)
}

fn reduce_arg(l: Complex64) -> Complex64 {
    let mut im = l.im.rem_euclid(2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    }
    Complex64::new(l.re, im)
}

/// τ(e^{ℓ}) without overflowing for huge ℓ.
fn tau_at_log(map: &HenonMap, ell: f64) -> f64 {
    if ell > 700.0 {
        // τ(r) ≤ (S) r^{−2} for r ≥ 1 and d ≥ 2, far below any tolerance.
        0.0
    } else {
        map.escape_tau(ell.exp())
    }
}

pub(crate) fn forward_log_run(map: &HenonMap, r: f64, z: Point, stop: Stop) -> Result<LogRun> {
    if !map.in_v_plus(z, r) {
        return Err(Error::Domain(format!(
            "point ({}, {}) is not in V_R+ for R = {r}; iterate forward first",
            z.0, z.1
        )));
    }
    let d = map.d();
    let df = d as f64;
    let a = map.a_c64();
    let coeffs = map.coeffs_c64();
    let tail_factor = 2.0 / (1.0 - 1.0 / (2.0 * df));

    let log_y0 = z.1.ln();
    let mut l = log_y0;
    let mut log_x = z.0.ln(); // −∞ real part when x = 0, which is harmless below
    let mut terms = Vec::new();
    let mut weight = 1.0 / df; // d^{−(j+1)}
    let tail = loop {
        let j = terms.len();
        let tail_j = tail_factor * tau_at_log(map, l.re) * weight;
        let done = match stop {
            Stop::Terms(n) => j >= n,
            Stop::Tail(tol) => tail_j <= tol || j >= MAX_TERMS,
        };
        if done {
            break tail_j;
        }
        let mut t = Complex64::new(0.0, 0.0);
        for (i, c) in coeffs.iter().enumerate() {
            if *c != Complex64::new(0.0, 0.0) {
                t += c * ((i as f64 - df) * l).exp();
            }
        }
        if log_x.re.is_finite() {
            t -= a * (log_x - df * l).exp();
        }
        if t.norm() >= BRANCH_LIMIT {
            return Err(Error::Domain(format!(
                "branch safety violated (|q/y^d| = {:.3} at step {j}); use a larger R",
                t.norm()
            )));
        }
        let lt = log1p_c(t);
        terms.push(lt);
        log_x = l;
        l = reduce_arg(df * l + lt);
        weight /= df;
    };
    let rounding = 8.0 * f64::EPSILON * (log_y0.norm() + 1.0);
    Ok(LogRun {
        log_y0,
        terms,
        log_y_last: l,
        log_abs_x_last: log_x.re,
        tail,
        rounding,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoettcherValue {
    pub value: Complex64,
    /// log φ(z) with principal branches; its real part is G⁺(z).
    pub log_value: Complex64,
    pub truncation: u32,
    pub error_bound: f64,
}

/// φ(z) = y·∏_{j<J}(1 + t_j)^{1/d^{j+1}} for z ∈ V_R⁺.
pub fn phi(map: &HenonMap, radius: &FiltrationRadius, z: Point, truncation: u32) -> Result<BoettcherValue> {
    if truncation == 0 {
        return Err(Error::Domain("truncation must be at least 1".into()));
    }
    let run = forward_log_run(map, radius.r, z, Stop::Terms(truncation as usize))?;
    let log_value = run.log_phi(map.d());
    let value = log_value.exp();
    let rel = run.tail + run.rounding;
    Ok(BoettcherValue {
        value,
        log_value,
        truncation,
        error_bound: value.norm() * rel.exp_m1(),
    })
}
