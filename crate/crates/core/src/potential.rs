//! Green's functions G± and escape classification.
//!
//! log⁺ is taken with the sup norm of (x, y); any norm gives the same limit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boettcher::phi::{forward_log_run, Stop};
use crate::error::Result;
use crate::henon::{FiltrationRadius, HenonMap, Point};

pub const DEFAULT_BUDGET: u32 = 200;
pub const DEFAULT_TARGET_ERROR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreenOptions {
    pub budget: u32,
    pub target_error: f64,
}

impl Default for GreenOptions {
    fn default() -> Self {
        GreenOptions {
            budget: DEFAULT_BUDGET,
            target_error: DEFAULT_TARGET_ERROR,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Crude,
    BoettcherRefined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    Sup,
    Euclidean,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GreenValue {
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
    pub iterations: u32,
    /// Set when the orbit never entered the escape region; the value is then
    /// exactly 0 and only valid for this budget.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounded_within_budget: Option<u32>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub precision_warning: bool,
}

impl GreenValue {
    fn bounded(budget: u32, method: Method) -> Self {
        GreenValue {
            value: 0.0,
            error_bound: 0.0,
            method,
            iterations: budget,
            bounded_within_budget: Some(budget),
            precision_warning: false,
        }
    }

    pub fn escapes(&self) -> bool {
        self.bounded_within_budget.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EscapeStatus {
    EscapesForward,
    BoundedWithinBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitClassification {
    pub status: EscapeStatus,
    /// First n with H^n(z) ∈ V_R⁺.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exit_index: Option<u32>,
    pub green_plus: f64,
}

fn finite((x, y): Point) -> bool {
    x.re.is_finite() && x.im.is_finite() && y.re.is_finite() && y.im.is_finite()
}

fn sup_norm((x, y): Point) -> f64 {
    x.norm().max(y.norm())
}

/// First index n ≤ budget with H^n(z) ∈ V_R⁺, together with that iterate.
/// `Err(n)` reports an overflow at step n before entry, `Ok(None)` a bounded orbit.
fn forward_entry(map: &HenonMap, r: f64, z: Point, budget: u32) -> std::result::Result<Option<(u32, Point)>, (u32, Point)> {
    let mut cur = z;
    for n in 0..=budget {
        if map.in_v_plus(cur, r) {
            return Ok(Some((n, cur)));
        }
        if n == budget {
            break;
        }
        let next = map.forward(cur);
        if !finite(next) {
            return Err((n, cur));
        }
        cur = next;
    }
    Ok(None)
}

pub fn classify_point(map: &HenonMap, z: Point, budget: u32, radius: &FiltrationRadius) -> Result<OrbitClassification> {
    let g = green_plus(
        map,
        radius,
        z,
        &GreenOptions {
            budget,
            ..GreenOptions::default()
        },
    )?;
    let exit_index = match forward_entry(map, radius.r, z, budget) {
        Ok(Some((n, _))) => Some(n),
        Ok(None) => None,
        Err((n, _)) => Some(n + 1),
    };
    Ok(OrbitClassification {
        status: if exit_index.is_some() {
            EscapeStatus::EscapesForward
        } else {
            EscapeStatus::BoundedWithinBudget
        },
        exit_index,
        green_plus: g.value,
    })
}

/// G⁺(z) = d^{−n} log|φ(H^n z)| with H^n z the first iterate in V_R⁺.
pub fn green_plus(map: &HenonMap, radius: &FiltrationRadius, z: Point, opts: &GreenOptions) -> Result<GreenValue> {
    let d = map.d() as f64;
    match forward_entry(map, radius.r, z, opts.budget) {
        Ok(None) => Ok(GreenValue::bounded(opts.budget, Method::BoettcherRefined)),
        Ok(Some((n, w))) => {
            let run = forward_log_run(map, radius.r, w, Stop::Tail(opts.target_error * 0.1))?;
            let scale = d.powi(-(n as i32));
            let log_phi = run.log_phi(map.d());
            let error_bound = scale * (run.tail + run.rounding);
            Ok(GreenValue {
                value: scale * log_phi.re,
                error_bound,
                method: Method::BoettcherRefined,
                iterations: n + run.terms.len() as u32,
                bounded_within_budget: None,
                precision_warning: error_bound > opts.target_error,
            })
        }
        Err((n, last)) => {
            // The orbit left the double range before a clean entry into V_R⁺;
            // fall back to the crude estimate at the last finite iterate.
            let scale = d.powi(-(n as i32));
            Ok(GreenValue {
                value: scale * sup_norm(last).ln().max(0.0),
                error_bound: scale * (d.ln() + map.a_c64().norm().ln().abs() + 1.0),
                method: Method::Crude,
                iterations: n,
                bounded_within_budget: None,
                precision_warning: true,
            })
        }
    }
}

/// d^{−N} log⁺‖H^N z‖ with N = (entry index) + `steps_past_entry`, evaluated
/// in log space so that N is not limited by the double range.
pub fn green_plus_crude(
    map: &HenonMap,
    radius: &FiltrationRadius,
    z: Point,
    steps_past_entry: u32,
    budget: u32,
    norm: Norm,
) -> Result<GreenValue> {
    let d = map.d() as f64;
    let Ok(Some((n, w))) = forward_entry(map, radius.r, z, budget) else {
        return Ok(GreenValue::bounded(budget, Method::Crude));
    };
    let run = forward_log_run(map, radius.r, w, Stop::Terms(steps_past_entry as usize))?;
    let m = steps_past_entry as i32;
    let ly = run.log_y_last.re;
    let log_norm = match norm {
        Norm::Sup => ly,
        Norm::Euclidean => ly + 0.5 * (2.0 * (run.log_abs_x_last - ly)).exp().ln_1p(),
    };
    let scale = d.powi(-(n as i32 + m));
    let norm_slack = match norm {
        Norm::Sup => 0.0,
        Norm::Euclidean => 0.5 * std::f64::consts::LN_2,
    };
    // |G(w) − d^{−m} log|y_m|| is the tail of the Böttcher series from m.
    let error_bound = d.powi(-(n as i32)) * (run.tail + run.rounding * (m as f64 + 1.0)) + scale * norm_slack;
    Ok(GreenValue {
        value: scale * log_norm.max(0.0),
        error_bound,
        method: Method::Crude,
        iterations: n + steps_past_entry,
        bounded_within_budget: None,
        precision_warning: false,
    })
}

/// G⁻(z) by the crude backward estimator d^{−N} log⁺‖H^{−N} z‖, run in
/// log space once the backward orbit is in V_R⁻.
pub fn green_minus(map: &HenonMap, radius: &FiltrationRadius, z: Point, opts: &GreenOptions) -> Result<GreenValue> {
    let r = radius.r;
    let d = map.d() as f64;
    let mut cur = z;
    let mut entry = None;
    for n in 0..=opts.budget {
        if map.in_v_minus(cur, r) {
            entry = Some(n);
            break;
        }
        if n == opts.budget {
            break;
        }
        let next = map.inverse(cur);
        if !finite(next) {
            break;
        }
        cur = next;
    }
    let Some(n) = entry else {
        return Ok(GreenValue::bounded(opts.budget, Method::Crude));
    };

    // x_{m+1} = x_m^d (1 + s_m)/a with s_m = (Σ a_j x_m^j − y_m)/x_m^d.
    let coeffs = map.coeffs_c64();
    let log_a = map.a_c64().ln();
    let tail_factor = 2.0 / (1.0 - 1.0 / (2.0 * d));
    let mut lx = cur.0.ln();
    let mut ly = cur.1.ln();
    let ell0 = lx.re;
    let mut m: i32 = 0;
    let (tail, bias) = loop {
        let weight = d.powi(-m);
        let tau = if lx.re > 700.0 { 0.0 } else { map.backward_tau(lx.re.exp()) };
        let tail = tail_factor * tau * weight / d;
        let bias = weight * log_a.re.abs() / (d - 1.0);
        if tail + bias <= 0.1 * opts.target_error || m >= 400 {
            break (tail, bias);
        }
        let mut s = Complex64::new(0.0, 0.0);
        for (j, c) in coeffs.iter().enumerate() {
            s += c * ((j as f64 - d) * lx).exp();
        }
        if ly.re.is_finite() {
            s -= (ly - d * lx).exp();
        }
        let ls = Complex64::new(0.5 * (2.0 * s.re + s.norm_sqr()).ln_1p(), s.im.atan2(1.0 + s.re));
        ly = lx;
        lx = d * lx - log_a + ls;
        lx.im = lx.im.rem_euclid(std::f64::consts::TAU);
        m += 1;
    };
    let total = d.powi(-(n as i32));
    let value = total * d.powi(-m) * lx.re;
    let rounding = 8.0 * f64::EPSILON * (ell0.abs() + log_a.re.abs() + 1.0) * (m as f64 + 1.0);
    let error_bound = total * (tail + bias + rounding);
    Ok(GreenValue {
        value: value.max(0.0),
        error_bound,
        method: Method::Crude,
        iterations: n + m as u32,
        bounded_within_budget: None,
        precision_warning: error_bound > opts.target_error,
    })
}
