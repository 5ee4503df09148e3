//! Deterministic pseudo-random sample points.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::henon::{HenonMap, Point};
use crate::potential::{green_plus, GreenOptions};
use crate::henon::FiltrationRadius;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the disc |w| ≤ r.
pub fn in_disc(rng: &mut impl Rng, r: f64) -> Complex64 {
    let rho = r * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, TAU * rng.random::<f64>())
}

/// Uniform in the bidisc |x|, |y| ≤ r.
pub fn in_bidisc(rng: &mut impl Rng, r: f64) -> Point {
    (in_disc(rng, r), in_disc(rng, r))
}

/// Points of V_{λR}⁺ with λR ≤ |y| ≤ 4λR and |x| ≤ |y|.
pub fn in_v_plus(rng: &mut impl Rng, r: f64, lambda: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let ry = lambda * r * (1.0 + 3.0 * rng.random::<f64>());
            let y = Complex64::from_polar(ry, TAU * rng.random::<f64>());
            (in_disc(rng, ry), y)
        })
        .collect()
}

/// `count` points of the bidisc of radius `box_radius` whose forward orbit
/// escapes within the default budget.
pub fn escaping_points(
    map: &HenonMap,
    radius: &FiltrationRadius,
    count: usize,
    box_radius: f64,
    seed: u64,
) -> Vec<Point> {
    let mut g = rng(seed);
    let opts = GreenOptions::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = in_bidisc(&mut g, box_radius);
        if green_plus(map, radius, z, &opts).is_ok_and(|v| v.escapes()) {
            out.push(z);
        }
    }
    out
}
