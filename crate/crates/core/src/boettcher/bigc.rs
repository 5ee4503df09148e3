//! Arbitrary-precision evaluation of H, φ and Q on top of MPFR/MPC.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::exact::QComplex;
use crate::henon::{HenonMap, Point};

pub(crate) type BigPoint = (Complex, Complex);

/// Bits of working precision for a decimal digit budget.
pub(crate) fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

pub(crate) fn big_from_q(z: &QComplex, prec: u32) -> Complex {
    Complex::with_val(
        prec,
        (Float::with_val(prec, &z.re), Float::with_val(prec, &z.im)),
    )
}

pub(crate) fn big_from_c64(z: num_complex::Complex64, prec: u32) -> Complex {
    Complex::with_val(prec, (z.re, z.im))
}

pub(crate) fn to_c64(z: &Complex) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// Upper estimate of log₂|z| (−∞ for zero).
pub(crate) fn log2_abs(z: &Complex) -> f64 {
    let e = |f: &Float| f.get_exp().map_or(f64::NEG_INFINITY, f64::from);
    e(z.real()).max(e(z.imag())) + 0.5
}

pub(crate) struct BigMap {
    pub prec: u32,
    pub d: u32,
    a: Complex,
    coeffs: Vec<Complex>,
    log2_s: f64,
}

impl BigMap {
    pub fn new(map: &HenonMap, prec: u32) -> Self {
        let s: f64 = map.a_c64().norm() + map.coeffs_c64().iter().map(|c| c.norm()).sum::<f64>();
        BigMap {
            prec,
            d: map.d(),
            a: big_from_q(map.a(), prec),
            coeffs: map.coeffs().iter().map(|c| big_from_q(c, prec)).collect(),
            log2_s: s.max(1.0).log2(),
        }
    }

    pub fn point(&self, (x, y): Point) -> BigPoint {
        (big_from_c64(x, self.prec), big_from_c64(y, self.prec))
    }

    /// q(x, y) = p(y) − y^d − a·x.
    fn q(&self, x: &Complex, y: &Complex) -> Complex {
        let mut acc = Complex::new(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= y;
            acc += c;
        }
        acc -= Complex::with_val(self.prec, &self.a * x);
        acc
    }

    pub fn forward(&self, (x, y): &BigPoint) -> BigPoint {
        let yd = Complex::with_val(self.prec, y.pow(self.d));
        let next = yd + self.q(x, y);
        (y.clone(), next)
    }

    /// log φ(z) for z ∈ V_R⁺, principal branch in each factor, summed until
    /// the product tail is below the working precision.
    pub fn log_phi(&self, z: &BigPoint) -> Complex {
        let d = self.d;
        let log2_d = (d as f64).log2();
        let mut acc = Complex::with_val(self.prec, z.1.ln_ref());
        let mut cur = z.clone();
        let mut weight = Float::with_val(self.prec, 1) / d;
        for j in 0.. {
            // Tail from step j is at most 4·S/|y_j|·d^{−(j+1)}.
            let tail_log2 = 2.0 + self.log2_s - (log2_abs(&cur.1) - 1.0) - (j as f64 + 1.0) * log2_d;
            if tail_log2 < -(self.prec as f64) - 8.0 {
                break;
            }
            let yd = Complex::with_val(self.prec, (&cur.1).pow(d));
            let t = Complex::with_val(self.prec, self.q(&cur.0, &cur.1) / &yd);
            let lt = Complex::with_val(self.prec, t + 1u32).ln();
            acc += lt * &weight;
            weight /= d;
            cur = self.forward(&cur);
        }
        acc
    }

    pub fn phi(&self, z: &BigPoint) -> Complex {
        self.log_phi(z).exp()
    }

    /// Q(ζ) = ζ^{d+1} + Σ A_j ζ^j.
    pub fn q_eval(&self, coeffs: &[Complex], zeta: &Complex) -> Complex {
        let mut acc = Complex::with_val(self.prec, (1, 0));
        acc *= zeta; // ζ^{d+1} coefficient 1, ζ^d coefficient 0
        for c in coeffs.iter().rev() {
            acc *= zeta;
            acc += c;
        }
        acc
    }

    pub fn zero(&self) -> Complex {
        Complex::new(self.prec)
    }

    pub fn ratio(&self, num: &QComplex, den: &QComplex) -> Complex {
        let r = num.div(den).expect("nonzero denominator");
        big_from_q(&r, self.prec)
    }
}

/// |z| as a double, rounding toward +∞ in the magnitude.
pub(crate) fn abs_f64(z: &Complex) -> f64 {
    let mut f = Float::with_val(z.prec().0, z.abs_ref());
    f.set_prec_round(53, Round::Up);
    f.to_f64()
}
