use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::Rational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{parse_complex, Coeff};

/// An element `re + im·i` of the Gaussian rationals ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QComplex {
    pub re: Rational,
    pub im: Rational,
}

impl QComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        QComplex { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        QComplex::new(Rational::from(n), Rational::new())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        QComplex::new(Rational::from((num, den)), Rational::new())
    }

    pub fn real(r: Rational) -> Self {
        QComplex::new(r, Rational::new())
    }

    pub fn i() -> Self {
        QComplex::new(Rational::new(), Rational::from(1))
    }

    /// Exact value of a finite `Complex64` (every finite double is a dyadic rational).
    pub fn from_c64(z: Complex64) -> Option<Self> {
        Some(QComplex::new(
            Rational::from_f64(z.re)?,
            Rational::from_f64(z.im)?,
        ))
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    pub fn conj(&self) -> Self {
        QComplex::new(self.re.clone(), Rational::from(-&self.im))
    }

    pub fn norm_sqr(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == 0 {
            return None;
        }
        Some(QComplex::new(
            Rational::from(&self.re / &n),
            Rational::from(-&self.im) / n,
        ))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QComplex::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QComplex::new(Rational::from(&self.re * r), Rational::from(&self.im * r))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re == 0, self.im == 0) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im < 0 {
                    write!(f, "{}{}i", self.re, self.im)
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for QComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_complex(&s).map_err(serde::de::Error::custom)
    }
}

impl<'a> Add<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn add(self, o: &QComplex) -> QComplex {
        QComplex::new(
            Rational::from(&self.re + &o.re),
            Rational::from(&self.im + &o.im),
        )
    }
}

impl<'a> Sub<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn sub(self, o: &QComplex) -> QComplex {
        QComplex::new(
            Rational::from(&self.re - &o.re),
            Rational::from(&self.im - &o.im),
        )
    }
}

impl<'a> Mul<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn mul(self, o: &QComplex) -> QComplex {
        let re = Rational::from(&self.re * &o.re) - Rational::from(&self.im * &o.im);
        let im = Rational::from(&self.re * &o.im) + Rational::from(&self.im * &o.re);
        QComplex::new(re, im)
    }
}

impl Neg for &QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex::new(Rational::from(-&self.re), Rational::from(-&self.im))
    }
}

impl Coeff for QComplex {
    fn zero() -> Self {
        QComplex::default()
    }
    fn one() -> Self {
        QComplex::from_int(1)
    }
    fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn to_c64(&self) -> Complex64 {
        QComplex::to_c64(self)
    }
}
