//! Exact scalar fields used by the symbolic layers: Gaussian rationals
//! ℚ(i) and cyclotomic fields ℚ(ζ_N).

mod cyclotomic;
mod gaussian;
mod parse;

pub use cyclotomic::{Cyclo, CycloField};
pub use gaussian::QComplex;
pub use parse::{parse_complex, parse_rational, ParseError};

use num_complex::Complex64;

/// Coefficient ring for the sparse polynomial layers.
///
/// Implemented for exact fields and for `Complex64`. `zero`/`one` must be
/// context free, which is why [`Cyclo`] carries an optional field handle.
pub trait Coeff: Clone + std::fmt::Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn to_c64(&self) -> Complex64;

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
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
        *self
    }
}
