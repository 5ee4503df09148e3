//! Sparse bivariate polynomials and polynomial self-maps of the plane.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::exact::Coeff;

/// A polynomial in x and y; keys are exponents `(i, j)` of `x^i y^j`.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2<C: Coeff> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coeff> Default for Poly2<C> {
    fn default() -> Self {
        Poly2 {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Coeff> Poly2<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: C, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(C::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(C::one(), 0, 1)
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(i, j)) {
            Some(old) => {
                let s = old.add_ref(&c);
                if s.is_zero() {
                    self.terms.remove(&(i, j));
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert((i, j), c);
            }
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly2 {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg_ref())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c.mul_ref(s));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1.mul_ref(c2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `x ↦ f`, `y ↦ g`.
    pub fn substitute(&self, f: &Self, g: &Self) -> Self {
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let powers = |base: &Self, n: u32| {
            let mut v = vec![Self::constant(C::one())];
            for k in 1..=n as usize {
                let next = v[k - 1].mul(base);
                v.push(next);
            }
            v
        };
        let fp = powers(f, max_i);
        let gp = powers(g, max_j);
        let mut out = Self::zero();
        for (&(i, j), c) in &self.terms {
            out = out.add(&fp[i as usize].mul(&gp[j as usize]).scale(c));
        }
        out
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.to_c64() * x.powu(i) * y.powu(j))
            .sum()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly2<D> {
        let mut out = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, f(c));
        }
        out
    }
}

/// A polynomial map (x, y) ↦ (f₁(x, y), f₂(x, y)).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap2<C: Coeff> {
    pub first: Poly2<C>,
    pub second: Poly2<C>,
}

impl<C: Coeff> PolyMap2<C> {
    pub fn new(first: Poly2<C>, second: Poly2<C>) -> Self {
        PolyMap2 { first, second }
    }

    pub fn identity() -> Self {
        PolyMap2::new(Poly2::x(), Poly2::y())
    }

    /// The composition `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        PolyMap2::new(
            self.first.substitute(&inner.first, &inner.second),
            self.second.substitute(&inner.first, &inner.second),
        )
    }

    pub fn degree(&self) -> u32 {
        self.first
            .total_degree()
            .into_iter()
            .chain(self.second.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (self.first.eval(x, y), self.second.eval(x, y))
    }
}

/// Exact coefficient-level composition `f ∘ g`.
pub fn compose_poly_maps<C: Coeff>(f: &PolyMap2<C>, g: &PolyMap2<C>) -> PolyMap2<C> {
    f.compose(g)
}
