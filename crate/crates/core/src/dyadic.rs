//! Exact arithmetic in ℤ[1/d] and its unit group.
//!
//! Elements are m/dᵏ with k = 0 or d ∤ m. This normal form is unique: if
//! m/dᵏ = m′/d^{k′} with k < k′ then m′ = m·d^{k′−k} is divisible by d.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    d: u64,
    m: i128,
    k: u32,
}

fn overflow() -> Error {
    Error::Domain("ℤ[1/d] arithmetic overflow".into())
}

impl RingElem {
    pub fn new(m: i128, k: u32, d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("d = {d} must be at least 2")));
        }
        let (mut m, mut k) = (m, k);
        while k > 0 && m % d as i128 == 0 {
            m /= d as i128;
            k -= 1;
        }
        if m == 0 {
            k = 0;
        }
        Ok(RingElem { d, m, k })
    }

    pub fn zero(d: u64) -> Self {
        RingElem { d, m: 0, k: 0 }
    }

    pub fn one(d: u64) -> Self {
        RingElem { d, m: 1, k: 0 }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn numerator(&self) -> i128 {
        self.m
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0
    }

    fn pow_d(&self, e: u32) -> Result<i128> {
        (self.d as i128).checked_pow(e).ok_or_else(overflow)
    }

    fn same_d(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::Domain(format!("mixing ℤ[1/{}] and ℤ[1/{}]", self.d, other.d)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_d(other)?;
        let k = self.k.max(other.k);
        let a = self.m.checked_mul(self.pow_d(k - self.k)?).ok_or_else(overflow)?;
        let b = other.m.checked_mul(self.pow_d(k - other.k)?).ok_or_else(overflow)?;
        RingElem::new(a.checked_add(b).ok_or_else(overflow)?, k, self.d)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_d(other)?;
        let m = self.m.checked_mul(other.m).ok_or_else(overflow)?;
        RingElem::new(m, self.k + other.k, self.d)
    }

    pub fn neg(&self) -> Self {
        RingElem {
            d: self.d,
            m: -self.m,
            k: self.k,
        }
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            write!(f, "{}", self.m)
        } else {
            write!(f, "{}/{}^{}", self.m, self.d, self.k)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingOp {
    Add,
    Mul,
    Neg,
}

/// `neg` ignores `y`.
pub fn ring_arith(op: RingOp, x: &RingElem, y: &RingElem) -> Result<RingElem> {
    match op {
        RingOp::Add => x.add(y),
        RingOp::Mul => x.mul(y),
        RingOp::Neg => Ok(x.neg()),
    }
}

/// Prime factorization by trial division: (p, multiplicity) in increasing p.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// ±∏ p_i^{n_i} over the primes p_i of d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitDecomposition {
    pub sign: i8,
    pub exponents: Vec<i64>,
}

/// Decomposes x as a unit, or returns `None` when x is not a unit.
pub fn unit_decompose(x: &RingElem) -> Option<UnitDecomposition> {
    if x.is_zero() {
        return None;
    }
    let primes = factorize(x.d);
    let mut rest = x.m.unsigned_abs();
    let mut exponents = Vec::with_capacity(primes.len());
    for &(p, mult) in &primes {
        let mut v = 0i64;
        while rest.is_multiple_of(p as u128) {
            rest /= p as u128;
            v += 1;
        }
        exponents.push(v - x.k as i64 * mult as i64);
    }
    (rest == 1).then_some(UnitDecomposition {
        sign: if x.m < 0 { -1 } else { 1 },
        exponents,
    })
}

/// Rebuilds the unit as a ring element.
pub fn unit_value(u: &UnitDecomposition, d: u64) -> Result<RingElem> {
    let primes = factorize(d);
    let mut acc = RingElem::new(u.sign as i128, 0, d)?;
    for (&(p, mult), &n) in primes.iter().zip(&u.exponents) {
        if n >= 0 {
            let f = (p as i128).checked_pow(n as u32).ok_or_else(overflow)?;
            acc = acc.mul(&RingElem::new(f, 0, d)?)?;
        } else {
            // p^{−1} = (d/p)·d^{−1}·… : write p^{−|n|} as (d/p^{mult})^{|n|}·p^{(mult−1)|n|}/d^{|n|}.
            let cof = (d / p.pow(mult)) as i128;
            let e = (-n) as u32;
            let num = cof
                .checked_pow(e)
                .and_then(|c| c.checked_mul((p as i128).checked_pow((mult - 1) * e)?))
                .ok_or_else(overflow)?;
            acc = acc.mul(&RingElem::new(num, e, d)?)?;
        }
    }
    Ok(acc)
}

/// t with u = d^t, i.e. sign + and exponents = t·(m₁, …, m_l).
pub fn subgroup_membership(u: &UnitDecomposition, d: u64) -> Option<i64> {
    if u.sign != 1 {
        return None;
    }
    let primes = factorize(d);
    let (p0, n0) = (primes.first()?.1 as i64, *u.exponents.first()?);
    if n0 % p0 != 0 {
        return None;
    }
    let t = n0 / p0;
    primes
        .iter()
        .zip(&u.exponents)
        .all(|(&(_, m), &n)| n == t * m as i64)
        .then_some(t)
}

impl RingElem {
    /// Parses `m`, `m/d^k`, or `m/D` with D an exact power of d.
    pub fn parse_with(s: &str, d: u64) -> Result<Self> {
        let bad = || Error::Domain(format!("cannot parse {s:?} as an element of ℤ[1/{d}]"));
        let s = s.trim();
        let Some((num, den)) = s.split_once('/') else {
            return RingElem::new(s.parse().map_err(|_| bad())?, 0, d);
        };
        let m: i128 = num.trim().parse().map_err(|_| bad())?;
        let den = den.trim();
        if let Some((base, exp)) = den.split_once('^') {
            let base: u64 = base.trim().parse().map_err(|_| bad())?;
            let k: u32 = exp.trim().parse().map_err(|_| bad())?;
            if base != d {
                return Err(bad());
            }
            return RingElem::new(m, k, d);
        }
        let mut den: u128 = den.parse().map_err(|_| bad())?;
        let mut k = 0;
        while den > 1 && den.is_multiple_of(d as u128) {
            den /= d as u128;
            k += 1;
        }
        if den != 1 {
            return Err(bad());
        }
        RingElem::new(m, k, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(m: i128, k: u32, d: u64) -> RingElem {
        RingElem::new(m, k, d).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(el(1, 1, 2).add(&el(1, 1, 2)).unwrap(), RingElem::one(2));
        assert_eq!(el(4, 1, 6).mul(&el(9, 1, 6)).unwrap(), RingElem::one(6));
        let x = el(7, 3, 10);
        assert_eq!(x.add(&RingElem::zero(10)).unwrap(), x);
        assert_eq!(x.mul(&RingElem::one(10)).unwrap(), x);
    }

    #[test]
    fn units_of_z_sixth() {
        let u = unit_decompose(&el(4, 1, 6)).unwrap();
        assert_eq!(u, UnitDecomposition { sign: 1, exponents: vec![1, -1] });
        assert_eq!(unit_value(&u, 6).unwrap(), el(4, 1, 6));
        assert_eq!(unit_decompose(&el(5, 1, 6)), None);
        assert_eq!(unit_decompose(&RingElem::zero(6)), None);
        assert_eq!(subgroup_membership(&u, 6), None);
        let d = unit_decompose(&el(6, 0, 6)).unwrap();
        assert_eq!(subgroup_membership(&d, 6), Some(1));
        assert_eq!(subgroup_membership(&unit_decompose(&RingElem::one(6)).unwrap(), 6), Some(0));
        assert_eq!(subgroup_membership(&unit_decompose(&el(-1, 0, 6)).unwrap(), 6), None);
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
        assert_eq!(factorize(1_000_000), vec![(2, 6), (5, 6)]);
    }

    #[test]
    fn parsing() {
        assert_eq!(RingElem::parse_with("4/6", 6).unwrap(), el(4, 1, 6));
        assert_eq!(RingElem::parse_with("-3/6^2", 6).unwrap(), el(-3, 2, 6));
        assert_eq!(RingElem::parse_with("18/36", 6).unwrap(), el(1, 0, 2 * 3).mul(&el(18, 2, 6)).unwrap());
        assert!(RingElem::parse_with("1/5", 6).is_err());
        assert!(RingElem::parse_with("1/4^2", 6).is_err());
    }
}
