//! Formal expansions of φ and ψ in monomials x^i y^m (i ≥ 0, m ∈ ℤ), graded
//! by the valuation i + m, and the order-by-order solve for Q.
//!
//! φ = y(1 + u) with u = ((1 + s)(1 + u∘H))^{1/d} − 1, s = q(x, y)/y^d.
//! ψ = xy + E where E contains monomials with m ≤ −1 and pure powers x^v.
//! Solving ψ∘H = (a/d)ψ + Q∘φ from the top valuation down fixes E one level
//! at a time; the y^v coefficient at level v (0 ≤ v ≤ d−1) determines A_v.
//! The constant of E is fixed by requiring ψ(H^N z) − x_N·y_N → 0 along
//! orbits, the normalization reproduced by the telescoping limit.

use std::collections::{BTreeMap, HashMap};

use rug::Rational;

use crate::error::{Error, Result};
use crate::exact::{Coeff, QComplex};
use crate::henon::HenonMap;

type Key = (i32, i32);

fn val((i, m): Key) -> i32 {
    i + m
}

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Series {
    terms: BTreeMap<Key, QComplex>,
}

impl Series {
    fn one() -> Self {
        Self::mono(0, 0, QComplex::from_int(1))
    }

    fn mono(i: i32, m: i32, c: QComplex) -> Self {
        let mut s = Series::default();
        s.add_term((i, m), c);
        s
    }

    fn add_term(&mut self, k: Key, c: QComplex) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_default();
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    fn get(&self, k: Key) -> QComplex {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    fn add_scaled(&mut self, other: &Series, c: &QComplex, cutoff: i32) {
        for (&k, v) in &other.terms {
            if val(k) >= cutoff {
                self.add_term(k, v * c);
            }
        }
    }

    fn add(&self, other: &Series) -> Series {
        let mut out = self.clone();
        out.add_scaled(other, &QComplex::from_int(1), i32::MIN);
        out
    }

    fn mul(&self, other: &Series, cutoff: i32) -> Series {
        let mut out = Series::default();
        for (&(i1, m1), c1) in &self.terms {
            for (&(i2, m2), c2) in &other.terms {
                let k = (i1 + i2, m1 + m2);
                if val(k) >= cutoff {
                    out.add_term(k, c1 * c2);
                }
            }
        }
        out
    }

    fn shift_y(&self, by: i32) -> Series {
        Series {
            terms: self.terms.iter().map(|(&(i, m), c)| ((i, m + by), c.clone())).collect(),
        }
    }

    fn truncate(&self, cutoff: i32) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(&k, _)| val(k) >= cutoff)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    fn max_val(&self) -> Option<i32> {
        self.terms.keys().map(|&k| val(k)).max()
    }

    fn level(&self, v: i32) -> Vec<(Key, QComplex)> {
        self.terms
            .iter()
            .filter(|(&k, _)| val(k) == v)
            .map(|(k, c)| (*k, c.clone()))
            .collect()
    }

    /// Σ_{k≥1} binom(e, k)·self^k for a series of negative valuation.
    fn binomial_minus_one(&self, e: &Rational, cutoff: i32) -> Series {
        let mut out = Series::default();
        let mut power = Series::one();
        let mut coeff = Rational::from(1);
        for k in 1.. {
            power = power.mul(self, cutoff);
            if power.terms.is_empty() {
                break;
            }
            coeff = coeff * (Rational::from(e - (k - 1) as i64)) / Rational::from(k as i64);
            out.add_scaled(&power, &QComplex::real(coeff.clone()), cutoff);
        }
        out
    }
}

struct Solver {
    d: i32,
    s: Series,
    /// (1 + s)^m keyed by (m, cutoff).
    cache: HashMap<(i32, i32), Series>,
}

impl Solver {
    fn new(map: &HenonMap) -> Self {
        let d = map.d() as i32;
        let mut s = Series::default();
        for (j, c) in map.coeffs().iter().enumerate() {
            s.add_term((0, j as i32 - d), c.clone());
        }
        s.add_term((1, -d), map.a().neg_ref());
        Solver {
            d,
            s,
            cache: HashMap::new(),
        }
    }

    fn one_plus_s_pow(&mut self, m: i32, cutoff: i32) -> Series {
        if let Some(hit) = self.cache.get(&(m, cutoff)) {
            return hit.clone();
        }
        let res = if m >= 0 {
            let base = Series::one().add(&self.s);
            let mut acc = Series::one();
            for _ in 0..m {
                acc = acc.mul(&base, cutoff);
            }
            acc
        } else {
            let mut r = self.s.binomial_minus_one(&Rational::from(m), cutoff);
            r.add_term((0, 0), QComplex::from_int(1));
            r
        };
        self.cache.insert((m, cutoff), res.clone());
        res
    }

    /// Monomial x^i y^m composed with H: y^{i+dm}(1 + s)^m.
    fn compose_mono(&mut self, (i, m): Key, cutoff: i32) -> Series {
        let shift = i + self.d * m;
        self.one_plus_s_pow(m, cutoff - shift).shift_y(shift)
    }

    fn compose(&mut self, f: &Series, cutoff: i32) -> Series {
        let mut out = Series::default();
        for (&k, c) in &f.terms {
            let ch = self.compose_mono(k, cutoff);
            out.add_scaled(&ch, c, cutoff);
        }
        out
    }

    fn solve_u(&mut self, cutoff: i32) -> Result<Series> {
        let inv_d = Rational::from((1, self.d));
        let mut u = Series::default();
        for _ in 0..(4 * (1 - cutoff) + 8) {
            let uh = self.compose(&u, cutoff);
            let w = self.s.add(&uh).add(&self.s.mul(&uh, cutoff)).truncate(cutoff);
            let next = w.binomial_minus_one(&inv_d, cutoff);
            if next == u {
                return Ok(u);
            }
            u = next;
        }
        Err(Error::Inconsistent("Böttcher series did not stabilise".into()))
    }
}

/// Output of the formal solve.
#[derive(Clone, Debug)]
pub struct FormalSolution {
    /// A_0, …, A_{d−1}.
    pub coeffs: Vec<QComplex>,
    /// A_0 under the normalization with zero constant in E, for reference.
    pub a0_zero_constant: QComplex,
    /// Monomials (i, m, c) of ψ − xy.
    pub psi_correction: Vec<(i32, i32, QComplex)>,
    /// Monomials (i, m, c) of φ/y − 1.
    pub phi_correction: Vec<(i32, i32, QComplex)>,
}

/// Solves for Q keeping φ-monomials of valuation ≥ −truncation.
pub fn solve_formal(map: &HenonMap, truncation: u32) -> Result<FormalSolution> {
    let d = map.d() as i32;
    let cutoff_u = -(truncation as i32) - 1;
    let cutoff = cutoff_u + d + 1;
    if cutoff > 0 {
        return Err(Error::UnderDetermined {
            missing_orders: (0..cutoff.min(d)).map(i64::from).collect(),
        });
    }
    let mut sv = Solver::new(map);
    let u = sv.solve_u(cutoff_u)?;
    let one_u = Series::one().add(&u);
    let mut phi_pows = vec![Series::one()];
    for j in 1..=d + 1 {
        let next = phi_pows[j as usize - 1].mul(&one_u, cutoff_u);
        phi_pows.push(next);
    }
    // y^j (1 + u)^j, valid down to valuation `cutoff`.
    let phi_pow = |j: i32| phi_pows[j as usize].shift_y(j).truncate(cutoff);

    let a = map.a().clone();
    let d_q = QComplex::from_int(d as i64);
    let a_over_d = a.div(&d_q).expect("d ≠ 0");
    let d_over_a = d_q.div(&a).expect("a ≠ 0");

    // D = E∘H − (a/d)E − Q∘φ + (xy)∘H − (a/d)xy, starting from E = 0, A = 0.
    let mut dres = Series::mono(0, d + 1, QComplex::from_int(1)).add(&Series::mono(1, 1, a.neg_ref()));
    for (j, c) in map.coeffs().iter().enumerate() {
        dres.add_term((0, j as i32 + 1), c.clone());
    }
    dres.add_term((1, 1), a_over_d.neg_ref());
    dres.add_scaled(&phi_pow(d + 1), &QComplex::from_int(-1), cutoff);

    let mut e = Series::default();
    let mut coeffs = vec![QComplex::default(); d as usize];
    let mut a0_zero_constant = QComplex::default();
    let mut violations = Vec::new();
    let top = dres.max_val().unwrap_or(0).max(d + 1);
    for v in (cutoff..=top).rev() {
        for ((i, m), c) in dres.level(v) {
            if i == 0 && m >= 0 {
                continue;
            }
            if m >= 1 {
                violations.push(format!("x^{i} y^{m}"));
                continue;
            }
            let coeff = &d_over_a * &c;
            e.add_term((i, m), coeff.clone());
            dres.add_term((i, m), c.neg_ref());
            if m == 0 {
                dres.add_term((0, i), coeff);
            } else {
                let ch = sv.compose_mono((i, m), cutoff);
                dres.add_scaled(&ch, &coeff, cutoff);
            }
        }
        if v < 0 {
            continue;
        }
        let rest = dres.get((0, v));
        if v >= d {
            if !rest.is_zero() {
                violations.push(format!("y^{v}"));
            }
        } else {
            let mut av = rest;
            if v == 0 {
                a0_zero_constant = av.clone();
                // Constant of E: cancels the limit of the weight-zero part
                // (i + d·m = 0) along orbits.
                let k: QComplex = e
                    .terms
                    .iter()
                    .filter(|(&(i, m), _)| i + d * m == 0 && (i, m) != (0, 0))
                    .fold(QComplex::default(), |acc, (_, c)| &acc + c);
                let c00 = k.neg_ref();
                let one_minus = &QComplex::from_int(1) - &a_over_d;
                av = &av + &(&c00 * &one_minus);
                e.add_term((0, 0), c00);
            }
            dres.add_scaled(&phi_pow(v), &av.neg_ref(), cutoff);
            coeffs[v as usize] = av;
        }
    }
    if let Some((i, m)) = e.terms.keys().find(|&&(i, m)| i + d * m > 0) {
        violations.push(format!("positive-weight term x^{i} y^{m} in ψ"));
    }
    if !violations.is_empty() {
        return Err(Error::Inconsistent(format!(
            "formal solve left nonzero terms: {}",
            violations.join(", ")
        )));
    }
    let flatten = |s: &Series| s.terms.iter().map(|(&(i, m), c)| (i, m, c.clone())).collect();
    Ok(FormalSolution {
        coeffs,
        a0_zero_constant,
        psi_correction: flatten(&e),
        phi_correction: flatten(&u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, den: i64) -> QComplex {
        QComplex::from_ratio(n, den)
    }

    #[test]
    fn quadratic_u_by_hand() {
        // p = y², a = 3: u = −(3/2)x/y² − (9/8)x²/y⁴ − (3/4)/y³ − (27/16)x³/y⁶ + …
        let h = HenonMap::from_terms(2, &[], QComplex::from_int(3)).unwrap();
        let mut sv = Solver::new(&h);
        let u = sv.solve_u(-4).unwrap();
        assert_eq!(u.get((1, -2)), q(-3, 2));
        assert_eq!(u.get((2, -4)), q(-9, 8));
        assert_eq!(u.get((0, -3)), q(-3, 4));
        let u6 = sv.solve_u(-4).unwrap().truncate(-3);
        assert_eq!(u6.get((3, -6)), q(-27, 16));
    }

    #[test]
    fn quadratic_lift_by_hand() {
        let h = HenonMap::from_terms(2, &[], QComplex::from_int(3)).unwrap();
        let sol = solve_formal(&h, 5).unwrap();
        assert_eq!(sol.coeffs[1], QComplex::default());
        assert_eq!(sol.a0_zero_constant, QComplex::default());
        assert_eq!(sol.coeffs[0], q(-9, 8));
        let e: BTreeMap<Key, QComplex> = sol.psi_correction.iter().map(|(i, m, c)| ((*i, *m), c.clone())).collect();
        assert_eq!(e[&(2, -1)], q(-9, 4));
        assert_eq!(e[&(3, -3)], q(-9, 8));
    }

    #[test]
    fn phi_series_matches_numeric_product() {
        use crate::boettcher::phi::phi;
        use crate::henon::estimate_filtration_radius;
        use num_complex::Complex64;
        let h = HenonMap::from_terms(3, &[(1, QComplex::from_int(2)), (0, QComplex::from_ratio(1, 2))], QComplex::from_int(5))
            .unwrap();
        let sol = solve_formal(&h, 8).unwrap();
        let fr = estimate_filtration_radius(&h);
        let z = (Complex64::new(30.0, 10.0), Complex64::new(-20.0, 60.0));
        let series: Complex64 = sol
            .phi_correction
            .iter()
            .map(|(i, m, c)| c.to_c64() * z.0.powi(*i) * z.1.powi(*m))
            .sum::<Complex64>()
            + 1.0;
        let numeric = phi(&h, &fr, z, 30).unwrap().value / z.1;
        // Remainder is of valuation −10 at |y| ≈ 63.
        assert!((series - numeric).norm() < 1e-12, "{series} vs {numeric}");
    }

    #[test]
    fn low_truncation_is_under_determined() {
        let h = HenonMap::from_terms(3, &[], QComplex::from_int(9)).unwrap();
        match solve_formal(&h, 1) {
            Err(Error::UnderDetermined { missing_orders }) => assert_eq!(missing_orders, vec![0, 1]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(solve_formal(&h, 3).is_ok());
    }
}
