use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rug::{Integer, Rational};

use super::{Coeff, QComplex};

/// The cyclotomic field ℚ(ζ_N), ζ_N = exp(2πi/N), as ℚ[x]/Φ_N(x).
#[derive(Debug, PartialEq, Eq)]
pub struct CycloField {
    n: u32,
    /// Φ_N without its leading 1, lowest degree first.
    phi_tail: Vec<Integer>,
}

impl CycloField {
    pub fn new(n: u32) -> Arc<Self> {
        assert!(n >= 1, "cyclotomic order must be positive");
        let phi = cyclotomic_poly(n);
        let deg = phi.len() - 1;
        Arc::new(CycloField {
            n,
            phi_tail: phi[..deg].to_vec(),
        })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    /// Degree of the field over ℚ, i.e. Euler's φ(N).
    pub fn degree(&self) -> usize {
        self.phi_tail.len()
    }

    /// ζ_N^k for any integer k.
    pub fn zeta_pow(self: &Arc<Self>, k: i64) -> Cyclo {
        let e = k.rem_euclid(self.n as i64) as usize;
        let mut coeffs = vec![Rational::new(); e + 1];
        coeffs[e] = Rational::from(1);
        Cyclo::reduced(Some(self.clone()), coeffs)
    }

    pub fn rational(self: &Arc<Self>, r: Rational) -> Cyclo {
        Cyclo::reduced(Some(self.clone()), vec![r])
    }

    /// Embeds a Gaussian rational; requires 4 | N so that i = ζ_N^{N/4}.
    pub fn embed(self: &Arc<Self>, z: &QComplex) -> Cyclo {
        assert!(self.n.is_multiple_of(4), "ℚ(i) embeds only when 4 divides N");
        let i = self.zeta_pow((self.n / 4) as i64);
        let re = self.rational(z.re.clone());
        re.add_ref(&i.mul_ref(&Cyclo::from_rational(z.im.clone())))
    }
}

/// Integer coefficients of Φ_n, lowest degree first.
fn cyclotomic_poly(n: u32) -> Vec<Integer> {
    // x^n - 1 divided by Φ_k for every proper divisor k of n.
    let mut num = vec![Integer::new(); n as usize + 1];
    num[0] = Integer::from(-1);
    num[n as usize] = Integer::from(1);
    for k in (1..n).filter(|k| n.is_multiple_of(*k)) {
        num = div_exact_monic(&num, &cyclotomic_poly(k));
    }
    num
}

fn div_exact_monic(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![Integer::new(); qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd].clone();
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= Integer::from(&c * dj);
            }
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|r| *r == 0));
    q
}

/// An element of ℚ(ζ_N) in the power basis 1, ζ, …, ζ^{φ(N)−1}.
///
/// `field == None` marks a plain rational, so that `zero()` and `one()` can be
/// built without a field handle.
#[derive(Clone)]
pub struct Cyclo {
    field: Option<Arc<CycloField>>,
    coeffs: Vec<Rational>,
}

impl Cyclo {
    pub fn from_rational(r: Rational) -> Self {
        Cyclo::reduced(None, vec![r])
    }

    fn reduced(field: Option<Arc<CycloField>>, mut coeffs: Vec<Rational>) -> Self {
        if let Some(f) = &field {
            let deg = f.degree();
            while coeffs.len() > deg {
                let top = coeffs.pop().expect("nonempty");
                if top != 0 {
                    let base = coeffs.len() - deg;
                    for (j, pj) in f.phi_tail.iter().enumerate() {
                        coeffs[base + j] -= Rational::from(&top * pj);
                    }
                }
            }
        }
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Cyclo { field, coeffs }
    }

    pub fn field(&self) -> Option<&Arc<CycloField>> {
        self.field.as_ref()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn join(&self, other: &Self) -> Option<Arc<CycloField>> {
        match (&self.field, &other.field) {
            (Some(f), Some(g)) => {
                assert!(f.n == g.n, "mixing cyclotomic fields of different order");
                Some(f.clone())
            }
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (None, None) => None,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|c| Rational::from(c * r)).collect();
        Cyclo::reduced(self.field.clone(), coeffs)
    }

    /// Returns the element as a Gaussian rational if it lies in ℚ(i).
    pub fn to_qcomplex(&self) -> Option<QComplex> {
        let Some(f) = &self.field else {
            return Some(QComplex::real(self.coeffs.first().cloned().unwrap_or_default()));
        };
        if f.n % 4 != 0 {
            return (self.coeffs.len() <= 1)
                .then(|| QComplex::real(self.coeffs.first().cloned().unwrap_or_default()));
        }
        // Solve self = r + s·i using the power-basis image of i.
        let i = f.zeta_pow((f.n / 4) as i64);
        let k = i.coeffs.iter().rposition(|c| *c != 0)?;
        let s = self.coeffs.get(k).cloned().unwrap_or_default() / &i.coeffs[k] ;
        let rest = self.sub_ref(&i.scale(&s));
        if rest.coeffs.len() <= 1 {
            Some(QComplex::new(rest.coeffs.first().cloned().unwrap_or_default(), s))
        } else {
            None
        }
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        // Reduced representations are unique, so compare coefficient lists.
        self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_qcomplex() {
            return write!(f, "{q}");
        }
        let n = self.field.as_ref().map_or(1, |f| f.n);
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| format!("({c})ζ{n}^{k}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Coeff for Cyclo {
    fn zero() -> Self {
        Cyclo {
            field: None,
            coeffs: Vec::new(),
        }
    }
    fn one() -> Self {
        Cyclo::from_rational(Rational::from(1))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => Rational::from(a + b),
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Cyclo::reduced(self.join(other), coeffs)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Cyclo::zero();
        }
        let mut coeffs = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += Rational::from(a * b);
            }
        }
        Cyclo::reduced(self.join(other), coeffs)
    }
    fn neg_ref(&self) -> Self {
        Cyclo {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
    fn to_c64(&self) -> Complex64 {
        let n = self.field.as_ref().map_or(1, |f| f.n) as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| Complex64::from_polar(c.to_f64(), TAU * k as f64 / n))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| -> Vec<i64> { cyclotomic_poly(n).iter().map(|c| c.to_i64().unwrap()).collect() };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(CycloField::new(60).degree(), 16);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(as_i64(105).contains(&-2));
    }

    #[test]
    fn zeta_has_exact_order() {
        for n in [3u32, 8, 12, 15, 24, 60] {
            let f = CycloField::new(n);
            let z = f.zeta_pow(1);
            let mut acc = Cyclo::one();
            for k in 1..=n {
                acc = acc.mul_ref(&z);
                assert!(!acc.is_zero());
                assert_eq!(acc == Cyclo::one(), k == n, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn gaussian_embedding_round_trips() {
        let f = CycloField::new(24);
        let q = QComplex::new(Rational::from((2, 3)), Rational::from(-5));
        let e = f.embed(&q);
        assert_eq!(e.to_qcomplex(), Some(q.clone()));
        assert!((e.to_c64() - q.to_c64()).norm() < 1e-14);
        assert_eq!(f.zeta_pow(1).to_qcomplex(), None);
        assert_eq!(f.zeta_pow(12).to_qcomplex(), Some(QComplex::from_int(-1)));
    }
}
