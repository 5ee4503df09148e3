//! JSON map descriptions: {"d": 3, "p": [a0, a1, ...], "a": [re, im]}.
//!
//! Each coefficient may be a JSON number, a `[re, im]` pair, or a string
//! such as "1/2-3i". `p` lists either the centered coefficients a₀…a_{d−2}
//! or all d+1 coefficients of p, constant term first; a full list that is
//! not monic and centered is normalized by affine conjugation.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{parse_complex, parse_rational, QComplex};
use crate::henon::{normalize, AffineConjugation, HenonMap, RawHenonMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub d: u32,
    #[serde(deserialize_with = "de_complex_vec")]
    pub p: Vec<QComplex>,
    #[serde(deserialize_with = "de_complex")]
    pub a: QComplex,
}

impl MapSpec {
    /// Canonical description: centered coefficients, exact strings.
    pub fn from_map(map: &HenonMap) -> Self {
        MapSpec {
            d: map.d(),
            p: map.coeffs().to_vec(),
            a: map.a().clone(),
        }
    }

    pub fn to_map(&self) -> Result<(HenonMap, AffineConjugation)> {
        let d = self.d as usize;
        if self.p.len() + 1 == d {
            Ok((HenonMap::new(self.d, self.p.clone(), self.a.clone())?, AffineConjugation::identity()))
        } else if self.p.len() == d + 1 {
            normalize(&RawHenonMap {
                p: self.p.clone(),
                a: self.a.clone(),
            })
        } else {
            Err(Error::InvalidMap(format!(
                "p has {} coefficients; expected {} (centered) or {} (full)",
                self.p.len(),
                d.saturating_sub(1),
                d + 1
            )))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidMap(e.to_string()))
    }
}

pub fn complex_from_value(v: &Value) -> std::result::Result<QComplex, String> {
    let part = |v: &Value| match v {
        Value::Number(n) => parse_rational(&n.to_string()).map_err(|e| e.to_string()),
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        other => Err(format!("expected a number, found {other}")),
    };
    match v {
        Value::Number(_) => Ok(QComplex::real(part(v)?)),
        Value::String(s) => parse_complex(s).map_err(|e| e.to_string()),
        Value::Array(pair) if pair.len() == 2 => Ok(QComplex::new(part(&pair[0])?, part(&pair[1])?)),
        other => Err(format!("cannot read {other} as a complex number")),
    }
}

fn de_complex<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<QComplex, D::Error> {
    complex_from_value(&Value::deserialize(de)?).map_err(de::Error::custom)
}

fn de_complex_vec<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Vec<QComplex>, D::Error> {
    Vec::<Value>::deserialize(de)?
        .iter()
        .map(|v| complex_from_value(v).map_err(de::Error::custom))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_mixed_coefficient_forms() {
        let spec = MapSpec::from_json(r#"{"d":3,"p":[0.5,[1,-2]],"a":"9"}"#).unwrap();
        assert_eq!(spec.p[0], QComplex::from_ratio(1, 2));
        assert_eq!(spec.p[1], QComplex::new(1.into(), (-2).into()));
        let (h, conj) = spec.to_map().unwrap();
        assert!(conj.is_identity());
        assert_eq!(h.a(), &QComplex::from_int(9));
    }

    #[test]
    fn full_list_is_normalized() {
        // p(y) = y² + 2y: centering y ↦ y − 1 gives y² − 1 after conjugation.
        let spec = MapSpec::from_json(r#"{"d":2,"p":[0,2,1],"a":3}"#).unwrap();
        let (h, conj) = spec.to_map().unwrap();
        assert!(!conj.is_identity());
        assert_eq!(h.d(), 2);
    }

    #[test]
    fn canonical_form_round_trips() {
        let spec = MapSpec::from_json(r#"{"d":2,"p":["1/3+i"],"a":[3,0]}"#).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(MapSpec::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let spec = MapSpec::from_json(r#"{"d":3,"p":[1],"a":2}"#).unwrap();
        assert!(matches!(spec.to_map(), Err(Error::InvalidMap(_))));
    }
}
