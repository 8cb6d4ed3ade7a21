//! Surface description files.
//!
//! JSON documents whose rational entries are strings `"p/q"` (JSON integers
//! are accepted too). Decimal numbers are rejected.

use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactform::{RationalVector, SymmetricForm};
use crate::nsgeom::{DivisorClass, Kodaira, NSLattice, SurfaceModel};
use crate::rational::{int, parse_rational, render, Rational};

/// A rational that (de)serializes through its exact `p/q` text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExactVisitor;
        impl Visitor<'_> for ExactVisitor {
            type Value = Exact;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an exact rational: a string \"p/q\" or an integer")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exact, E> {
                Ok(Exact(int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exact, E> {
                Ok(Exact(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exact, E> {
                Err(E::custom(format!("decimal {v} is not exact; write it as a \"p/q\" string")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exact, E> {
                parse_rational(v).map(Exact).map_err(|e| E::custom(e.to_string()))
            }
        }
        d.deserialize_any(ExactVisitor)
    }
}

fn serialize_kodaira<S: Serializer>(k: &Kodaira, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&k.to_string())
}

fn deserialize_kodaira<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Kodaira, D::Error> {
    struct KodairaVisitor;
    impl Visitor<'_> for KodairaVisitor {
        type Value = Kodaira;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("one of \"minus_infinity\", 0, 1, 2")
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Kodaira, E> {
            match v {
                0 => Ok(Kodaira::Zero),
                1 => Ok(Kodaira::One),
                2 => Ok(Kodaira::Two),
                _ => Err(E::custom(format!("Kodaira dimension {v} is not -inf, 0, 1 or 2"))),
            }
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Kodaira, E> {
            self.visit_i64(i64::try_from(v).unwrap_or(i64::MAX))
        }
        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Kodaira, E> {
            match v {
                "minus_infinity" | "-inf" | "-infinity" => Ok(Kodaira::MinusInfinity),
                "0" => Ok(Kodaira::Zero),
                "1" => Ok(Kodaira::One),
                "2" => Ok(Kodaira::Two),
                _ => Err(E::custom(format!("unknown Kodaira dimension `{v}`"))),
            }
        }
    }
    d.deserialize_any(KodairaVisitor)
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NsConfig {
    pub rank: usize,
    pub gram: Vec<Vec<Exact>>,
}

/// Marks a config as the model of a smooth hypersurface of degree `d` in
/// `P^{n+1}`, which enables the closed-form cross-check for `n = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypersurfaceTag {
    pub n: u32,
    pub d: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub name: String,
    pub char_p: u64,
    #[serde(serialize_with = "serialize_kodaira", deserialize_with = "deserialize_kodaira")]
    pub kodaira: Kodaira,
    #[serde(default)]
    pub quasi_elliptic: bool,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub minimal: bool,
    #[serde(rename = "K2_min")]
    pub k2_min: i64,
    #[serde(rename = "chi_O_min")]
    pub chi_o_min: i64,
    pub ns: NsConfig,
    #[serde(rename = "ample_H")]
    pub ample_h: Vec<Exact>,
    pub canonical: Vec<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bd_candidates: Option<Vec<Vec<Exact>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_generators: Option<Vec<Vec<Exact>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypersurface: Option<HypersurfaceTag>,
}

fn field_error(field: &str, msg: impl fmt::Display) -> Error {
    Error::Parse(format!("config field `{field}`: {msg}"))
}

impl SurfaceConfig {
    /// Parses the text form. Errors name the offending field path together
    /// with serde_json's line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                Error::Parse(format!("config: {inner}"))
            } else {
                field_error(&path, inner)
            }
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn to_model(&self) -> Result<SurfaceModel> {
        let rank = self.ns.rank;
        if self.ns.gram.len() != rank || self.ns.gram.iter().any(|r| r.len() != rank) {
            return Err(field_error("ns.gram", format!("expected a {rank}x{rank} matrix")));
        }
        let gram: Vec<Vec<Rational>> = self.ns.gram.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
        let lattice = SymmetricForm::new(gram).and_then(NSLattice::new).map_err(|e| field_error("ns.gram", e))?;

        let class = |field: &str, v: &[Exact]| -> Result<DivisorClass> {
            let coords = RationalVector::new(v.iter().map(|x| x.0.clone()).collect());
            DivisorClass::new(&lattice, coords).map_err(|e| field_error(field, e))
        };
        let list = |field: &str, v: &Option<Vec<Vec<Exact>>>| -> Result<Option<Vec<DivisorClass>>> {
            v.as_ref()
                .map(|xs| xs.iter().enumerate().map(|(i, x)| class(&format!("{field}[{i}]"), x)).collect())
                .transpose()
        };

        let model = SurfaceModel {
            char_p: self.char_p,
            kodaira: self.kodaira,
            quasi_elliptic: self.quasi_elliptic,
            minimal: self.minimal,
            k2_min: self.k2_min,
            chi_o_min: self.chi_o_min,
            canonical: class("canonical", &self.canonical)?,
            ample_h: class("ample_H", &self.ample_h)?,
            effective_generators: list("effective_generators", &self.effective_generators)?,
            bd_candidates: list("bd_candidates", &self.bd_candidates)?,
            lattice: Arc::clone(&lattice),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn lattice(&self) -> Result<Arc<NSLattice>> {
        Ok(Arc::clone(&self.to_model()?.lattice))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsgeom::c_constant;

    const QUINTIC: &str = r#"{
  "name": "quintic",
  "char_p": 5,
  "kodaira": 2,
  "K2_min": 5,
  "chi_O_min": 5,
  "ns": { "rank": 1, "gram": [["5"]] },
  "ample_H": ["1"],
  "canonical": [1],
  "bd_candidates": [["1"], ["2"], ["3"]],
  "hypersurface": { "n": 2, "d": 5 }
}"#;

    #[test]
    fn parses_and_builds_quintic() {
        let cfg = SurfaceConfig::parse(QUINTIC).unwrap();
        let model = cfg.to_model().unwrap();
        assert_eq!(c_constant(&model).unwrap(), int(2));
        assert_eq!(cfg.hypersurface, Some(HypersurfaceTag { n: 2, d: 5 }));
    }

    #[test]
    fn roundtrip_is_identity() {
        let cfg = SurfaceConfig::parse(QUINTIC).unwrap();
        let text = cfg.to_text();
        assert_eq!(SurfaceConfig::parse(&text).unwrap(), cfg);
        assert_eq!(SurfaceConfig::parse(&text).unwrap().to_text(), text);
    }

    #[test]
    fn decimals_rejected_with_field_path() {
        let bad = QUINTIC.replace(r#"["5"]"#, "[5.0]");
        let err = SurfaceConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("ns.gram[0][0]"), "{err}");
        assert!(err.contains("line 7"), "{err}");
        let bad = QUINTIC.replace(r#""ample_H": ["1"]"#, r#""ample_H": ["0.5"]"#);
        let err = SurfaceConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("ample_H[0]"), "{err}");
    }

    #[test]
    fn semantic_errors_name_fields() {
        let bad = QUINTIC.replace(r#""canonical": [1]"#, r#""canonical": [1, 2]"#);
        let err = SurfaceConfig::parse(&bad).unwrap().to_model().unwrap_err().to_string();
        assert!(err.contains("`canonical`"), "{err}");
        let bad = QUINTIC.replace(r#"[["5"]]"#, r#"[["-5"]]"#);
        let err = SurfaceConfig::parse(&bad).unwrap().to_model().unwrap_err().to_string();
        assert!(err.contains("ns.gram"), "{err}");
        let bad = QUINTIC.replace(r#""char_p": 5"#, r#""char_p": 5, "colour": 1"#);
        assert!(SurfaceConfig::parse(&bad).is_err());
    }

    #[test]
    fn kodaira_spellings() {
        for (text, k) in [("\"minus_infinity\"", Kodaira::MinusInfinity), ("0", Kodaira::Zero), ("\"1\"", Kodaira::One)]
        {
            let doc = QUINTIC.replace("\"kodaira\": 2", &format!("\"kodaira\": {text}"));
            assert_eq!(SurfaceConfig::parse(&doc).unwrap().kodaira, k);
        }
        let doc = QUINTIC.replace("\"kodaira\": 2", "\"kodaira\": 3");
        assert!(SurfaceConfig::parse(&doc).is_err());
    }
}
