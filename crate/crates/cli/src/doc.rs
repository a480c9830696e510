//! The JSON system-description format: parsing, validation into a
//! [`FormSystem`], and bit-exact round-tripping.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use formcount_core::{BoxRegion, FormSystem, IntegerForm, Monomial};

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1";

/// A coefficient of arbitrary size. Serialized as a JSON integer when it
/// fits in 64 bits and as a decimal string otherwise; both forms are
/// accepted on input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coeff(pub BigInt);

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct CoeffVisitor;
        impl Visitor<'_> for CoeffVisitor {
            type Value = Coeff;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coeff, E> {
                Ok(Coeff(BigInt::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coeff, E> {
                Ok(Coeff(BigInt::from(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coeff, E> {
                v.parse::<BigInt>()
                    .map(Coeff)
                    .map_err(|_| E::custom(format!("coeff string {v:?} is not an integer")))
            }
        }
        d.deserialize_any(CoeffVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDoc {
    pub coeff: Coeff,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDoc {
    pub degree: u32,
    pub monomials: Vec<MonomialDoc>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverridesDoc {
    /// Known singular-locus dimensions B_d, keyed by degree.
    #[serde(rename = "B", default, skip_serializing_if = "BTreeMap::is_empty")]
    pub b: BTreeMap<u32, u32>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residues: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expsum: Option<f64>,
    /// Point budget for finite-field singular-locus sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<f64>,
}

impl BudgetsDoc {
    pub fn is_empty(&self) -> bool {
        self == &BudgetsDoc::default()
    }
}

/// The versioned interchange document describing a form system together
/// with optional overrides, budgets and a default seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub schema_version: String,
    pub n: usize,
    #[serde(rename = "M")]
    pub modulus: u64,
    pub m0: Vec<i64>,
    #[serde(rename = "box")]
    pub box_sides: Vec<(f64, f64)>,
    pub forms: Vec<FormDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<OverridesDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<BudgetsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SystemDocument {
    /// Build a document from a validated system.
    pub fn from_system(sys: &FormSystem) -> Self {
        let forms = sys
            .all_forms()
            .map(|(degree, f)| FormDoc {
                degree,
                monomials: f
                    .monomials()
                    .map(|m| MonomialDoc { coeff: Coeff(m.coefficient), exps: m.exponents })
                    .collect(),
            })
            .collect();
        SystemDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            n: sys.n(),
            modulus: sys.modulus(),
            m0: sys.m0().to_vec(),
            box_sides: sys.box_region().sides().to_vec(),
            forms,
            overrides: None,
            budgets: None,
            seed: None,
        }
    }

    /// Validate into a form system; diagnostics name the offending field.
    pub fn to_form_system(&self) -> Result<FormSystem, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "schema_version: expected \"{SCHEMA_VERSION}\", got \"{}\"",
                self.schema_version
            )));
        }
        if self.modulus == 0 {
            return Err(CliError::Validation("M: must be positive".into()));
        }
        for (j, &c) in self.m0.iter().enumerate() {
            if c < 0 || c as u64 >= self.modulus {
                return Err(CliError::Validation(format!(
                    "m0[{j}]: coordinate out of [0, M-1]"
                )));
            }
        }
        let box_region = BoxRegion::new(self.box_sides.clone())
            .map_err(|e| CliError::Validation(format!("box: {e}")))?;
        let mut forms = Vec::with_capacity(self.forms.len());
        for (i, fd) in self.forms.iter().enumerate() {
            for (k, m) in fd.monomials.iter().enumerate() {
                let total: u64 = m.exps.iter().map(|&e| u64::from(e)).sum();
                if total != u64::from(fd.degree) {
                    return Err(CliError::Validation(format!(
                        "forms[{i}].monomials[{k}]: exponent sum {total} != degree {}",
                        fd.degree
                    )));
                }
            }
            let monomials = fd
                .monomials
                .iter()
                .map(|m| Monomial { coefficient: m.coeff.0.clone(), exponents: m.exps.clone() })
                .collect();
            let form = IntegerForm::new(self.n, fd.degree, monomials)
                .map_err(|e| CliError::Validation(format!("forms[{i}]: {e}")))?;
            forms.push(form);
        }
        FormSystem::new(self.n, self.modulus, self.m0.clone(), box_region, forms)
            .map_err(|e| CliError::Validation(e.to_string()))
    }
}

/// Parse and validate a system document from JSON text.
pub fn parse_system(text: &str) -> Result<SystemDocument, CliError> {
    let doc: SystemDocument = serde_json::from_str(text)
        .map_err(|e| CliError::Validation(format!("document: {e}")))?;
    doc.to_form_system()?;
    Ok(doc)
}

/// Serialize a document; `parse_system(serialize_system(d)) == d`.
pub fn serialize_system(doc: &SystemDocument) -> String {
    serde_json::to_string_pretty(doc).expect("document serialization cannot fail")
}
