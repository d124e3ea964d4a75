//! JSON file formats.
//!
//! * polynomial: `{"n": 2, "terms": [{"exp": [1, 0], "coef": -2.5}, ...]}`
//! * moments: `{"n": 1, "max_degree": 2, "values": [{"exp": [0], "s": 1.0}, ...]}`,
//!   every `|alpha| <= max_degree` present exactly once
//! * measure: `{"n": 1, "atoms": [[0.5], ...], "weights": [1.0, ...]}`
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`. [`Polynomial`] serializes in the polynomial file format.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::moments::MomentSequence;
use crate::polyring::{MultiIndex, Polynomial};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermEntry {
    exp: Vec<u32>,
    coef: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialFile {
    n: usize,
    terms: Vec<TermEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MomentEntry {
    exp: Vec<u32>,
    s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MomentFile {
    n: usize,
    max_degree: usize,
    values: Vec<MomentEntry>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

impl PolynomialFile {
    fn from_polynomial(f: &Polynomial) -> Self {
        PolynomialFile {
            n: f.dim(),
            terms: f
                .terms()
                .map(|(a, c)| TermEntry {
                    exp: a.exponents().to_vec(),
                    coef: c,
                })
                .collect(),
        }
    }

    fn into_polynomial(self) -> Result<Polynomial> {
        Polynomial::from_unique_terms(
            self.n,
            self.terms.into_iter().map(|t| (MultiIndex::new(t.exp), t.coef)),
        )
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialFile::from_polynomial(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        PolynomialFile::deserialize(deserializer)?
            .into_polynomial()
            .map_err(serde::de::Error::custom)
    }
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let file: PolynomialFile = serde_json::from_str(text)?;
    file.into_polynomial()
}

pub fn read_polynomial(path: impl AsRef<Path>) -> Result<Polynomial> {
    parse_polynomial(&read_text(path.as_ref())?)
}

/// Terms in graded-lex order.
pub fn polynomial_to_json(f: &Polynomial) -> serde_json::Value {
    serde_json::to_value(PolynomialFile::from_polynomial(f)).expect("plain data")
}

pub fn parse_moments(text: &str) -> Result<MomentSequence> {
    let file: MomentFile = serde_json::from_str(text)?;
    MomentSequence::from_values(
        file.n,
        file.max_degree,
        file.values.into_iter().map(|v| (MultiIndex::new(v.exp), v.s)),
    )
}

pub fn read_moments(path: impl AsRef<Path>) -> Result<MomentSequence> {
    parse_moments(&read_text(path.as_ref())?)
}

pub fn moments_to_json(s: &MomentSequence) -> serde_json::Value {
    let file = MomentFile {
        n: s.dim(),
        max_degree: s.max_degree(),
        values: s
            .iter()
            .map(|(a, v)| MomentEntry {
                exp: a.exponents().to_vec(),
                s: v,
            })
            .collect(),
    };
    serde_json::to_value(file).expect("plain data")
}

pub fn parse_measure(text: &str) -> Result<AtomicMeasure> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_measure(path: impl AsRef<Path>) -> Result<AtomicMeasure> {
    parse_measure(&read_text(path.as_ref())?)
}

pub fn measure_to_json(mu: &AtomicMeasure) -> serde_json::Value {
    serde_json::to_value(mu).expect("plain data")
}

/// Pretty-printed with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = serde_json::to_string_pretty(value)?;
    out.push('\n');
    Ok(out)
}
