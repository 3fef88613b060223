//! JSON diffeomorphism specs.
//!
//! ```json
//! {
//!   "nu": 2,
//!   "multipliers": ["2", "1/2"],
//!   "h": [{"component": 1, "exponent": [2, 1], "coefficient": "-1/3"}],
//!   "truncation": 5
//! }
//! ```
//!
//! Every semantic error is reported with the line of the offending value.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::value::RawValue;

use crate::diffeo::PreparedDiffeo;
use crate::error::{Error, Result};
use crate::poly::{Exponent, TruncatedPoly};
use crate::scalar::{MultiplierVector, Scalar};

pub const DEFAULT_DEGREE: u32 = 6;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec<'a> {
    #[serde(borrow)]
    nu: &'a RawValue,
    #[serde(borrow)]
    multipliers: Vec<&'a RawValue>,
    #[serde(borrow)]
    h: Vec<RawTerm<'a>>,
    #[serde(borrow, default)]
    truncation: Option<&'a RawValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm<'a> {
    #[serde(borrow)]
    component: &'a RawValue,
    #[serde(borrow)]
    exponent: &'a RawValue,
    #[serde(borrow)]
    coefficient: &'a RawValue,
}

struct Source<'a> {
    path: &'a Path,
    text: &'a str,
}

impl Source<'_> {
    fn line_of(&self, raw: &RawValue) -> usize {
        let offset = (raw.get().as_ptr() as usize).saturating_sub(self.text.as_ptr() as usize);
        self.text[..offset.min(self.text.len())]
            .matches('\n')
            .count()
            + 1
    }

    fn err(&self, raw: &RawValue, reason: impl Into<String>) -> Error {
        Error::Spec {
            path: self.path.to_path_buf(),
            line: self.line_of(raw),
            reason: reason.into(),
        }
    }

    fn value<T: serde::de::DeserializeOwned>(&self, raw: &RawValue, what: &str) -> Result<T> {
        serde_json::from_str(raw.get()).map_err(|_| self.err(raw, format!("expected {what}")))
    }

    fn scalar(&self, raw: &RawValue, what: &str) -> Result<Scalar> {
        let s: String = self.value(raw, &format!("{what} as a string"))?;
        s.parse()
            .map_err(|e: Error| self.err(raw, format!("{what}: {e}")))
    }
}

/// Parses a spec; `degree` overrides the file's truncation.
pub fn parse_spec_str(text: &str, path: &Path, degree: Option<u32>) -> Result<PreparedDiffeo> {
    let src = Source { path, text };
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Spec {
        path: path.to_path_buf(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    let nu: usize = src.value(raw.nu, "a positive integer for nu")?;
    if nu == 0 {
        return Err(src.err(raw.nu, "nu must be at least 1"));
    }
    if raw.multipliers.len() != nu {
        return Err(src.err(
            raw.nu,
            format!(
                "nu is {nu} but {} multipliers are given",
                raw.multipliers.len()
            ),
        ));
    }
    let mut mu = Vec::with_capacity(nu);
    for m in &raw.multipliers {
        let s = src.scalar(m, "multiplier")?;
        if s.is_zero() {
            return Err(src.err(m, "multiplier must be nonzero"));
        }
        mu.push(s);
    }
    let mu = MultiplierVector::new(mu)?;
    let truncation = match raw.truncation {
        Some(t) => {
            let n: u32 = src.value(t, "a positive integer for truncation")?;
            if n == 0 {
                return Err(src.err(t, "truncation must be at least 1"));
            }
            n
        }
        None => DEFAULT_DEGREE,
    };
    let degree = degree.unwrap_or(truncation);
    let mut h = vec![TruncatedPoly::zero(nu, degree); nu];
    let mut seen = BTreeSet::new();
    for t in &raw.h {
        let component: usize = src.value(t.component, "a component index")?;
        if !(1..=nu).contains(&component) {
            return Err(src.err(t.component, format!("component must be in 1..={nu}")));
        }
        let exponent: Vec<u32> = src.value(t.exponent, "an array of nonnegative integers")?;
        if exponent.len() != nu {
            return Err(src.err(t.exponent, format!("exponent needs {nu} entries")));
        }
        let exponent = Exponent::new(exponent);
        match exponent.degree() {
            0 => {
                return Err(src.err(
                    t.exponent,
                    "constant terms are not allowed: f must fix the origin",
                ))
            }
            1 => {
                return Err(src.err(
                    t.exponent,
                    "linear terms are not allowed: the linear part is diag(multipliers)",
                ))
            }
            _ => {}
        }
        if !seen.insert((component, exponent.clone())) {
            return Err(src.err(t.exponent, "duplicate term"));
        }
        let c = src.scalar(t.coefficient, "coefficient")?;
        h[component - 1].add_term(exponent, c);
    }
    PreparedDiffeo::new(mu, h, degree)
}

pub fn parse_spec(path: &Path, degree: Option<u32>) -> Result<PreparedDiffeo> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spec_str(&text, path, degree)
}

/// The canonical spec text of `f`, including its truncation degree.
pub fn write_spec(f: &PreparedDiffeo) -> String {
    let q = |s: &dyn std::fmt::Display| serde_json::to_string(&s.to_string()).expect("string");
    let mut out = String::from("{\n");
    writeln!(out, "  \"nu\": {},", f.nu()).unwrap();
    let mus: Vec<String> = f.mu().as_slice().iter().map(|m| q(m)).collect();
    writeln!(out, "  \"multipliers\": [{}],", mus.join(", ")).unwrap();
    let mut terms = Vec::new();
    for (i, p) in f.h().iter().enumerate() {
        for (m, c) in p.terms() {
            let e: Vec<String> = m.as_slice().iter().map(u32::to_string).collect();
            terms.push(format!(
                "    {{\"component\": {}, \"exponent\": [{}], \"coefficient\": {}}}",
                i + 1,
                e.join(", "),
                q(c)
            ));
        }
    }
    if terms.is_empty() {
        out.push_str("  \"h\": [],\n");
    } else {
        writeln!(out, "  \"h\": [\n{}\n  ],", terms.join(",\n")).unwrap();
    }
    writeln!(out, "  \"truncation\": {}", f.degree()).unwrap();
    out.push_str("}\n");
    out
}

pub fn spec_path(dir: &Path) -> PathBuf {
    dir.join("spec.json")
}
