//! Built-in curves and branches with their expected invariants.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::PolyParser;
use crate::error::{Error, Result};
use crate::geometry::branch::Branch;
use crate::geometry::curve::CurveSpec;

const SOURCES: [(&str, &str); 5] = [
    ("twisted_cubic", include_str!("../corpus/twisted_cubic.json")),
    ("viviani", include_str!("../corpus/viviani.json")),
    ("sextic_rational", include_str!("../corpus/sextic_rational.json")),
    ("e6_sextic", include_str!("../corpus/e6_sextic.json")),
    ("ladder", include_str!("../corpus/ladder.json")),
];

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Stated in the literature for this example.
    Published,
    /// Computed here and pinned as a regression value.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub value: Value,
    pub source: Source,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub description: String,
    /// The whole file; a curve file when `kind` is present.
    pub raw: Value,
    pub expected: BTreeMap<String, Expected>,
}

impl CorpusEntry {
    pub fn from_json(raw: Value) -> Result<Self> {
        let name = raw.get("name").and_then(Value::as_str).ok_or_else(|| Error::Invalid("corpus entry lacks `name`".into()))?;
        let expected = match raw.get("expected") {
            Some(e) => serde_json::from_value(e.clone()).map_err(|e| Error::Invalid(format!("bad expected values: {e}")))?,
            None => BTreeMap::new(),
        };
        Ok(CorpusEntry {
            name: name.to_string(),
            description: raw.get("description").and_then(Value::as_str).unwrap_or_default().to_string(),
            expected,
            raw,
        })
    }

    pub fn has_curve(&self) -> bool {
        self.raw.get("kind").is_some()
    }

    pub fn curve(&self) -> Result<CurveSpec> {
        if !self.has_curve() {
            return Err(Error::Invalid(format!("corpus entry `{}` has no curve", self.name)));
        }
        CurveSpec::from_json(&self.raw)
    }

    pub fn branches(&self) -> Result<Vec<Branch>> {
        parse_branches(self.raw.get("branches").unwrap_or(&Value::Null))
    }

    pub fn expected(&self, key: &str) -> Option<&Expected> {
        self.expected.get(key)
    }

    pub fn expected_i64(&self, key: &str) -> Option<i64> {
        self.expected(key).and_then(|e| e.value.as_i64())
    }

    /// Expected value as a list of `[e, r, s]` triples.
    pub fn expected_types(&self, key: &str) -> Option<Vec<[u32; 3]>> {
        self.expected(key).and_then(|e| serde_json::from_value(e.value.clone()).ok())
    }
}

/// A list of branch objects, sharing one parser so radicals resolve consistently.
pub fn parse_branches(v: &Value) -> Result<Vec<Branch>> {
    let list = match v {
        Value::Null => return Ok(Vec::new()),
        Value::Array(a) => a,
        Value::Object(_) => return parse_branches(v.get("branches").unwrap_or(&Value::Null)),
        _ => return Err(Error::Invalid("branches must be a list".into())),
    };
    let mut ctx = PolyParser::new();
    list.iter().map(|b| Branch::from_json(b, &mut ctx)).collect()
}

pub fn names() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.0).collect()
}

pub fn entry(name: &str) -> Result<CorpusEntry> {
    let (_, text) = SOURCES
        .iter()
        .find(|s| s.0 == name)
        .ok_or_else(|| Error::Invalid(format!("no corpus entry `{name}`; known: {}", names().join(", "))))?;
    let raw: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("corpus file `{name}`: {e}")))?;
    CorpusEntry::from_json(raw)
}

pub fn all() -> Result<Vec<CorpusEntry>> {
    names().into_iter().map(entry).collect()
}
