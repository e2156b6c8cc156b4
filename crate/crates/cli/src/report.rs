use erglab::json::{canonical, object, At};
use erglab::Result;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Outcome of one run. Wall time is kept out so reports stay byte-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub digest: String,
    pub results: Value,
    pub exhaustive: bool,
    pub seed: u64,
}

/// SHA-256 of the canonical encoding of the inputs.
pub fn digest(inputs: &Value) -> String {
    Sha256::digest(canonical(inputs).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunReport {
    pub fn to_json(&self) -> Value {
        object([
            ("command", json!(self.command)),
            ("digest", json!(self.digest)),
            ("exhaustive", json!(self.exhaustive)),
            ("results", self.results.clone()),
            ("seed", json!(self.seed)),
        ])
    }

    pub fn from_json(at: &At<'_>) -> Result<Self> {
        let command = at.field("command", |c| c.str().map(str::to_string))?;
        let digest = at.field("digest", |d| {
            let s = d.str()?;
            if s.len() != 64 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
                return d.fail("expected 64 hex digits");
            }
            Ok(s.to_string())
        })?;
        let exhaustive = at.field("exhaustive", |e| match e.value.as_bool() {
            Some(b) => Ok(b),
            None => e.fail("expected a boolean"),
        })?;
        let results = at.field("results", |r| {
            if r.value.is_object() {
                Ok(r.value.clone())
            } else {
                r.fail("expected an object")
            }
        })?;
        let seed = at.field("seed", |s| s.usize().map(|n| n as u64))?;
        Ok(Self {
            command,
            digest,
            results,
            exhaustive,
            seed,
        })
    }
}
