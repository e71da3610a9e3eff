//! Machine-readable reports, documented in `docs/report-schema.md`.

use num_rational::Rational64;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::scenario::Loaded;

pub const SCHEMA_VERSION: u32 = 1;
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

pub(crate) fn ser_rational<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.serialize_i64(r.to_integer())
    } else {
        s.serialize_str(&r.to_string())
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub name: Option<String>,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemInfo {
    pub family: String,
    pub ranks: Vec<usize>,
    pub copies: Vec<usize>,
    pub orders: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub library_version: &'static str,
    pub command: String,
    pub scenario: ScenarioInfo,
    pub system: SystemInfo,
    pub result: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, loaded: &Loaded, result: T) -> Self {
        let system = &loaded.system;
        Report {
            schema_version: SCHEMA_VERSION,
            library_version: LIBRARY_VERSION,
            command: command.to_string(),
            scenario: ScenarioInfo {
                name: loaded.scenario.name.clone(),
                sha256: sha256_hex(&loaded.source),
            },
            system: SystemInfo {
                family: system.family().to_string(),
                ranks: system.levels().iter().map(|l| l.rank()).collect(),
                copies: system.steps().iter().map(|s| s.num_copies()).collect(),
                orders: loaded
                    .borel
                    .chambers()
                    .iter()
                    .map(|c| c.order().entries().iter().map(|e| e.to_signed()).collect())
                    .collect(),
            },
            result,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable() {
        assert_eq!(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
