//! Versioned run reports. A report is a pure function of its [`RunConfig`]
//! and inputs, so identical runs serialize to identical bytes.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "comp-fkg/1";

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(role: &str, path: &str, bytes: &[u8]) -> Self {
        Self { role: role.to_string(), path: path.to_string(), sha256: sha256_hex(bytes) }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Everything that determines a run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_outer: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_outer: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub seed: u64,
    pub budget: u64,
    pub enumeration_cap: usize,
    pub filter_cap: usize,
    pub precision_start_bits: u32,
    pub inputs: Vec<InputDigest>,
    pub output_format: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub config: RunConfig,
    pub passed: bool,
    /// One line per check.
    pub summary: Vec<String>,
    pub results: serde_json::Value,
}

impl Report {
    pub fn new(config: RunConfig, passed: bool, summary: Vec<String>, results: serde_json::Value) -> Self {
        Self { schema: SCHEMA, config, passed, summary, results }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# comp-fkg report: {}", self.config.command).unwrap();
        writeln!(s).unwrap();
        writeln!(s, "- schema: `{}`", self.schema).unwrap();
        writeln!(s, "- result: **{}**", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        writeln!(s, "- seed: {}, budget: {}", self.config.seed, self.config.budget).unwrap();
        writeln!(
            s,
            "- caps: enumeration {}, filters {}",
            self.config.enumeration_cap, self.config.filter_cap
        )
        .unwrap();
        for input in &self.config.inputs {
            writeln!(s, "- input `{}` ({}): sha256 `{}`", input.path, input.role, input.sha256).unwrap();
        }
        writeln!(s).unwrap();
        writeln!(s, "## Summary").unwrap();
        writeln!(s).unwrap();
        for line in &self.summary {
            writeln!(s, "- {line}").unwrap();
        }
        writeln!(s).unwrap();
        writeln!(s, "## Results").unwrap();
        writeln!(s).unwrap();
        writeln!(s, "```json").unwrap();
        writeln!(s, "{}", serde_json::to_string_pretty(&self.results).expect("json")).unwrap();
        writeln!(s, "```").unwrap();
        s
    }
}
