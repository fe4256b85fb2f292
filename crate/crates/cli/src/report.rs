use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// What a command produced, ready to print.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Value,
    pub input_digest: String,
    pub result: Value,
    pub violations: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        // Going through `Value` sorts every map by key.
        let value = serde_json::to_value(self).expect("report serializes");
        match format {
            Format::Json => {
                let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
                out.push('\n');
                out
            }
            Format::Text => {
                let mut out = String::new();
                out.push_str(&format!("command: {}\n", value["command"]));
                out.push_str(&format!("input: {}\n", self.input_digest));
                if let Value::Object(map) = &value["result"] {
                    for (k, v) in map {
                        out.push_str(&format!("{k}: {v}\n"));
                    }
                } else {
                    out.push_str(&format!("result: {}\n", value["result"]));
                }
                if self.violations.is_empty() {
                    out.push_str("violations: none\n");
                }
                for v in &value["violations"].as_array().cloned().unwrap_or_default() {
                    out.push_str(&format!("violation: {v}\n"));
                }
                if let Some(ms) = self.timing_ms {
                    out.push_str(&format!("timing_ms: {ms}\n"));
                }
                out
            }
        }
    }
}
