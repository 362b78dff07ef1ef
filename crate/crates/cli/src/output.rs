use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};
use vhshift_core::io::{to_json_string, write_atomic};

use crate::error::CliError;

/// Provenance header embedded in every output: the command and all of its
/// resolved flags.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub args: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl RunConfig {
    pub fn new<A: Serialize>(command: &'static str, args: &A, timestamp: bool) -> Self {
        let timestamp = timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        RunConfig {
            tool: "vhshift",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args: serde_json::to_value(args).expect("arguments serialize"),
            timestamp,
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    fn compact(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// `body` with a `config` key placed first.
    pub fn json(&self, body: Value) -> String {
        let mut m = Map::new();
        m.insert("config".into(), self.to_value());
        match body {
            Value::Object(o) => m.extend(o),
            other => {
                m.insert("data".into(), other);
            }
        }
        to_json_string(&Value::Object(m))
    }

    pub fn dot(&self, body: &str) -> String {
        format!("// config: {}\n{body}", self.compact())
    }

    pub fn csv(&self, body: &str) -> String {
        format!("# config: {}\n{body}", self.compact())
    }

    pub fn svg(&self, body: &str) -> String {
        // `--` may not occur inside an XML comment.
        format!(
            "<!-- config: {} -->\n{body}",
            self.compact().replace("--", "-\\u002d")
        )
    }
}

/// Atomic write to `path`, or standard output.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            write_atomic(p, text.as_bytes()).map_err(|e| CliError::Io(p.display().to_string(), e))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io("<stdout>".into(), e))
        }
    }
}
