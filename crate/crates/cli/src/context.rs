//! Input reading, provenance and atomic output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects what determines a run: the command, its parameters and the
/// digests of every input file. Paths are not part of the hash.
pub struct Context {
    command: &'static str,
    params: Value,
    inputs: Vec<String>,
}

impl Context {
    pub fn new(command: &'static str, params: &impl Serialize) -> Self {
        Self {
            command,
            params: serde_json::to_value(params).expect("parameters serialize"),
            inputs: Vec::new(),
        }
    }

    pub fn read(&mut self, path: &Path) -> CliResult<String> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(hex(&Sha256::digest(text.as_bytes())));
        Ok(text)
    }

    pub fn config_hash(&self) -> String {
        let canon = json!({"command": self.command, "params": self.params, "inputs": self.inputs});
        hex(&Sha256::digest(canon.to_string().as_bytes()))
    }

    fn meta(&self) -> Value {
        json!({
            "tool": "halo",
            "version": halo_core::VERSION,
            "command": self.command,
            "config_hash": self.config_hash(),
        })
    }

    fn provenance(&self) -> String {
        format!("halo {} {} config={}", halo_core::VERSION, self.command, self.config_hash())
    }

    /// JSON object with a `meta` block.
    pub fn json(&self, mut body: Value) -> String {
        body["meta"] = self.meta();
        let mut s = serde_json::to_string_pretty(&body).expect("json values serialize");
        s.push('\n');
        s
    }

    /// CSV with a leading `#` provenance line.
    pub fn csv(&self, body: &str) -> String {
        format!("# {}\n{body}", self.provenance())
    }

    /// SVG with a provenance comment after the root element.
    pub fn svg(&self, body: &str) -> String {
        match body.split_once('\n') {
            Some((head, rest)) => format!("{head}\n<!-- {} -->\n{rest}", self.provenance()),
            None => body.to_string(),
        }
    }
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// or to stdout when no path is given.
pub fn emit(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e));
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
