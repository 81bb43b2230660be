//! CSV assembly: one metadata comment line, a header, then rows.
//! All formatting is deterministic so identical configs produce
//! byte-identical files.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::path::PathBuf;

use crate::CliError;

pub struct Csv {
    buffer: String,
}

impl Csv {
    /// Starts a document with the `# linkwait v… config=… key=value…`
    /// metadata line. The config hash covers the full canonical config
    /// string, so any parameter change shows up in the artifact.
    pub fn new(config: &str, extras: &[(&str, String)]) -> Self {
        let mut hasher = DefaultHasher::new();
        config.hash(&mut hasher);
        let mut buffer = format!(
            "# linkwait v{} config={:016x} {config}",
            env!("CARGO_PKG_VERSION"),
            hasher.finish()
        );
        for (key, value) in extras {
            buffer.push_str(&format!(" {key}={value}"));
        }
        buffer.push('\n');
        Csv { buffer }
    }

    pub fn header(&mut self, columns: &[&str]) {
        self.buffer.push_str(&columns.join(","));
        self.buffer.push('\n');
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn write(self, out: &Option<PathBuf>) -> Result<(), CliError> {
        match out {
            Some(path) => std::fs::write(path, self.buffer).map_err(CliError::Io),
            None => std::io::stdout()
                .write_all(self.buffer.as_bytes())
                .map_err(CliError::Io),
        }
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v}")
}
