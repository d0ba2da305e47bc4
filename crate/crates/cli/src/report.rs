//! Output tables and the JSON metadata sidecar.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub fn create_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

/// A CSV table written row by row.
pub struct Table {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl Table {
    pub fn create(path: PathBuf, header: &[&str]) -> CliResult<Self> {
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut table = Self { writer: csv::Writer::from_writer(file), path };
        table.row(header)?;
        Ok(table)
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let path = &self.path;
        self.writer.write_record(fields).map_err(|e| CliError::csv(path, e))
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

/// Shortest round-trip form, in exponent notation for extreme magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Everything needed to reproduce a run. Contains no timestamps or host
/// details so identical runs produce identical files.
#[derive(Debug, Serialize)]
pub struct RunMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub parameters: BTreeMap<&'static str, Value>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub diagnostics: BTreeMap<&'static str, Value>,
    pub warnings: Vec<String>,
}

impl RunMetadata {
    pub fn new(command: &'static str) -> Self {
        Self {
            tool: "cumuldyn",
            version: env!("CARGO_PKG_VERSION"),
            command,
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            diagnostics: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &'static str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key, serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn diag(&mut self, key: &'static str, value: impl Serialize) -> &mut Self {
        self.diagnostics.insert(key, serde_json::to_value(value).expect("serializable diagnostic"));
        self
    }

    pub fn input(&mut self, path: &Path) -> &mut Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(&mut self, name: impl Into<String>) -> &mut Self {
        self.outputs.push(name.into());
        self
    }

    /// Records a warning and echoes it to stderr.
    pub fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join("metadata.json");
        let mut text = serde_json::to_string_pretty(self).expect("metadata serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}
