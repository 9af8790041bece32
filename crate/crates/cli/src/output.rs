use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

/// A finished run: the JSON document and its flat CSV projection.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    /// Header first, then one record per row.
    pub table: Vec<Vec<String>>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.json).map_err(|e| CliError::validation(e.to_string()))?;
                text.push('\n');
                Ok(text)
            }
            Format::Csv => {
                let mut writer = csv::Writer::from_writer(Vec::new());
                for record in &self.table {
                    writer.write_record(record).map_err(|e| CliError::validation(e.to_string()))?;
                }
                let bytes = writer.into_inner().map_err(|e| CliError::validation(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| CliError::validation(e.to_string()))
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format)?;
        match out {
            Some(path) => fs::write(path, text).map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::validation(e.to_string())),
        }
    }
}

/// Shortest round-trip text for a float, matching the JSON output.
pub fn float_text(v: f64) -> String {
    match serde_json::Number::from_f64(v) {
        Some(n) => n.to_string(),
        None => v.to_string(),
    }
}
