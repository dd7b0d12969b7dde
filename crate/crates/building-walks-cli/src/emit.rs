//! Report assembly and delivery.
//!
//! Each command produces one [`Output`]: a JSON body plus a CSV body. This
//! module wraps either in the common envelope — resolved config and library
//! version — and writes the chosen rendering to stdout or `--out`. All text is
//! locale-independent and byte-identical for identical configurations.

use std::io::Write;

use building_walks::report::{library_version, Csv};

use crate::config::{Format, Resolved};
use crate::CliError;

/// A finished command result, renderable as either format.
pub struct Output {
    /// Keys merged into the top level of the JSON envelope.
    pub json_body: serde_json::Map<String, serde_json::Value>,
    /// Extra `# key: value` comment lines above the CSV header.
    pub csv_comments: Vec<(String, String)>,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
    /// Format used when the config names none.
    pub default_format: Format,
}

impl Output {
    pub fn new(default_format: Format) -> Self {
        Output {
            json_body: serde_json::Map::new(),
            csv_comments: Vec::new(),
            csv_header: Vec::new(),
            csv_rows: Vec::new(),
            default_format,
        }
    }

    pub fn set<V: Into<serde_json::Value>>(&mut self, key: &str, value: V) {
        self.json_body.insert(key.to_string(), value.into());
    }

    /// Merge every top-level key of a serialized struct into the JSON body.
    pub fn merge_struct<T: serde::Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let v = serde_json::to_value(value)
            .map_err(|e| CliError::Io(format!("cannot serialize report: {e}")))?;
        match v {
            serde_json::Value::Object(map) => {
                self.json_body.extend(map);
                Ok(())
            }
            other => Err(CliError::Io(format!(
                "report body must be a JSON object, got {other}"
            ))),
        }
    }

    pub fn comment(&mut self, key: &str, value: impl Into<String>) {
        self.csv_comments.push((key.to_string(), value.into()));
    }

    /// The resolved config block, including the format actually rendered.
    fn config_json(&self, resolved: &Resolved) -> serde_json::Value {
        let mut config = resolved.as_json();
        if let serde_json::Value::Object(map) = &mut config {
            map.insert("format".into(), self.format(resolved).name().into());
        }
        config
    }

    fn render(&self, resolved: &Resolved) -> Result<String, CliError> {
        match self.format(resolved) {
            Format::Json => {
                let mut envelope = serde_json::Map::new();
                envelope.insert("command".into(), resolved.command.into());
                envelope.insert("library_version".into(), library_version().into());
                envelope.insert("config".into(), self.config_json(resolved));
                envelope.extend(self.json_body.clone());
                let text = serde_json::to_string_pretty(&serde_json::Value::Object(envelope))
                    .map_err(|e| CliError::Io(format!("cannot render JSON: {e}")))?;
                Ok(text + "\n")
            }
            Format::Csv => {
                let mut csv = Csv::new();
                csv.comment(&format!("command: {}", resolved.command));
                csv.comment(&format!("library-version: {}", library_version()));
                let config = serde_json::to_string(&self.config_json(resolved))
                    .map_err(|e| CliError::Io(format!("cannot render config: {e}")))?;
                csv.comment(&format!("config: {config}"));
                for (key, value) in &self.csv_comments {
                    csv.comment(&format!("{key}: {value}"));
                }
                csv.row(self.csv_header.iter().copied());
                for row in &self.csv_rows {
                    csv.row(row.iter().map(String::as_str));
                }
                Ok(csv.finish())
            }
        }
    }

    fn format(&self, resolved: &Resolved) -> Format {
        resolved.format.unwrap_or(self.default_format)
    }

    pub fn deliver(&self, resolved: &Resolved) -> Result<(), CliError> {
        let text = self.render(resolved)?;
        match &resolved.out {
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .and_then(|()| stdout.flush())
                    .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
            }
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        }
    }
}
