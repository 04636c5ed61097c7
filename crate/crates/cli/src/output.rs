//! Artifact files. Every file carries the resolved configuration; CSV
//! files add one `# generated_unix` line, JSON files carry no timestamp.

use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use scs_core::export::write_comment_header;
use serde_json::{Map, Value};

use crate::config::Config;
use crate::error::CliError;

pub const TIMESTAMP_KEY: &str = "generated_unix";

pub struct Artifacts {
    dir: PathBuf,
    header: Vec<(String, String)>,
    config: Value,
    written: Vec<PathBuf>,
}

fn write_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

impl Artifacts {
    pub fn new(cfg: &Config) -> Self {
        Self {
            dir: cfg.output_path.clone(),
            header: cfg.header(),
            config: cfg.to_json(),
            written: Vec::new(),
        }
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::create_dir_all(&self.dir).map_err(|e| write_err(&self.dir, e))?;
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| write_err(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// Renders a CSV body below the config header and writes it in one go.
    pub fn csv<F>(&mut self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let mut buf = Vec::new();
        let mut header = self.header.clone();
        header.push((TIMESTAMP_KEY.to_string(), stamp.to_string()));
        write_comment_header(&mut buf, &header).expect("writing to memory");
        body(&mut buf).expect("writing to memory");
        self.put(name, &buf)
    }

    /// Writes `{"config": …, <fields>}`.
    pub fn json(&mut self, name: &str, fields: Map<String, Value>) -> Result<(), CliError> {
        let mut m = Map::new();
        m.insert("config".into(), self.config.clone());
        m.extend(fields);
        let mut text = serde_json::to_string_pretty(&Value::Object(m)).expect("JSON values serialise");
        text.push('\n');
        self.put(name, text.as_bytes())
    }
}

/// Lines of a CSV file that are data, not `#` comments.
pub fn data_rows(text: &str) -> impl Iterator<Item = &str> {
    text.lines().filter(|l| !l.starts_with('#'))
}
