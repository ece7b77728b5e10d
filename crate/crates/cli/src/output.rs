use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::CliError;

/// Output directory of one run.
pub struct Out {
    dir: PathBuf,
    command: &'static str,
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

impl Out {
    pub fn new(dir: &Path, command: &'static str) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        Ok(Out {
            dir: dir.to_path_buf(),
            command,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).map_err(|e| io(&path, e))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| io(&path, e))
    }

    /// One header line carrying the timestamp, then one record per line.
    pub fn jsonl<T: Serialize>(&self, name: &str, records: &[T]) -> Result<(), CliError> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| io(&path, e))?;
        let mut w = BufWriter::new(file);
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        let header = serde_json::json!({
            "header": {
                "command": self.command,
                "version": env!("CARGO_PKG_VERSION"),
                "created_unix_ms": created,
                "records": records.len(),
            }
        });
        writeln!(w, "{header}").map_err(|e| io(&path, e))?;
        for r in records {
            serde_json::to_writer(&mut w, r).map_err(|e| io(&path, e))?;
            writeln!(w).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))
    }

    pub fn csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e))?;
        for r in rows {
            w.serialize(r).map_err(|e| io(&path, e))?;
        }
        w.flush().map_err(|e| io(&path, e))
    }

    pub fn text(&self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.path(name);
        fs::write(&path, body).map_err(|e| io(&path, e))
    }

    pub fn resolved<T: Serialize>(&self, config: &T) -> Result<(), CliError> {
        self.json("resolved_config.json", config)
    }
}
