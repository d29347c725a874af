//! CSV and JSON writers. Each CSV gets a `.meta.json` sidecar; JSON output
//! carries the same metadata inline.

use super::{CliError, RunConfig};
use crate::mc::McConfig;
use crate::process::ProcessSpec;
use crate::specfun::SeriesConfig;
use serde::Serialize;
use serde_json::Value;
use std::path::{Path, PathBuf};

/// Everything needed to rerun the command that produced a file.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub label: &'static str,
    pub process: ProcessSpec,
    pub seed: Option<u64>,
    pub mc: Option<McConfig>,
    pub tolerances: SeriesConfig,
    pub params: Value,
}

impl Meta {
    pub fn new(command: &'static str, cfg: &RunConfig, mc: Option<&McConfig>, params: Value) -> Self {
        Meta {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            label: cfg.process.label(),
            process: cfg.process.clone(),
            seed: mc.map(|m| m.seed),
            mc: mc.copied(),
            tolerances: cfg.eval,
            params,
        }
    }
}

pub struct Writer<'a> {
    dir: PathBuf,
    stem: &'static str,
    meta: &'a Meta,
    csv: bool,
    json: bool,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    pub fn new(cfg: &RunConfig, stem: &'static str, meta: &'a Meta) -> Result<Self, CliError> {
        std::fs::create_dir_all(&cfg.out_dir)?;
        Ok(Writer {
            dir: cfg.out_dir.clone(),
            stem,
            meta,
            csv: cfg.output.csv(),
            json: cfg.output.json(),
            files: Vec::new(),
        })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    pub fn csv<R, I>(&mut self, header: &[&str], rows: R) -> Result<(), CliError>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = String>,
    {
        if !self.csv {
            return Ok(());
        }
        let path = self.path(".csv");
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        self.files.push(path);
        let sidecar = self.path(".meta.json");
        write_json(&sidecar, &serde_json::to_value(self.meta).expect("metadata serializes"))?;
        self.files.push(sidecar);
        Ok(())
    }

    pub fn json(&mut self, data: Value) -> Result<(), CliError> {
        if !self.json {
            return Ok(());
        }
        let path = self.path(".json");
        let mut doc = serde_json::to_value(self.meta).expect("metadata serializes");
        doc["data"] = data;
        write_json(&path, &doc)?;
        self.files.push(path);
        Ok(())
    }

    pub fn finish(self) -> Result<Vec<PathBuf>, CliError> {
        Ok(self.files)
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::Failed(format!("json: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Failed(format!("csv: {e}"))
}
