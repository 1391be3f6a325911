//! Run output directory layout: `<root>/<name>/{artifact.json, config.echo.toml,
//! logs/run.log, csv/*}`. Timestamps appear only in the log file so that
//! repeated runs with one seed produce byte-identical artifacts and CSVs.

use crate::CliError;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub struct RunDir {
    path: PathBuf,
}

impl RunDir {
    pub fn create(root: &Path, name: Option<String>) -> Result<Self, CliError> {
        let name = name.unwrap_or_else(|| format!("run-{}", unix_seconds()));
        let path = root.join(name);
        std::fs::create_dir_all(path.join("logs"))
            .and_then(|_| std::fs::create_dir_all(path.join("csv")))
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
        Ok(Self { path })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn csv_path(&self, file: &str) -> PathBuf {
        self.path.join("csv").join(file)
    }

    /// Copies the config text used for this run, for provenance.
    pub fn echo_config(&self, text: &str) -> Result<(), CliError> {
        std::fs::write(self.path.join("config.echo.toml"), text)
            .map_err(|e| CliError::Runtime(e.to_string()))
    }

    pub fn log(&self) -> Result<RunLog, CliError> {
        let file = File::create(self.path.join("logs").join("run.log"))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let mut log = RunLog {
            writer: BufWriter::new(file),
            started: Instant::now(),
        };
        log.line(&format!("started at unix {}", unix_seconds()))?;
        Ok(log)
    }
}

pub struct RunLog {
    writer: BufWriter<File>,
    started: Instant,
}

impl RunLog {
    pub fn line(&mut self, msg: &str) -> Result<(), CliError> {
        writeln!(
            self.writer,
            "[t+{:.3}s] {msg}",
            self.started.elapsed().as_secs_f64()
        )
        .and_then(|_| self.writer.flush())
        .map_err(|e| CliError::Runtime(e.to_string()))
    }
}

fn unix_seconds() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
