//! Files written by the commands: CSV tables, JSON run records, and the
//! atomic write that every file goes through.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use gvlab_core::BigFloat;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::Result;

/// Shortest text that parses back to the same `f64`. Plain notation in the
/// usual range, exponent notation outside it.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Enough decimal digits to round-trip a float of `bits` bits.
pub fn fmt_big(x: &BigFloat) -> String {
    let digits = (x.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
    x.to_sci_string(digits)
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    // temp files are created owner-only
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// A CSV table held in memory until it is written.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Table { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn into_bytes(self) -> Result<Vec<u8>> {
        self.writer.into_inner().map_err(|e| e.into_error().into())
    }

    pub fn write(self, path: &Path) -> Result<()> {
        write_atomic(path, &self.into_bytes()?)
    }
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

/// `{config, results, residuals, timing, version}`.
#[derive(Debug, Serialize)]
pub struct RunRecord<'a> {
    pub config: &'a RunConfig,
    pub results: Value,
    pub residuals: Value,
    pub timing: Timing,
    pub version: &'static str,
}

impl<'a> RunRecord<'a> {
    pub fn new(config: &'a RunConfig, results: Value, residuals: Value, elapsed: Duration) -> Self {
        RunRecord {
            config,
            results,
            residuals,
            timing: Timing {
                elapsed_ms: elapsed.as_millis(),
            },
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}
