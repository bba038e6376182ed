//! CSV sinks. Every file starts with `# unigate <version> config=<hash>`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use unigate_core::experiment::ScalingRow;
use unigate_core::qec::QecReport;

use crate::error::{CliError, Result};

pub const SCALING_COLUMNS: [&str; 8] = [
    "seed",
    "mode",
    "total_depth",
    "best_infidelity",
    "best_frobenius",
    "wall_seconds",
    "points",
    "index_mode",
];
pub const QEC_COLUMNS: [&str; 4] = ["protocol", "epsilon", "logical_error_probability", "seed"];
pub const MESH_COLUMNS: [&str; 5] = [
    "half_depth",
    "total_depth",
    "n_targets",
    "mesh_infidelity",
    "mesh_frobenius",
];

pub fn header_line(config_hash: &str) -> String {
    format!("# unigate {} config={config_hash}", env!("CARGO_PKG_VERSION"))
}

/// Row-at-a-time CSV writer; each row is flushed so a later failure leaves
/// every completed row on disk.
pub struct CsvSink {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvSink {
    pub fn create(path: &Path, config_hash: &str, columns: &[&str]) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        }
        let file = File::create(path).map_err(CliError::io(path))?;
        let mut out = BufWriter::new(file);
        writeln!(out, "{}", header_line(config_hash)).map_err(CliError::io(path))?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(columns).map_err(|e| csv_err(path, e))?;
        Ok(CsvSink {
            path: path.to_path_buf(),
            writer,
        })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| csv_err(&self.path, e))?;
        self.writer.flush().map_err(CliError::io(&self.path))
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

pub fn scaling_fields(r: &ScalingRow) -> [String; 8] {
    [
        r.gate_set_seed.to_string(),
        r.mode.as_str().to_string(),
        r.total_depth.to_string(),
        r.best_infidelity.to_string(),
        r.best_frobenius.to_string(),
        format!("{:.6}", r.wall_seconds),
        r.points.to_string(),
        r.index_mode.as_str().to_string(),
    ]
}

pub fn qec_fields(r: &QecReport) -> [String; 4] {
    [
        r.protocol.as_str().to_string(),
        r.epsilon.to_string(),
        r.logical_error_probability.to_string(),
        r.seed.to_string(),
    ]
}

/// Writes a JSON document, creating parent directories.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    std::fs::write(path, text + "\n").map_err(CliError::io(path))
}
