use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dirichlet_lab::config::{RunConfig, VERSION};
use dirichlet_lab::Error;
use serde::Serialize;

/// The JSON envelope of every report.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub pass: bool,
    pub result: &'a T,
}

pub fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Parses JSON with the file name, line and column in the error.
pub fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// A bare config, or the `config` field of a report.
pub fn load_config(path: &Path) -> Result<RunConfig, Error> {
    let value: serde_json::Value = parse(path)?;
    let inner = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Stdout, or a file.
pub struct Sink(Option<PathBuf>);

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Sink(out)
    }

    pub fn write(&self, bytes: &[u8]) -> Result<(), Error> {
        let io = |e: std::io::Error| Error::Input(format!("cannot write report: {e}"));
        match &self.0 {
            Some(path) => fs::write(path, bytes).map_err(io),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes).and_then(|_| out.flush()).map_err(io)
            }
        }
    }

    pub fn json<T: Serialize>(&self, command: &str, config: &RunConfig, pass: bool, result: &T) -> Result<(), Error> {
        let report = Report {
            tool: "dlab",
            version: VERSION,
            command,
            config,
            pass,
            result,
        };
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        self.write(text.as_bytes())
    }

    pub fn csv_rows<T: Serialize>(&self, rows: &[T]) -> Result<(), Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(|e| Error::Input(format!("csv: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Input(format!("csv: {e}")))?;
        self.write(&bytes)
    }
}
