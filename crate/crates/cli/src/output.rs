use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::commands::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Text,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Text => "text",
        }
    }
}

/// Pick the requested format if the command supports it.
pub fn choose(requested: Option<Format>, supported: &[Format]) -> Result<Format, Failure> {
    match requested {
        None => Ok(supported[0]),
        Some(f) if supported.contains(&f) => Ok(f),
        Some(f) => Err(Failure::Usage(format!(
            "format {} is not available here (use one of: {})",
            f.name(),
            supported.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

pub fn json<T: Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut out = serde_json::to_vec(v).map_err(|e| Failure::Domain(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Domain(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Failure::Domain(e.to_string()))
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, bytes)
            .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| Failure::Domain(e.to_string())),
    }
}
