use std::fs;
use std::io::{self, Write};

use serde::Serialize;

use crate::commands::CliError;
use crate::{Globals, Units};

pub const SCHEMA_VERSION: u32 = 1;

/// JSON wrapper shared by every command.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    /// Convention the energy inputs were given in; outputs are always in
    /// natural units.
    pub units: &'static str,
    pub params: diracwell::WellParams,
    #[serde(flatten)]
    pub body: T,
}

pub fn json<T: Serialize>(
    command: &str,
    units: Units,
    params: &diracwell::WellParams,
    body: T,
) -> Result<String, CliError> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        units: units.label(),
        params: *params,
        body,
    };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(CliError::Serialize)?;
    text.push('\n');
    Ok(text)
}

/// 17 significant digits; empty for a missing value.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).map_err(CliError::Csv)?;
    for row in rows {
        writer.write_record(row).map_err(CliError::Csv)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn emit(globals: &Globals, rendered: &str) -> Result<(), CliError> {
    match &globals.output {
        Some(path) => fs::write(path, rendered).map_err(CliError::Io),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(CliError::Io)
        }
    }
}
