//! Serialization shared by the commands. Floats are written in shortest
//! round-trip form; struct field order is the output field order.

use crate::error::CliError;
use serde::Serialize;
use std::io::Write;

pub const RESULT_SCHEMA: &str = "channelpx.result.v1";

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// RFC 4180 records with LF line endings; `header` is always written.
pub fn write_csv<R: Serialize>(out: &mut dyn Write, header: &[&str], rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Parse(format!("{other:?}")),
    }
}
