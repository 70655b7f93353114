use crate::config::{Format, Model, RunConfig};
use crate::engine;
use crate::error::CliError;
use crate::output::{write_csv, write_json, RESULT_SCHEMA};
use channelpx_core::{Diagnostics, Method};
use serde::Serialize;
use std::io::Write;

#[derive(Serialize)]
struct PriceOutput<'a> {
    schema: &'static str,
    price: f64,
    method: Method,
    model: Model,
    inputs: &'a RunConfig,
    diagnostics: &'a Diagnostics,
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let r = engine::price(cfg)?;
    match cfg.format {
        Format::Json => write_json(
            out,
            &PriceOutput {
                schema: RESULT_SCHEMA,
                price: r.price,
                method: r.method,
                model: cfg.model,
                inputs: cfg,
                diagnostics: &r.diag,
            },
        ),
        Format::Csv => write_csv(out, &["price", "method"], &[(r.price, r.method.as_str())]),
    }
}
