use crate::config::{Format, Model, RunConfig, SweepVar};
use crate::engine;
use crate::error::CliError;
use crate::output::{write_csv, write_json, RESULT_SCHEMA};
use channelpx_core::{Method, PriceResult};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

#[derive(Serialize)]
struct Point {
    value: f64,
    price: f64,
    method: Method,
}

#[derive(Serialize)]
struct CurveOutput<'a> {
    schema: &'static str,
    sweep_var: SweepVar,
    model: Model,
    inputs: &'a RunConfig,
    points: Vec<Point>,
}

/// The config priced at one sweep value.
pub fn at(cfg: &RunConfig, var: SweepVar, value: f64) -> RunConfig {
    let mut c = cfg.clone();
    match var {
        SweepVar::Spot => c.spot = value,
        SweepVar::Strike => c.strike = value,
        SweepVar::Tau => c.tau = value,
    }
    c
}

/// Prices at every sweep value, in sweep order.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<(f64, PriceResult)>, CliError> {
    let spec = cfg.curve.expect("curve config carries a sweep");
    let priced: Vec<_> = spec
        .values()
        .into_par_iter()
        .map(|v| engine::price(&at(cfg, spec.var, v)).map(|r| (v, r)))
        .collect();
    priced.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = sweep(cfg)?;
    let var = cfg.curve.expect("curve config carries a sweep").var;
    match cfg.format {
        Format::Csv => {
            let records: Vec<_> = rows.iter().map(|(v, r)| (*v, r.price, r.method.as_str())).collect();
            write_csv(out, &["sweep_var", "price", "method"], &records)
        }
        Format::Json => write_json(
            out,
            &CurveOutput {
                schema: RESULT_SCHEMA,
                sweep_var: var,
                model: cfg.model,
                inputs: cfg,
                points: rows
                    .into_iter()
                    .map(|(value, r)| Point {
                        value,
                        price: r.price,
                        method: r.method,
                    })
                    .collect(),
            },
        ),
    }
}
