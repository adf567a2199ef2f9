//! `history.csv`: one row per solver step `(L, k)`.

use std::io::{Read, Write};

use afem_core::adaptivity::{loglog_slope, AfemRecord};
use serde::Deserialize;

use crate::CliResult;

pub const BASE_COLUMNS: [&str; 8] = ["L", "k", "ndof", "nelem", "eta", "zeta", "cum_cost", "wall_ms"];
pub const VALIDATION_COLUMNS: [&str; 2] = ["alg_err", "contraction"];

pub fn write_history(records: &[AfemRecord], validation: bool, out: impl Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = BASE_COLUMNS.to_vec();
    if validation {
        header.extend(VALIDATION_COLUMNS);
    }
    w.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let mut row = vec![
            r.level.to_string(),
            r.k.to_string(),
            r.ndof.to_string(),
            r.nelem.to_string(),
            r.eta.to_string(),
            r.zeta.to_string(),
            r.cum_cost.to_string(),
            format!("{:.3}", r.wall_ms),
        ];
        if validation {
            row.push(opt(r.alg_err));
            row.push(opt(r.contraction));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct HistoryRow {
    #[serde(rename = "L")]
    pub level: usize,
    pub k: usize,
    pub ndof: usize,
    pub nelem: usize,
    pub eta: f64,
    pub zeta: f64,
    pub cum_cost: u64,
    pub wall_ms: f64,
    #[serde(default)]
    pub alg_err: Option<f64>,
    #[serde(default)]
    pub contraction: Option<f64>,
}

pub fn read_history(input: impl Read) -> CliResult<Vec<HistoryRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<HistoryRow>, _>>()?)
}

/// Last row of every level.
pub fn final_rows(rows: &[HistoryRow]) -> Vec<&HistoryRow> {
    let mut out: Vec<&HistoryRow> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some(last) if last.level == r.level => *last = r,
            _ => out.push(r),
        }
    }
    out
}

/// Slopes of `η` over ndof and over cumulative cost, skipping the first
/// `skip` levels and then every level below `min_ndof` free dofs.
pub fn rates(rows: &[HistoryRow], skip: usize, min_ndof: usize) -> CliResult<(f64, f64)> {
    let fin: Vec<&HistoryRow> = final_rows(rows).into_iter().skip(skip).filter(|r| r.ndof >= min_ndof).collect();
    let by_ndof: Vec<(f64, f64)> = fin.iter().map(|r| (r.ndof as f64, r.eta)).collect();
    let by_cost: Vec<(f64, f64)> = fin.iter().map(|r| (r.cum_cost as f64, r.eta)).collect();
    Ok((loglog_slope(&by_ndof)?, loglog_slope(&by_cost)?))
}
