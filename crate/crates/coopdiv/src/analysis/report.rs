//! Slopes, outage coupling and tabular output of Monte Carlo batches.

use std::io::Write;

use serde::Serialize;

use super::montecarlo::TrialBatch;
use crate::{Error, Result};

pub const MIN_SLOPE_POINTS: usize = 3;
pub const MIN_SLOPE_ERRORS: u64 = 10;
pub const DEFAULT_SLOPE_WINDOW_DB: f64 = 15.0;

/// Least-squares slope of `−log10 y` against `log10 snr`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|(db, _)| db / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|(_, p)| -p.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// FER slope over the points within `window_db` of the highest SNR.
/// Every point in the window must carry enough errors.
pub fn diversity_slope(batches: &[TrialBatch], window_db: f64) -> Result<f64> {
    let top = batches.iter().map(|b| b.snr_db).fold(f64::NEG_INFINITY, f64::max);
    let window: Vec<&TrialBatch> = batches.iter().filter(|b| b.snr_db >= top - window_db - 1e-9).collect();
    let found = window.iter().filter(|b| b.frame_errors >= MIN_SLOPE_ERRORS).count();
    if window.len() < MIN_SLOPE_POINTS || found < window.len() {
        return Err(Error::InsufficientErrors {
            needed: MIN_SLOPE_POINTS,
            min_errors: MIN_SLOPE_ERRORS,
            found,
        });
    }
    Ok(log_log_slope(&window.iter().map(|b| (b.snr_db, b.fer())).collect::<Vec<_>>()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageCoupling {
    pub snr_db: f64,
    /// `frame_errors / outages`; `None` without outages.
    pub error_outage_ratio: Option<f64>,
    /// Share of frame errors that happened outside outage.
    pub nonoutage_error_fraction: Option<f64>,
    /// `P(error | no outage)`.
    pub error_given_no_outage: Option<f64>,
    /// Standard error of `error_given_no_outage`.
    pub error_given_no_outage_sigma: Option<f64>,
}

pub fn error_vs_outage_ratio(batches: &[TrialBatch]) -> Vec<OutageCoupling> {
    batches
        .iter()
        .map(|b| {
            let clear = b.trials - b.outages;
            let cond = (clear > 0).then(|| b.nonoutage_errors as f64 / clear as f64);
            OutageCoupling {
                snr_db: b.snr_db,
                error_outage_ratio: (b.outages > 0).then(|| b.frame_errors as f64 / b.outages as f64),
                nonoutage_error_fraction: (b.frame_errors > 0)
                    .then(|| b.nonoutage_errors as f64 / b.frame_errors as f64),
                error_given_no_outage: cond,
                error_given_no_outage_sigma: cond.map(|p| (p * (1.0 - p) / clear as f64).sqrt()),
            }
        })
        .collect()
}

pub const CSV_COLUMNS: [&str; 8] = ["snr_db", "trials", "frame_errors", "fer", "outages", "pout", "wilson_lo", "wilson_hi"];

/// One `#` comment line, then the batch table.
pub fn write_batches_csv<W: Write>(mut out: W, header: &str, batches: &[TrialBatch]) -> Result<()> {
    writeln!(out, "# {header}").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for b in batches {
        let (lo, hi) = b.fer_wilson();
        w.write_record([
            b.snr_db.to_string(),
            b.trials.to_string(),
            b.frame_errors.to_string(),
            b.fer().to_string(),
            b.outages.to_string(),
            b.pout().to_string(),
            lo.to_string(),
            hi.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
