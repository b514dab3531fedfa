use std::fs::File;
use std::io::{self, BufWriter, Write};

use coopdiv::analysis::{
    db_to_linear, diversity_slope, error_vs_outage_ratio, monte_carlo, write_batches_csv, Decoder,
    MonteCarloOptions, OutageCoupling, TrialBatch, DEFAULT_SLOPE_WINDOW_DB,
};
use coopdiv::strategies::{Scheme, SchemeKind};
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat};

#[derive(Serialize)]
struct JsonReport<'a> {
    seed: u64,
    config_sha256: String,
    config: &'a ExperimentConfig,
    batches: &'a [TrialBatch],
    coupling: Vec<OutageCoupling>,
    slope: Option<f64>,
}

pub fn options(c: &ExperimentConfig, decoder: Decoder) -> MonteCarloOptions {
    let base = match c.target_errors {
        Some(target) => MonteCarloOptions::adaptive(c.trials, target, c.max_trials.unwrap_or(c.trials)),
        None => MonteCarloOptions::fixed(c.trials),
    };
    MonteCarloOptions { decoder, ..base }
}

pub fn run(c: &ExperimentConfig, decoder: Decoder) -> Result<Vec<TrialBatch>, String> {
    c.validate()?;
    let scheme = Scheme::new(c.scheme.clone()).map_err(|e| e.to_string())?;
    let grid = c.snr_grid.points()?;
    monte_carlo(&scheme, &grid, &options(c, decoder), c.seed).map_err(|e| e.to_string())
}

fn header(c: &ExperimentConfig, command: &str) -> String {
    format!("coopdiv {command} seed={} config_sha256={}", c.seed, c.hash())
}

/// Writes the batches to `--out` or stdout and a summary to stderr.
pub fn emit(c: &ExperimentConfig, command: &str, batches: &[TrialBatch]) -> Result<(), String> {
    let slope = diversity_slope(batches, DEFAULT_SLOPE_WINDOW_DB);
    let sink: Box<dyn Write> = match &c.out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    write_report(sink, c, command, batches, slope.as_ref().ok().copied())?;

    let mut err = io::stderr().lock();
    let _ = writeln!(err, "{}", header(c, command));
    for b in batches {
        let (lo, hi) = b.fer_wilson();
        let _ = writeln!(
            err,
            "  {:>6.2} dB  trials {:>9}  fer {:.3e} [{:.2e}, {:.2e}]  pout {:.3e}",
            b.snr_db,
            b.trials,
            b.fer(),
            lo,
            hi,
            b.pout()
        );
    }
    let _ = match slope {
        Ok(s) => writeln!(err, "diversity slope (top {DEFAULT_SLOPE_WINDOW_DB} dB): {s:.3}"),
        Err(e) => writeln!(err, "diversity slope: {e}"),
    };
    Ok(())
}

fn write_report<W: Write>(
    mut w: W,
    c: &ExperimentConfig,
    command: &str,
    batches: &[TrialBatch],
    slope: Option<f64>,
) -> Result<(), String> {
    match c.format {
        OutputFormat::Csv => write_batches_csv(&mut w, &header(c, command), batches).map_err(|e| e.to_string())?,
        OutputFormat::Json => {
            let report = JsonReport {
                seed: c.seed,
                config_sha256: c.hash(),
                config: c,
                batches,
                coupling: error_vs_outage_ratio(batches),
                slope,
            };
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| e.to_string())?;
            writeln!(w).map_err(|e| e.to_string())?;
        }
    }
    w.flush().map_err(|e| e.to_string())
}

/// Closed-form SISO outage `1 − exp(−(2^R − 1)/snr)` for the direct link.
pub fn siso_outage(rate: f64, snr_db: f64) -> f64 {
    1.0 - (-(2f64.powf(rate) - 1.0) / db_to_linear(snr_db)).exp()
}

pub fn outage_summary(c: &ExperimentConfig, batches: &[TrialBatch]) {
    if c.scheme.kind != SchemeKind::NonCooperative {
        return;
    }
    let mut err = io::stderr().lock();
    for b in batches {
        let p = siso_outage(c.scheme.network_rate, b.snr_db);
        let sigma = (p * (1.0 - p) / b.trials as f64).sqrt();
        let _ = writeln!(
            err,
            "  {:>6.2} dB  closed form {p:.4e}  empirical {:.4e}  ({:+.2} sigma)",
            b.snr_db,
            b.pout(),
            (b.pout() - p) / sigma
        );
    }
}
