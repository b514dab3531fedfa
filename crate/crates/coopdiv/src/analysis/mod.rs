//! Exact D-MG curves, Monte Carlo estimation and slope regression.

mod dmg;
mod montecarlo;
mod report;

pub use dmg::{
    dmg_curve, optimal_via_draf, optimal_via_ndraf, optimal_via_ndsdaf, r_coop, snr_coop, to_f64, CurveFamily,
    DmgCurve, Q,
};
pub use montecarlo::{
    chunk_seed, db_to_linear, monte_carlo, wilson_interval, Decoder, MonteCarloOptions, TrialBatch,
};
pub use report::{
    diversity_slope, error_vs_outage_ratio, log_log_slope, write_batches_csv, OutageCoupling, CSV_COLUMNS,
    DEFAULT_SLOPE_WINDOW_DB, MIN_SLOPE_ERRORS, MIN_SLOPE_POINTS,
};
