//! Deterministic, chunked Monte Carlo over an SNR grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_fading, sample_noise, NoiseDraw};
use crate::decoding::ml_decode;
use crate::strategies::Scheme;
use crate::Result;

/// Counts for one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub snr_db: f64,
    pub trials: u64,
    pub frame_errors: u64,
    pub outages: u64,
    /// Frame errors in trials that were not in outage.
    pub nonoutage_errors: u64,
    /// Trials in which some decoding relay got the index wrong.
    pub relay_errors: u64,
    pub seed: u64,
}

impl TrialBatch {
    fn empty(snr_db: f64, seed: u64) -> Self {
        Self {
            snr_db,
            trials: 0,
            frame_errors: 0,
            outages: 0,
            nonoutage_errors: 0,
            relay_errors: 0,
            seed,
        }
    }

    fn merge(&mut self, other: &Self) {
        self.trials += other.trials;
        self.frame_errors += other.frame_errors;
        self.outages += other.outages;
        self.nonoutage_errors += other.nonoutage_errors;
        self.relay_errors += other.relay_errors;
    }

    pub fn fer(&self) -> f64 {
        self.frame_errors as f64 / self.trials as f64
    }

    pub fn pout(&self) -> f64 {
        self.outages as f64 / self.trials as f64
    }

    pub fn relay_error_rate(&self) -> f64 {
        self.relay_errors as f64 / self.trials as f64
    }

    /// Standard error of the FER estimate.
    pub fn fer_sigma(&self) -> f64 {
        let p = self.fer();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn fer_wilson(&self) -> (f64, f64) {
        wilson_interval(self.frame_errors, self.trials, 1.96)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoder {
    Ml,
    /// Declares an error exactly when the channel is in outage.
    OutageOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloOptions {
    pub min_trials: u64,
    /// Stop once this many errors are seen (after `min_trials`).
    pub target_errors: u64,
    pub max_trials: u64,
    pub chunk_trials: u64,
    /// Chunks run between stopping checks.
    pub chunks_per_round: u64,
    pub noiseless: bool,
    pub decoder: Decoder,
}

impl MonteCarloOptions {
    /// Exactly `trials` trials per point.
    pub fn fixed(trials: u64) -> Self {
        Self {
            min_trials: trials,
            target_errors: 0,
            max_trials: trials,
            chunk_trials: 2_000,
            chunks_per_round: 16,
            noiseless: false,
            decoder: Decoder::Ml,
        }
    }

    pub fn adaptive(min_trials: u64, target_errors: u64, max_trials: u64) -> Self {
        Self {
            min_trials,
            target_errors,
            max_trials,
            ..Self::fixed(min_trials)
        }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of chunk `chunk` at grid point `point`.
pub fn chunk_seed(seed: u64, point: u64, chunk: u64) -> u64 {
    mix(mix(mix(seed) ^ point) ^ chunk)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn run_chunk(scheme: &Scheme, snr_db: f64, trials: u64, seed: u64, opts: &MonteCarloOptions) -> Result<TrialBatch> {
    let snr = db_to_linear(snr_db);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = scheme.n();
    let slots = scheme.max_schedule_length();
    let fading_law = scheme.config().fading;
    let count = scheme.index_count();
    let mut out = TrialBatch::empty(snr_db, seed);
    let zero = NoiseDraw::zero(n, slots);
    for _ in 0..trials {
        let fading = sample_fading(&fading_law, n, &mut rng);
        let index = rng.random_range(0..count);
        let drawn;
        let noise = if opts.noiseless {
            &zero
        } else {
            drawn = sample_noise(n, slots, &mut rng);
            &drawn
        };
        let outage = scheme.outage(&fading, snr)?;
        let error = match opts.decoder {
            Decoder::OutageOracle => outage,
            Decoder::Ml => {
                let t = scheme.run_frame(&fading, noise, snr, index)?;
                out.relay_errors += t.relay_error() as u64;
                ml_decode(&t.decode_problem()?)? != index
            }
        };
        out.trials += 1;
        out.outages += outage as u64;
        out.frame_errors += error as u64;
        out.nonoutage_errors += (error && !outage) as u64;
    }
    Ok(out)
}

/// Runs every grid point. Chunks carry seeds derived from `(seed, point,
/// chunk)` and stopping is checked only between rounds, so results do
/// not depend on the thread count.
pub fn monte_carlo(scheme: &Scheme, snr_grid_db: &[f64], opts: &MonteCarloOptions, seed: u64) -> Result<Vec<TrialBatch>> {
    if opts.max_trials == 0 || opts.chunk_trials == 0 || opts.chunks_per_round == 0 {
        return Err(crate::Error::InvalidParameter("trial counts must be positive".into()));
    }
    snr_grid_db
        .iter()
        .enumerate()
        .map(|(point, &snr_db)| run_point(scheme, point as u64, snr_db, opts, seed))
        .collect()
}

fn run_point(scheme: &Scheme, point: u64, snr_db: f64, opts: &MonteCarloOptions, seed: u64) -> Result<TrialBatch> {
    let mut total = TrialBatch::empty(snr_db, seed);
    let mut next_chunk = 0u64;
    loop {
        let chunks: Vec<(u64, u64)> = (next_chunk..next_chunk + opts.chunks_per_round)
            .map(|c| (c, c * opts.chunk_trials))
            .take_while(|&(_, start)| start < opts.max_trials)
            .collect();
        let results: Vec<TrialBatch> = chunks
            .par_iter()
            .map(|&(c, start)| {
                let trials = opts.chunk_trials.min(opts.max_trials - start);
                run_chunk(scheme, snr_db, trials, chunk_seed(seed, point, c), opts)
            })
            .collect::<Result<_>>()?;
        for r in &results {
            total.merge(r);
        }
        next_chunk += chunks.len() as u64;
        let enough = total.trials >= opts.min_trials && total.frame_errors >= opts.target_errors;
        if enough || total.trials >= opts.max_trials {
            return Ok(total);
        }
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{RelayRule, SchemeConfig, SchemeKind};

    fn noncoop(rate: f64) -> Scheme {
        Scheme::new(SchemeConfig {
            kind: SchemeKind::NonCooperative,
            users: 3,
            qam: 4,
            network_rate: rate,
            relay_rule: RelayRule::OutageExact,
            ..SchemeConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn noiseless_runs_have_no_errors() {
        let s = noncoop(2.0);
        let opts = MonteCarloOptions {
            noiseless: true,
            ..MonteCarloOptions::fixed(3_000)
        };
        let b = monte_carlo(&s, &[0.0, 10.0], &opts, 1).unwrap();
        assert!(b.iter().all(|x| x.frame_errors == 0 && x.trials == 3_000));
    }

    #[test]
    fn siso_outage_matches_closed_form() {
        let rate = 2.0;
        let s = noncoop(rate);
        let grid = [0.0, 5.0, 10.0, 15.0, 20.0];
        let b = monte_carlo(&s, &grid, &MonteCarloOptions { decoder: Decoder::OutageOracle, ..MonteCarloOptions::fixed(200_000) }, 5).unwrap();
        for x in &b {
            let snr = db_to_linear(x.snr_db);
            let p = 1.0 - (-(2f64.powf(rate) - 1.0) / snr).exp();
            let sigma = (p * (1.0 - p) / x.trials as f64).sqrt();
            assert!((x.pout() - p).abs() <= 3.0 * sigma, "{} dB: {} vs {p}", x.snr_db, x.pout());
            assert_eq!(x.frame_errors, x.outages);
        }
    }

    #[test]
    fn deterministic_and_chunking_independent_of_threads() {
        let s = noncoop(2.0);
        let opts = MonteCarloOptions::adaptive(4_000, 50, 40_000);
        let a = monte_carlo(&s, &[10.0, 20.0], &opts, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| monte_carlo(&s, &[10.0, 20.0], &opts, 9).unwrap());
        assert_eq!(a, b);
        let c = monte_carlo(&s, &[10.0, 20.0], &opts, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn adaptive_stops_on_errors_or_cap() {
        let s = noncoop(2.0);
        let opts = MonteCarloOptions {
            chunk_trials: 500,
            chunks_per_round: 2,
            ..MonteCarloOptions::adaptive(1_000, 100, 7_300)
        };
        let b = monte_carlo(&s, &[0.0, 40.0], &opts, 3).unwrap();
        assert!(b[0].frame_errors >= 100 && b[0].trials < 7_300);
        assert_eq!(b[1].trials, 7_300);
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04);
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }
}
