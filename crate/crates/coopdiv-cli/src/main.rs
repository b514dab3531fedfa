//! `coopdiv`: build and check codes, run relay-network Monte Carlo sweeps
//! and export diversity-multiplexing curves.

mod codes;
mod config;
mod dmg;
mod report;
mod simulate;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coopdiv::analysis::Decoder;
use coopdiv::strategies::{CodeChoice, RelayRule, SchemeKind};

use crate::config::{ExperimentConfig, OutputFormat, SnrGrid};

#[derive(Parser)]
#[command(name = "coopdiv", version, about = "Cooperative diversity simulator for relay networks")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "COOPDIV_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, check or measure a space-time code.
    Codes {
        #[command(subcommand)]
        action: CodesAction,
    },
    /// Frame error rate sweep with the ML decoder.
    Simulate(ExperimentArgs),
    /// Outage probability sweep (errors declared exactly on outage).
    Outage(ExperimentArgs),
    /// Breakpoints of a diversity-multiplexing curve.
    Dmg(DmgArgs),
    /// Run the property suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum CodesAction {
    /// Print a JSON descriptor.
    Build(codes::CodeArgs),
    /// Unitarity, non-vanishing determinant and cardinality checks.
    Verify(codes::CodeArgs),
    /// Minimum determinant, product distance and eigenvalue as JSON.
    Metrics(codes::CodeArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// Nodes in the network: source, relays and destination.
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    code: Option<CodeChoice>,
    #[arg(long)]
    qam: Option<usize>,
    /// Network rate in bits per network channel use.
    #[arg(long)]
    rate_bpncu: Option<f64>,
    /// Relay decoding threshold; selects the delta rule.
    #[arg(long, conflicts_with = "outage_rule")]
    delta: Option<f64>,
    /// Relays decode exactly when their source link is not in outage.
    #[arg(long)]
    outage_rule: bool,
    /// Cooperate at every SNR instead of only below multiplexing gain 1/2.
    #[arg(long)]
    always_cooperate: bool,
    /// Grid in dB as `start:stop:step`.
    #[arg(long)]
    snr_db: Option<SnrGrid>,
    /// Trials per point, or the minimum with `--target-errors`.
    #[arg(long)]
    trials: Option<u64>,
    /// Keep adding trials until this many errors per point.
    #[arg(long)]
    target_errors: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write the merged configuration to this file and exit.
    #[arg(long)]
    save_config: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig, String> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let s = &mut c.scheme;
        if let Some(v) = self.scheme {
            s.kind = v;
        }
        if let Some(v) = self.users {
            s.users = v;
        }
        if let Some(v) = self.code {
            s.code = v;
        }
        if let Some(v) = self.qam {
            s.qam = v;
        }
        if let Some(v) = self.rate_bpncu {
            s.network_rate = v;
        }
        if let Some(delta) = self.delta {
            s.relay_rule = RelayRule::DeltaThreshold { delta };
        }
        if self.outage_rule {
            s.relay_rule = RelayRule::OutageExact;
        }
        if self.always_cooperate {
            s.skip_cooperation_above_r_half = false;
        }
        if let Some(v) = self.snr_db {
            c.snr_grid = v;
        }
        if let Some(v) = self.trials {
            c.trials = v;
        }
        if self.target_errors.is_some() {
            c.target_errors = self.target_errors;
        }
        if self.max_trials.is_some() {
            c.max_trials = self.max_trials;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        if let Some(v) = self.format {
            c.format = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct DmgArgs {
    /// Curve as `name[:key=value,...]`, e.g. `optimal:n=2` or `pep-random:n=3,k=1/2`.
    family: String,
    /// Second curve; reports where the two cross.
    #[arg(long)]
    compare: Option<String>,
    /// Rate in bits for the cooperation SNR threshold.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Samples for each statistical check.
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    /// Negative control: run the unitarity check on a corrupted generator.
    #[arg(long, hide = true)]
    corrupt_generator: bool,
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json value serializes"));
}

fn run(cli: Cli) -> Result<bool, String> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    match cli.command {
        Command::Codes { action } => match action {
            CodesAction::Build(a) => print_json(&codes::build(&a).map_err(|e| e.to_string())?),
            CodesAction::Metrics(a) => print_json(&codes::metrics(&a).map_err(|e| e.to_string())?),
            CodesAction::Verify(a) => {
                let t = codes::verify(&a).map_err(|e| e.to_string())?;
                print!("{}", t.render());
                return Ok(t.all_pass());
            }
        },
        Command::Simulate(a) | Command::Outage(a) if a.save_config.is_some() => {
            let c = a.resolve()?;
            let path = a.save_config.as_ref().expect("checked above");
            let json = serde_json::to_string_pretty(&c).map_err(|e| e.to_string())?;
            std::fs::write(path, json + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
        }
        Command::Simulate(a) => {
            let c = a.resolve()?;
            let batches = simulate::run(&c, Decoder::Ml)?;
            simulate::emit(&c, "simulate", &batches)?;
        }
        Command::Outage(a) => {
            let c = a.resolve()?;
            let batches = simulate::run(&c, Decoder::OutageOracle)?;
            simulate::emit(&c, "outage", &batches)?;
            simulate::outage_summary(&c, &batches);
        }
        Command::Dmg(a) => {
            let s = dmg::render(&a.family, a.compare.as_deref(), a.rate)?;
            match &a.out {
                Some(p) => std::fs::write(p, s).map_err(|e| format!("{}: {e}", p.display()))?,
                None => print!("{s}"),
            }
        }
        Command::Verify(a) => {
            let t = verify::run(&verify::VerifyOptions {
                samples: a.samples,
                corrupt_generator: a.corrupt_generator,
            });
            print!("{}", t.render());
            return Ok(t.all_pass());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
