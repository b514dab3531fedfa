use std::path::{Path, PathBuf};

use coopdiv::strategies::SchemeConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Inclusive dB grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if !(self.step > 0.0) || !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(format!("empty SNR grid {}:{}:{}", self.start, self.stop, self.step));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

impl std::str::FromStr for SnrGrid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad SNR grid `{s}`: {e}")))
            .collect::<Result<_, _>>()?;
        let grid = match parts[..] {
            [x] => SnrGrid { start: x, stop: x, step: 1.0 },
            [a, b] => SnrGrid { start: a, stop: b, step: 1.0 },
            [a, b, c] => SnrGrid { start: a, stop: b, step: c },
            _ => return Err(format!("bad SNR grid `{s}`, expected start:stop:step")),
        };
        grid.points()?;
        Ok(grid)
    }
}

/// One experiment as stored on disk: the scheme fields at top level plus
/// the sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub scheme: SchemeConfig,
    pub snr_grid: SnrGrid,
    /// Fixed trial count, or the minimum when `target_errors` is set.
    pub trials: u64,
    pub target_errors: Option<u64>,
    pub max_trials: Option<u64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeConfig::default(),
            snr_grid: SnrGrid { start: 10.0, stop: 30.0, step: 5.0 },
            trials: 10_000,
            target_errors: None,
            max_trials: None,
            seed: 1,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        self.snr_grid.points()?;
        if self.trials == 0 {
            return Err("trials must be positive".into());
        }
        if let Some(max) = self.max_trials {
            if max < self.trials {
                return Err(format!("max_trials {max} is below trials {}", self.trials));
            }
        }
        self.scheme.validate().map_err(|e| e.to_string())
    }

    /// SHA-256 of the canonical JSON with the output path cleared, so the
    /// same experiment hashes the same wherever it is written.
    pub fn hash(&self) -> String {
        let canonical = Self { out: None, ..self.clone() };
        let json = serde_json::to_string(&canonical).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use coopdiv::strategies::{CodeChoice, RelayRule, SchemeKind};

    use super::*;

    #[test]
    fn round_trip() {
        let c = ExperimentConfig {
            scheme: SchemeConfig {
                kind: SchemeKind::Draf,
                qam: 4,
                network_rate: 2.0,
                code: CodeChoice::FullCda,
                relay_rule: RelayRule::DeltaThreshold { delta: 0.1 + 0.2 },
                amplification: Some(vec![0.7]),
                ..SchemeConfig::default()
            },
            snr_grid: SnrGrid { start: 10.0, stop: 35.0, step: 2.5 },
            target_errors: Some(100),
            max_trials: Some(1_000_000),
            out: Some("x.csv".into()),
            format: OutputFormat::Json,
            ..ExperimentConfig::default()
        };
        let json = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&json).unwrap(), c);
        assert!(json.contains("\"kind\": \"draf\""));
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"kind": "nd_raf", "seed": 7}"#).unwrap();
        assert_eq!(c.scheme.kind, SchemeKind::NdRaf);
        assert_eq!(c.seed, 7);
        assert_eq!(c.trials, ExperimentConfig::default().trials);
    }

    #[test]
    fn hash_ignores_output_path() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { out: Some("elsewhere.csv".into()), ..a.clone() };
        let c = ExperimentConfig { seed: 2, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn grids() {
        let g: SnrGrid = "10:35:5".parse().unwrap();
        assert_eq!(g.points().unwrap(), vec![10.0, 15.0, 20.0, 25.0, 30.0, 35.0]);
        assert_eq!("20".parse::<SnrGrid>().unwrap().points().unwrap(), vec![20.0]);
        assert!("30:10:5".parse::<SnrGrid>().is_err());
        assert!("10:20:0".parse::<SnrGrid>().is_err());
        assert!("a:b".parse::<SnrGrid>().is_err());
    }
}
