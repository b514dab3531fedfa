use serde::{Deserialize, Serialize};

use crate::channel::FadingDistribution;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    NonCooperative,
    NdSdaf,
    NdRaf,
    NdAaf,
    Draf,
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "noncoop" | "noncooperative" | "siso" => Ok(Self::NonCooperative),
            "ndsdaf" => Ok(Self::NdSdaf),
            "ndraf" => Ok(Self::NdRaf),
            "ndaaf" => Ok(Self::NdAaf),
            "draf" | "daaf" => Ok(Self::Draf),
            _ => Err(Error::UnknownScheme(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RelayRule {
    /// Decode iff the stage rate is below `log2(1 + snr |g|²)`.
    OutageExact,
    /// Decode iff `|g|² > δ (M² − 1) / snr`.
    DeltaThreshold { delta: f64 },
}

/// Code carried by the source. `Default` picks the natural code for the
/// scheme: the `1 × n` horizontal code without cooperation, the slotted
/// diagonal code for ND-SDAF and ND-RAF, the vectorized `2(n−1)` CDA for
/// D-RAF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeChoice {
    Default,
    Uncoded,
    Horizontal,
    Diagonal,
    IntegralRestriction,
    FullCda,
}

impl std::str::FromStr for CodeChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "default" => Ok(Self::Default),
            "uncoded" => Ok(Self::Uncoded),
            "horizontal" => Ok(Self::Horizontal),
            "diagonal" => Ok(Self::Diagonal),
            "integral" | "integralrestriction" => Ok(Self::IntegralRestriction),
            "fullcda" | "cda" => Ok(Self::FullCda),
            other => Err(Error::InvalidParameter(format!("unknown code `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    /// Total nodes `n + 1`: source, `n − 1` relays and the destination.
    pub users: usize,
    pub qam: usize,
    pub code: CodeChoice,
    /// Network rate in bits per network channel use.
    pub network_rate: f64,
    pub relay_rule: RelayRule,
    /// Per-relay amplification `b_i`, relays `2..=n` in order. `None` means
    /// 1 for RAF schemes and power-equalizing for ND-AAF.
    pub amplification: Option<Vec<f64>>,
    pub enforce_power_cap: bool,
    pub skip_cooperation_above_r_half: bool,
    pub fading: FadingDistribution,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            kind: SchemeKind::NdSdaf,
            users: 3,
            qam: 16,
            code: CodeChoice::Default,
            network_rate: 7.0 / 3.0,
            relay_rule: RelayRule::DeltaThreshold { delta: 1.0 },
            amplification: None,
            enforce_power_cap: false,
            skip_cooperation_above_r_half: true,
            fading: FadingDistribution::Rayleigh,
        }
    }
}

impl SchemeConfig {
    /// Number of transmitting users, source included.
    pub fn n(&self) -> usize {
        self.users.saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.users < 3 && self.kind != SchemeKind::NonCooperative {
            return Err(Error::InvalidParameter(format!(
                "cooperation needs at least 3 users, got {}",
                self.users
            )));
        }
        if self.users < 2 {
            return Err(Error::InvalidParameter("need a source and a destination".into()));
        }
        if let RelayRule::DeltaThreshold { delta } = self.relay_rule {
            if !(delta > 0.0) {
                return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
            }
        }
        if let Some(b) = &self.amplification {
            if b.len() != self.n() - 1 || b.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "need {} positive amplification factors",
                    self.n() - 1
                )));
            }
        }
        if !(self.network_rate > 0.0) {
            return Err(Error::InvalidParameter("network rate must be positive".into()));
        }
        Ok(())
    }
}

/// Decides whether a relay with source link `g` decodes.
pub fn ndsdaf_relay_decision(rule: RelayRule, g: crate::C64, stage_rate: f64, snr: f64, m_squared: usize) -> bool {
    let power = g.norm_sqr();
    match rule {
        RelayRule::OutageExact => stage_rate < (1.0 + snr * power).log2(),
        RelayRule::DeltaThreshold { delta } => power > delta * (m_squared as f64 - 1.0) / snr,
    }
}
