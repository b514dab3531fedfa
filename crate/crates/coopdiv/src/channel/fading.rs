use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::C64;

/// Circularly-symmetric `CN(0, 1)` draw.
pub fn cn01<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FadingDistribution {
    Rayleigh,
    /// Nakagami-type magnitude with `|c|² ~ Gamma(α, 1/α)` and uniform
    /// phase, so that `P(|c|² ≤ t) ~ t^α` as `t → 0`.
    GeneralIid { alpha: f64 },
}

impl FadingDistribution {
    pub fn alpha(&self) -> f64 {
        match self {
            Self::Rayleigh => 1.0,
            Self::GeneralIid { alpha } => *alpha,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        match self {
            Self::Rayleigh => cn01(rng),
            Self::GeneralIid { alpha } => {
                let power: f64 = Gamma::new(*alpha, 1.0 / alpha)
                    .expect("alpha must be positive")
                    .sample(rng);
                let phase = rng.random::<f64>() * std::f64::consts::TAU;
                C64::from_polar(power.sqrt(), phase)
            }
        }
    }
}

/// One block-fading draw. `g[0] = 1` stands for the source acting as its
/// own relay; `h[0]` is the direct source-destination path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingRealization {
    pub g: Vec<C64>,
    pub h: Vec<C64>,
}

impl FadingRealization {
    pub fn n(&self) -> usize {
        self.h.len()
    }

    /// `φ_i = −log|h_i|² / log snr`.
    pub fn phi(&self, i: usize, snr: f64) -> f64 {
        -self.h[i].norm_sqr().ln() / snr.ln()
    }

    /// `ξ_i = −log|g_i|² / log snr`.
    pub fn xi(&self, i: usize, snr: f64) -> f64 {
        -self.g[i].norm_sqr().ln() / snr.ln()
    }

    /// Realization with `|h_i|² = snr^{−φ_i}` and `|g_i|² = snr^{−ξ_i}`.
    pub fn from_exponents(phi: &[f64], xi: &[f64], phases: &[f64], snr: f64) -> Self {
        let n = phi.len();
        let mut g = vec![C64::new(1.0, 0.0); n];
        let mut h = Vec::with_capacity(n);
        for i in 0..n {
            h.push(C64::from_polar(snr.powf(-phi[i] / 2.0), phases[2 * i]));
            if i > 0 {
                g[i] = C64::from_polar(snr.powf(-xi[i] / 2.0), phases[2 * i + 1]);
            }
        }
        Self { g, h }
    }
}

pub fn sample_fading<R: Rng + ?Sized>(dist: &FadingDistribution, n: usize, rng: &mut R) -> FadingRealization {
    let mut g = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for i in 0..n {
        h.push(dist.sample(rng));
        g.push(if i == 0 { C64::new(1.0, 0.0) } else { dist.sample(rng) });
    }
    FadingRealization { g, h }
}

/// Unit-variance receiver noise: `relay[i][t]` at relay `i` (row 0 is the
/// source and stays unused), `dest[t]` at the destination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseDraw {
    pub relay: Vec<Vec<C64>>,
    pub dest: Vec<C64>,
}

impl NoiseDraw {
    pub fn zero(n: usize, slots: usize) -> Self {
        Self {
            relay: vec![vec![C64::new(0.0, 0.0); slots]; n],
            dest: vec![C64::new(0.0, 0.0); slots],
        }
    }
}

pub fn sample_noise<R: Rng + ?Sized>(n: usize, slots: usize, rng: &mut R) -> NoiseDraw {
    let relay = (0..n).map(|_| (0..slots).map(|_| cn01(rng)).collect()).collect();
    let dest = (0..slots).map(|_| cn01(rng)).collect();
    NoiseDraw { relay, dest }
}
