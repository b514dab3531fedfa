use serde::{Deserialize, Serialize};

use super::fading::FadingRealization;
use crate::linalg::CMat;
use crate::{Error, Result, C64};

/// `H_i = g_i h_i`.
pub fn two_product_gains(r: &FadingRealization) -> Vec<C64> {
    r.g.iter().zip(&r.h).map(|(g, h)| g * h).collect()
}

/// `1 + Σ|h_i|²`, the per-entry variance of `Σ h_i v_i A_i + w` for
/// unitary `A_i`.
pub fn effective_noise_variance(h: &[C64]) -> f64 {
    1.0 + h.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// `λ = Σ |h_i|² |g_i|²`.
pub fn lambda_statistic(r: &FadingRealization) -> f64 {
    r.g.iter().zip(&r.h).map(|(g, h)| g.norm_sqr() * h.norm_sqr()).sum()
}

/// Block-diagonal `2(n−1) × 2(n−1)` channel; block `i` is
/// `[[h_1, 0], [b_{i+1} h_{i+1} g_{i+1}, h_1]]`.
pub fn draf_equivalent_channel(r: &FadingRealization) -> CMat {
    draf_equivalent_channel_amplified(r, &vec![1.0; r.n()])
}

pub fn draf_equivalent_channel_amplified(r: &FadingRealization, b: &[f64]) -> CMat {
    let n = r.n();
    let dim = 2 * (n - 1);
    let mut g = CMat::zeros(dim, dim);
    for i in 1..n {
        let o = 2 * (i - 1);
        g[(o, o)] = r.h[0];
        g[(o + 1, o + 1)] = r.h[0];
        g[(o + 1, o)] = b[i] * r.h[i] * r.g[i];
    }
    g
}

/// Per-row noise variance of the D-RAF frame, `diag(Σ_i)` with
/// `Σ_i = diag(1, 1 + b²|h_{i+1}|²)`.
pub fn draf_noise_profile(h: &[C64], b: &[f64]) -> Vec<f64> {
    (1..h.len())
        .flat_map(|i| [1.0, 1.0 + b[i] * b[i] * h[i].norm_sqr()])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Whitened {
    pub h_eff: CMat,
    pub observations: CMat,
    /// Noise variance of each row after whitening.
    pub row_variance: Vec<f64>,
}

/// Left-multiplies each block by `Σ^{-1}`. Row noise variances become
/// `1/Σ_rr`, which the ML metric divides out again.
pub fn draf_whiten(g: &CMat, y: &CMat, h: &[C64]) -> Result<Whitened> {
    draf_whiten_amplified(g, y, h, &vec![1.0; h.len()])
}

pub fn draf_whiten_amplified(g: &CMat, y: &CMat, h: &[C64], b: &[f64]) -> Result<Whitened> {
    let profile = draf_noise_profile(h, b);
    if g.nrows() != profile.len() || y.nrows() != g.nrows() || g.nrows() != g.ncols() {
        return Err(Error::Shape(format!(
            "channel {:?}, observations {:?}, {} relays",
            g.shape(),
            y.shape(),
            h.len().saturating_sub(1)
        )));
    }
    let mut h_eff = g.clone();
    let mut obs = y.clone();
    for (r, s) in profile.iter().enumerate() {
        h_eff.row_mut(r).unscale_mut(*s);
        obs.row_mut(r).unscale_mut(*s);
    }
    Ok(Whitened {
        h_eff,
        observations: obs,
        row_variance: profile.iter().map(|s| 1.0 / s).collect(),
    })
}

/// `Σ_blocks log2 det(I_2 + ρ G_i G_i† Σ_i^{-1})`, bits per frame column.
pub fn draf_mutual_information(r: &FadingRealization, snr: f64) -> f64 {
    let mut bits = 0.0;
    for i in 1..r.n() {
        let a = r.h[0];
        let c = r.h[i] * r.g[i];
        let s2 = 1.0 + r.h[i].norm_sqr();
        // G G† = [[|a|², a c̄], [c ā, |c|² + |a|²]], columns scaled by Σ^{-1}.
        let m00 = 1.0 + snr * a.norm_sqr();
        let m01 = snr * a * c.conj() / s2;
        let m10 = snr * c * a.conj();
        let m11 = 1.0 + snr * (c.norm_sqr() + a.norm_sqr()) / s2;
        let det = m00 * m11 - (m01 * m10).re;
        bits += det.log2();
    }
    bits
}

/// Which instantaneous mutual information an outage test compares with
/// the rate, and in which unit that rate is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutageModel {
    /// Direct SISO link; `R` in bpcu.
    NonCooperative,
    /// Source-to-relay link of relay `relay` (1-based user index); `R` is
    /// the first-stage rate in bpcu.
    RelayLink { relay: usize },
    /// ND-SDAF over `2n − 1` slots; `R` in bpncu. Relays join when their
    /// own link supports the stage rate `R (2n−1)/n`.
    NdSdaf,
    /// ND-RAF two-product channel; `R` in bpcu of the equivalent channel,
    /// outage iff `μ ≥ 1 − r_χ` with `μ = −ln λ / ln snr`.
    NdRaf,
    /// D-RAF frame mutual information per slot; `R` in bpncu.
    Draf,
}

impl std::str::FromStr for OutageModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noncoop" | "siso" => Ok(Self::NonCooperative),
            "ndsdaf" => Ok(Self::NdSdaf),
            "ndraf" | "ndaaf" => Ok(Self::NdRaf),
            "draf" => Ok(Self::Draf),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }
}

/// Relays (1-based user indices) whose source link supports `stage_rate`.
pub fn relays_out_of_outage(r: &FadingRealization, stage_rate: f64, snr: f64) -> Vec<usize> {
    (1..r.n())
        .filter(|&i| stage_rate < (1.0 + snr * r.g[i].norm_sqr()).log2())
        .collect()
}

/// ND-SDAF mutual information in bpncu: symbol 1 only reaches the
/// destination directly, symbol `j` adds relay `j` when it cooperates.
pub fn ndsdaf_mutual_information(r: &FadingRealization, coop: &[usize], snr: f64) -> f64 {
    let n = r.n();
    let h1 = r.h[0].norm_sqr();
    let mut bits = (1.0 + snr * h1).log2();
    for j in 1..n {
        let relay = if coop.contains(&j) { r.h[j].norm_sqr() } else { 0.0 };
        bits += (1.0 + snr * (h1 + relay)).log2();
    }
    bits / (2 * n - 1) as f64
}

pub fn outage_indicator(model: OutageModel, r: &FadingRealization, rate: f64, snr: f64) -> Result<bool> {
    let out = match model {
        OutageModel::NonCooperative => (1.0 + snr * r.h[0].norm_sqr()).log2() < rate,
        OutageModel::RelayLink { relay } => {
            if relay == 0 || relay >= r.n() {
                return Err(Error::InvalidParameter(format!("no relay {relay}")));
            }
            (1.0 + snr * r.g[relay].norm_sqr()).log2() < rate
        }
        OutageModel::NdSdaf => {
            let n = r.n();
            let stage = rate * (2 * n - 1) as f64 / n as f64;
            let coop = relays_out_of_outage(r, stage, snr);
            ndsdaf_mutual_information(r, &coop, snr) < rate
        }
        OutageModel::NdRaf => {
            let lambda = lambda_statistic(r);
            let mu = -lambda.ln() / snr.ln();
            let r_chi = rate / snr.log2();
            mu >= 1.0 - r_chi
        }
        OutageModel::Draf => {
            let slots = 2 * (r.n() - 1);
            draf_mutual_information(r, snr) / (slots as f64) < rate
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(g: &[C64], h: &[C64]) -> FadingRealization {
        FadingRealization { g: g.to_vec(), h: h.to_vec() }
    }

    #[test]
    fn two_product_examples() {
        let one = c(1.0, 0.0);
        assert_eq!(two_product_gains(&real(&[one, one], &[one, one])), vec![one, one]);
        let r = real(&[one, c(0.0, 0.0)], &[c(0.3, 0.1), c(-2.0, 1.0)]);
        assert_eq!(two_product_gains(&r), vec![c(0.3, 0.1), c(0.0, 0.0)]);
        let r = real(&[one, c(0.5, -0.2)], &[c(0.3, 0.1), c(-2.0, 1.0)]);
        let sum: f64 = two_product_gains(&r).iter().map(|z| z.norm_sqr()).sum();
        assert!((sum - lambda_statistic(&r)).abs() < 1e-12);
    }

    #[test]
    fn noise_variance_formula() {
        assert_eq!(effective_noise_variance(&[c(0.0, 0.0)]), 1.0);
        assert_eq!(effective_noise_variance(&[c(1.0, 0.0), c(0.0, 1.0)]), 3.0);
    }

    #[test]
    fn lambda_examples() {
        let one = c(1.0, 0.0);
        assert_eq!(lambda_statistic(&real(&[one; 3], &[one; 3])), 3.0);
        let r = real(&[one, c(2.0, 0.0)], &[c(0.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(lambda_statistic(&r), 4.0);
    }

    #[test]
    fn draf_channel_blocks() {
        let (h1, h2, g2) = (c(0.4, -0.1), c(0.7, 0.2), c(-0.3, 0.9));
        let r = real(&[c(1.0, 0.0), g2], &[h1, h2]);
        let g = draf_equivalent_channel(&r);
        let expect = CMat::from_row_slice(2, 2, &[h1, c(0.0, 0.0), h2 * g2, h1]);
        assert_eq!(g, expect);

        let silent = real(&[c(1.0, 0.0), g2], &[h1, c(0.0, 0.0)]);
        assert_eq!(draf_equivalent_channel(&silent), CMat::identity(2, 2) * h1);

        let r3 = real(&[c(1.0, 0.0), g2, c(0.1, 0.1)], &[h1, h2, c(0.5, 0.0)]);
        let g3 = draf_equivalent_channel(&r3);
        assert_eq!(g3.shape(), (4, 4));
        assert_eq!(g3[(2, 2)], h1);
        assert_eq!(g3[(3, 2)], c(0.5, 0.0) * c(0.1, 0.1));
        assert_eq!(g3[(2, 0)], c(0.0, 0.0));
        assert_eq!(g3[(0, 2)], c(0.0, 0.0));
    }

    #[test]
    fn whitening_examples() {
        let (h1, g2) = (c(0.4, -0.1), c(-0.3, 0.9));
        let y = CMat::from_row_slice(2, 2, &[c(1.0, 2.0), c(3.0, 0.0), c(-1.0, 1.0), c(0.5, 0.5)]);

        let r0 = real(&[c(1.0, 0.0), g2], &[h1, c(0.0, 0.0)]);
        let g0 = draf_equivalent_channel(&r0);
        assert_eq!(draf_whiten(&g0, &y, &r0.h).unwrap().h_eff, g0);

        let h2 = c(0.6, 0.8);
        let r1 = real(&[c(1.0, 0.0), g2], &[h1, h2]);
        let g1 = draf_equivalent_channel(&r1);
        let w = draf_whiten(&g1, &y, &r1.h).unwrap();
        let expect = CMat::from_row_slice(2, 2, &[h1, c(0.0, 0.0), g2 * h2 / 2.0, h1 / 2.0]);
        assert!(max_abs_diff(&w.h_eff, &expect) < 1e-15);
        assert_eq!(w.observations.row(0), y.row(0));
        assert_eq!(w.row_variance, vec![1.0, 0.5]);
    }

    #[test]
    fn draf_information_examples() {
        let z = c(0.0, 0.0);
        assert_eq!(draf_mutual_information(&real(&[c(1.0, 0.0), z], &[z, z]), 10.0), 0.0);
        let snr = 37.0;
        let r = real(&[c(1.0, 0.0), c(0.4, 0.3)], &[c(0.6, 0.8), z]);
        let bits = draf_mutual_information(&r, snr);
        assert!((bits - 2.0 * (1.0 + snr).log2()).abs() < 1e-12);
    }

    #[test]
    fn draf_information_exponent() {
        let snr: f64 = 1e6;
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut uniform = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            // Exponents above 3/4 leave the O(1) terms comparable to the
            // asymptote at this SNR.
            let (phi1, phi2, xi2) = (0.75 * uniform(), 0.75 * uniform(), 0.75 * uniform());
            let phases: Vec<f64> = (0..4).map(|_| uniform() * 6.283).collect();
            let r = FadingRealization::from_exponents(&[phi1, phi2], &[0.0, xi2], &phases, snr);
            let got = draf_mutual_information(&r, snr) / snr.log2();
            let want = (2.0 * (1.0 - phi1)).max(0.0).max(1.0 - phi2 - xi2);
            assert!((got - want).abs() <= 0.05, "phi1={phi1} phi2={phi2} xi2={xi2}: {got} vs {want}");
        }
    }

    #[test]
    fn outage_examples() {
        let one = c(1.0, 0.0);
        let r = real(&[one, one], &[one, one]);
        assert!(!outage_indicator(OutageModel::RelayLink { relay: 1 }, &r, 1.0, 3.0).unwrap());

        let z = c(0.0, 0.0);
        let dead = real(&[one, z], &[z, z]);
        for m in [OutageModel::NonCooperative, OutageModel::NdSdaf, OutageModel::NdRaf, OutageModel::Draf] {
            assert!(outage_indicator(m, &dead, 0.5, 100.0).unwrap(), "{m:?}");
        }

        let snr: f64 = 1e4;
        let lambda = snr.powf(-1.2);
        let r = real(&[one, z], &[c(lambda.sqrt(), 0.0), z]);
        let rate = 0.1 * snr.log2();
        assert!(outage_indicator(OutageModel::NdRaf, &r, rate, snr).unwrap());
        assert!("bogus".parse::<OutageModel>().is_err());
    }
}
