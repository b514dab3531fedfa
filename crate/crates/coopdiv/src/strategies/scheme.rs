use std::sync::Arc;

use super::config::{ndsdaf_relay_decision, CodeChoice, SchemeConfig, SchemeKind};
use super::transcript::{FrameTranscript, SlotRecord};
use crate::channel::{draf_equivalent_channel_amplified, draf_whiten_amplified, outage_indicator};
use crate::channel::{FadingRealization, NoiseDraw, OutageModel};
use crate::codes::{
    full_cda_code, horizontally_restricted_code, integral_restriction_code, qam, slotted_diagonal_code,
    truncate_rows, uncoded, vectorized_cda_code, CodeVariant, Codebook,
};
use crate::decoding::{ml_decode, DecodeProblem};
use crate::linalg::{frobenius_sq, CMat};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Direct,
    Sdaf,
    RafSlotted,
    RafDispersion,
    Draf,
}

/// Expected frame energy `θ² a + c` over `slots` slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    pub slots: f64,
    pub per_theta2: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateAccounting {
    pub slots_per_frame: usize,
    pub info_symbols: usize,
}

impl RateAccounting {
    /// Information symbols per slot; network rate is this times the bits
    /// per constellation symbol.
    pub fn bpncu_per_constellation_bit(&self) -> f64 {
        self.info_symbols as f64 / self.slots_per_frame as f64
    }
}

/// Slot and symbol count of one frame.
pub fn network_rate_accounting(kind: SchemeKind, n: usize, code: &Codebook, cooperating: bool) -> RateAccounting {
    let info_symbols = code.info_symbols_per_matrix();
    let slots_per_frame = match kind {
        SchemeKind::NonCooperative => code.t,
        SchemeKind::Draf => code.n * code.t,
        SchemeKind::NdSdaf | SchemeKind::NdRaf | SchemeKind::NdAaf => match &code.dispersion {
            Some(d) if code.variant != CodeVariant::DiagonalRestricted => {
                let l = d.source_map.ncols();
                if cooperating {
                    l + code.t
                } else {
                    l
                }
            }
            _ => {
                if cooperating {
                    2 * n - 1
                } else {
                    n
                }
            }
        },
    };
    RateAccounting {
        slots_per_frame,
        info_symbols,
    }
}

/// A configured strategy with its codes and the destination's
/// equivalent codebooks built once.
#[derive(Debug, Clone)]
pub struct Scheme {
    config: SchemeConfig,
    n: usize,
    layout: Layout,
    code: Arc<Codebook>,
    stage1: Option<Arc<Codebook>>,
    /// ND-SDAF: indexed by the bit mask of cooperating relays. Otherwise a
    /// single entry.
    equivalents: Vec<Arc<Codebook>>,
    direct_only: Arc<Codebook>,
    energy: EnergyModel,
}

fn with_header(cb: &Codebook, basis: Vec<CMat>) -> Result<Codebook> {
    let mut out = Codebook::from_basis(cb.variant, cb.constellation.clone(), basis, cb.layers)?;
    out.generator = cb.generator.clone();
    out.gamma = cb.gamma;
    Ok(out)
}

/// Destination views of a dispersion code: `[[s, 0], [0, X]]` over both
/// stages, and `s` alone.
fn dispersion_views(cb: &Codebook) -> Result<(Codebook, Codebook)> {
    let d = cb.dispersion.as_ref().ok_or(Error::MissingDispersion)?;
    let l = d.source_map.ncols();
    let (n, t) = (cb.n, cb.t);
    let mut ext = Vec::with_capacity(cb.basis().len());
    let mut first = Vec::with_capacity(cb.basis().len());
    for (k, dk) in cb.basis().iter().enumerate() {
        let mut e = CMat::zeros(n + 1, l + t);
        for c in 0..l {
            e[(0, c)] = d.source_map[(k, c)];
        }
        e.view_mut((1, l), (n, t)).copy_from(dk);
        ext.push(e);
        first.push(d.source_map.rows(k, 1).into_owned());
    }
    let mut ext = with_header(cb, ext)?;
    ext.row_labels = std::iter::once(0).chain(0..n).collect();
    Ok((ext, with_header(cb, first)?))
}

fn direct_view(slotted: &Codebook, n: usize) -> Result<Codebook> {
    truncate_rows(slotted, &[0])?.select_columns(&(0..n).collect::<Vec<_>>())
}

impl Scheme {
    pub fn new(config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n();
        let constellation = qam(config.qam)?;
        let e_a = constellation.average_energy();
        let b = config.amplification.clone().unwrap_or_else(|| vec![1.0; n - 1]);
        let mismatch = || {
            Error::MismatchedCodebooks(format!("{:?} cannot carry {:?}", config.kind, config.code))
        };
        let scheme = match config.kind {
            SchemeKind::NonCooperative => {
                let code = match config.code {
                    CodeChoice::Default | CodeChoice::Horizontal => horizontally_restricted_code(n, &constellation)?,
                    CodeChoice::Uncoded => uncoded(&constellation)?,
                    _ => return Err(mismatch()),
                };
                let code = Arc::new(code);
                let energy = EnergyModel {
                    slots: code.t as f64,
                    per_theta2: code.average_energy(),
                    constant: 0.0,
                };
                Self {
                    config,
                    n,
                    layout: Layout::Direct,
                    equivalents: vec![code.clone()],
                    direct_only: code.clone(),
                    code,
                    stage1: None,
                    energy,
                }
            }
            SchemeKind::NdSdaf => {
                if !matches!(config.code, CodeChoice::Default | CodeChoice::Diagonal) {
                    return Err(mismatch());
                }
                let slotted = slotted_diagonal_code(n, &constellation)?;
                let stage1 = horizontally_restricted_code(n, &constellation)?;
                let equivalents = (0..1usize << (n - 1))
                    .map(|mask| {
                        let rows: Vec<usize> =
                            std::iter::once(0).chain((1..n).filter(|r| mask >> (r - 1) & 1 == 1)).collect();
                        truncate_rows(&slotted, &rows).map(Arc::new)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let energy = EnergyModel {
                    slots: (2 * n - 1) as f64,
                    per_theta2: slotted.average_energy(),
                    constant: 0.0,
                };
                Self {
                    config,
                    n,
                    layout: Layout::Sdaf,
                    direct_only: Arc::new(direct_view(&slotted, n)?),
                    code: Arc::new(slotted),
                    stage1: Some(Arc::new(stage1)),
                    equivalents,
                    energy,
                }
            }
            SchemeKind::NdRaf | SchemeKind::NdAaf => {
                let aaf = config.kind == SchemeKind::NdAaf && config.amplification.is_none();
                match config.code {
                    CodeChoice::Default | CodeChoice::Diagonal => {
                        let slotted = slotted_diagonal_code(n, &constellation)?;
                        let g = slotted.generator.as_ref().expect("slotted code has a generator").matrix.clone();
                        let col = |i: usize| (0..n).map(|k| g[(k, i)].norm_sqr()).sum::<f64>();
                        let source = e_a * frobenius_sq(&g);
                        let energy = if aaf {
                            EnergyModel {
                                slots: (2 * n - 1) as f64,
                                per_theta2: source + e_a * (n - 1) as f64,
                                constant: 0.0,
                            }
                        } else {
                            EnergyModel {
                                slots: (2 * n - 1) as f64,
                                per_theta2: source + (1..n).map(|i| b[i - 1] * b[i - 1] * e_a * col(i)).sum::<f64>(),
                                constant: b.iter().map(|x| x * x).sum(),
                            }
                        };
                        Self {
                            config,
                            n,
                            layout: Layout::RafSlotted,
                            direct_only: Arc::new(direct_view(&slotted, n)?),
                            code: Arc::new(slotted.clone()),
                            equivalents: vec![Arc::new(slotted)],
                            stage1: None,
                            energy,
                        }
                    }
                    CodeChoice::IntegralRestriction | CodeChoice::FullCda => {
                        let code = if config.code == CodeChoice::FullCda {
                            full_cda_code(n, &constellation)?
                        } else {
                            integral_restriction_code(n, &constellation)?
                        };
                        let (ext, first) = dispersion_views(&code)?;
                        let d = code.dispersion.as_ref().ok_or(Error::MissingDispersion)?;
                        let s_norm = frobenius_sq(&d.source_map);
                        let sa = |u: usize| frobenius_sq(&(&d.source_map * &d.maps[u]));
                        let relays = 1..n;
                        let energy = if aaf {
                            EnergyModel {
                                slots: (d.source_map.ncols() + code.t) as f64,
                                per_theta2: e_a
                                    * (s_norm + sa(0) + relays.map(|u| frobenius_sq(&d.maps[u])).sum::<f64>()),
                                constant: 0.0,
                            }
                        } else {
                            EnergyModel {
                                slots: (d.source_map.ncols() + code.t) as f64,
                                per_theta2: e_a
                                    * (s_norm + sa(0) + relays.clone().map(|u| b[u - 1] * b[u - 1] * sa(u)).sum::<f64>()),
                                constant: relays.map(|u| b[u - 1] * b[u - 1] * frobenius_sq(&d.maps[u])).sum(),
                            }
                        };
                        Self {
                            config,
                            n,
                            layout: Layout::RafDispersion,
                            code: Arc::new(code),
                            equivalents: vec![Arc::new(ext)],
                            direct_only: Arc::new(first),
                            stage1: None,
                            energy,
                        }
                    }
                    _ => return Err(mismatch()),
                }
            }
            SchemeKind::Draf => {
                if !matches!(config.code, CodeChoice::Default | CodeChoice::FullCda) {
                    return Err(mismatch());
                }
                let d = 2 * (n - 1);
                let code = vectorized_cda_code(d, &constellation)?;
                let entry = |p: usize, k: usize| e_a * code.basis().iter().map(|m| m[(p, k)].norm_sqr()).sum::<f64>();
                let mut per_theta2 = code.average_energy();
                let mut constant = 0.0;
                for i in 1..n {
                    let bb = b[i - 1] * b[i - 1];
                    per_theta2 += bb * (0..d).map(|k| entry(2 * (i - 1), k)).sum::<f64>();
                    constant += bb * d as f64;
                }
                let energy = EnergyModel {
                    slots: (d * d) as f64,
                    per_theta2,
                    constant,
                };
                let code = Arc::new(code);
                Self {
                    config,
                    n,
                    layout: Layout::Draf,
                    equivalents: vec![code.clone()],
                    direct_only: code.clone(),
                    code,
                    stage1: None,
                    energy,
                }
            }
        };
        Ok(scheme)
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> SchemeKind {
        self.config.kind
    }

    /// The code as the source sees it.
    pub fn code(&self) -> &Arc<Codebook> {
        &self.code
    }

    pub fn stage1_code(&self) -> Option<&Arc<Codebook>> {
        self.stage1.as_ref()
    }

    pub fn energy_model(&self) -> EnergyModel {
        self.energy
    }

    /// Codebook size, the range of valid information indices.
    pub fn index_count(&self) -> usize {
        self.code.len() as usize
    }

    /// `θ` such that the expected energy per slot, relays active, is `snr`.
    pub fn theta(&self, snr: f64) -> Result<f64> {
        let e = self.energy;
        let t2 = (snr * e.slots - e.constant) / e.per_theta2;
        if !(t2 > 0.0) {
            return Err(Error::InvalidParameter(format!("snr {snr} cannot cover relay noise energy")));
        }
        Ok(t2.sqrt())
    }

    /// ND schemes stop forwarding for `r ≥ 1/2` when the skip flag is set.
    pub fn cooperates(&self, snr: f64) -> bool {
        match self.layout {
            Layout::Sdaf | Layout::RafSlotted | Layout::RafDispersion => {
                !self.config.skip_cooperation_above_r_half || self.config.network_rate / snr.log2() < 0.5
            }
            _ => true,
        }
    }

    pub fn rate_accounting(&self, cooperating: bool) -> RateAccounting {
        network_rate_accounting(self.config.kind, self.n, &self.code, cooperating)
    }

    /// Slots a frame occupies at this SNR.
    pub fn schedule_length(&self, snr: f64) -> usize {
        self.rate_accounting(self.cooperates(snr)).slots_per_frame
    }

    /// The largest schedule, used to size noise draws.
    pub fn max_schedule_length(&self) -> usize {
        self.rate_accounting(true).slots_per_frame
    }

    /// Outage model and the rate it is compared with.
    pub fn outage_model(&self) -> (OutageModel, f64) {
        let r = self.config.network_rate;
        match self.config.kind {
            SchemeKind::NonCooperative => (OutageModel::NonCooperative, r),
            SchemeKind::NdSdaf => (OutageModel::NdSdaf, r),
            SchemeKind::NdRaf | SchemeKind::NdAaf => {
                let slots = self.max_schedule_length() as f64;
                (OutageModel::NdRaf, r * slots / self.n as f64)
            }
            SchemeKind::Draf => (OutageModel::Draf, r),
        }
    }

    pub fn outage(&self, fading: &FadingRealization, snr: f64) -> Result<bool> {
        let (model, rate) = self.outage_model();
        outage_indicator(model, fading, rate, snr)
    }

    /// Per-user amplification, entry 0 for the source fixed at 1.
    pub fn amplification(&self, fading: &FadingRealization, snr: f64, theta: f64) -> Vec<f64> {
        let e_a = self.code.constellation.average_energy();
        let mut b = vec![1.0; self.n];
        for i in 1..self.n {
            let g2 = fading.g[i].norm_sqr();
            b[i] = match (&self.config.amplification, self.config.kind) {
                (Some(v), _) => v[i - 1],
                (None, SchemeKind::NdAaf) => {
                    let p = theta * theta * e_a;
                    (p / (p * g2 + 1.0)).sqrt()
                }
                _ => 1.0,
            };
            if self.config.enforce_power_cap {
                b[i] = b[i].min((snr / (g2 * snr + 1.0)).sqrt());
            }
        }
        b
    }

    pub fn run_frame(&self, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
        self.check_inputs(fading, noise, index)?;
        match self.layout {
            Layout::Direct => self.run_direct(fading, noise, snr, index),
            Layout::Sdaf => self.run_sdaf(fading, noise, snr, index),
            Layout::RafSlotted => self.run_raf_slotted(fading, noise, snr, index),
            Layout::RafDispersion => self.run_raf_dispersion(fading, noise, snr, index),
            Layout::Draf => self.run_draf(fading, noise, snr, index),
        }
    }

    fn check_inputs(&self, fading: &FadingRealization, noise: &NoiseDraw, index: usize) -> Result<()> {
        let slots = self.max_schedule_length();
        if fading.n() != self.n || fading.g.len() != self.n {
            return Err(Error::Shape(format!("fading for {} users, scheme has {}", fading.n(), self.n)));
        }
        if noise.dest.len() < slots || noise.relay.len() < self.n || noise.relay.iter().any(|v| v.len() < slots) {
            return Err(Error::Shape(format!("noise draw shorter than {slots} slots")));
        }
        if index >= self.index_count() {
            return Err(Error::InvalidParameter(format!("index {index} outside codebook")));
        }
        Ok(())
    }

    fn transcript(&self, index: usize, theta: f64, slots: Vec<SlotRecord>) -> FrameTranscript {
        FrameTranscript {
            kind: self.config.kind,
            transmitted_index: index,
            theta,
            slots,
            cooperating: Vec::new(),
            relay_decoded: Vec::new(),
            amplification: Vec::new(),
            equivalent_channel: CMat::zeros(0, 0),
            equivalent_codebook: self.direct_only.clone(),
            observations: CMat::zeros(0, 0),
            noise_variance: Vec::new(),
        }
    }

    fn run_direct(&self, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
        let theta = self.theta(snr)?;
        let x = self.code.flat_codeword(index);
        let h1 = fading.h[0];
        let mut slots = Vec::with_capacity(x.len());
        let mut y = Vec::with_capacity(x.len());
        for (t, xt) in x.iter().enumerate() {
            let tx = xt * theta;
            let rx = h1 * tx + noise.dest[t];
            slots.push(SlotRecord {
                slot: t + 1,
                transmitted: vec![(1, tx)],
                relay_received: Vec::new(),
                destination: rx,
            });
            y.push(rx);
        }
        let mut tr = self.transcript(index, theta, slots);
        tr.equivalent_channel = CMat::from_element(1, 1, h1);
        tr.noise_variance = vec![1.0; y.len()];
        tr.observations = CMat::from_row_slice(1, y.len(), &y);
        Ok(tr)
    }

    /// Source broadcasts `θ z` over slots `1..=n`; returns the slot records
    /// and each relay's observations.
    fn broadcast(&self, z: &[C64], theta: f64, fading: &FadingRealization, noise: &NoiseDraw) -> (Vec<SlotRecord>, Vec<Vec<C64>>) {
        let mut slots = Vec::with_capacity(2 * z.len());
        let mut relay_obs = vec![Vec::with_capacity(z.len()); self.n];
        for (t, zt) in z.iter().enumerate() {
            let tx = zt * theta;
            let mut heard = Vec::with_capacity(self.n - 1);
            for i in 1..self.n {
                let r = fading.g[i] * tx + noise.relay[i][t];
                relay_obs[i].push(r);
                heard.push((i + 1, r));
            }
            slots.push(SlotRecord {
                slot: t + 1,
                transmitted: vec![(1, tx)],
                relay_received: heard,
                destination: fading.h[0] * tx + noise.dest[t],
            });
        }
        (slots, relay_obs)
    }

    fn run_sdaf(&self, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
        let n = self.n;
        let theta = self.theta(snr)?;
        let stage1 = self.stage1.as_ref().expect("ND-SDAF has a first-stage code");
        let z = stage1.flat_codeword(index);
        let (mut slots, relay_obs) = self.broadcast(z, theta, fading, noise);
        let coop = self.cooperates(snr);
        let stage_rate = self.config.network_rate * (2 * n - 1) as f64 / n as f64;
        let mut decoded = Vec::new();
        if coop {
            for i in 1..n {
                if ndsdaf_relay_decision(self.config.relay_rule, fading.g[i], stage_rate, snr, self.config.qam) {
                    let p = DecodeProblem::new(
                        CMat::from_element(1, 1, fading.g[i]),
                        CMat::from_row_slice(1, n, &relay_obs[i]),
                        stage1,
                        theta,
                        &vec![1.0; n],
                    )?;
                    decoded.push((i, ml_decode(&p)?));
                }
            }
        }
        let mut y: Vec<C64> = slots.iter().map(|s| s.destination).collect();
        let mut tr;
        if coop {
            for r in 1..n {
                let t = n + r - 1;
                let mut transmitted = Vec::new();
                let mut rx = noise.dest[t];
                if let Some(&(_, k)) = decoded.iter().find(|(i, _)| *i == r) {
                    let tx = stage1.flat_codeword(k)[r] * theta;
                    rx += fading.h[r] * tx;
                    transmitted.push((r + 1, tx));
                }
                slots.push(SlotRecord {
                    slot: t + 1,
                    transmitted,
                    relay_received: Vec::new(),
                    destination: rx,
                });
                y.push(rx);
            }
            let mask = decoded.iter().fold(0usize, |m, (i, _)| m | 1 << (i - 1));
            let mut h = vec![fading.h[0]];
            h.extend(decoded.iter().map(|(i, _)| fading.h[*i]));
            tr = self.transcript(index, theta, slots);
            tr.equivalent_codebook = self.equivalents[mask].clone();
            tr.equivalent_channel = CMat::from_row_slice(1, h.len(), &h);
        } else {
            tr = self.transcript(index, theta, slots);
            tr.equivalent_channel = CMat::from_element(1, 1, fading.h[0]);
        }
        tr.cooperating = decoded.iter().map(|(i, _)| i + 1).collect();
        tr.relay_decoded = decoded.iter().map(|(i, k)| (i + 1, *k)).collect();
        tr.noise_variance = vec![1.0; y.len()];
        tr.observations = CMat::from_row_slice(1, y.len(), &y);
        Ok(tr)
    }

    fn run_raf_slotted(&self, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
        let n = self.n;
        let theta = self.theta(snr)?;
        let x = self.code.flat_codeword(index);
        let z = &x[..n];
        let (mut slots, relay_obs) = self.broadcast(z, theta, fading, noise);
        let mut y: Vec<C64> = slots.iter().map(|s| s.destination).collect();
        let mut var = vec![1.0; n];
        let b = self.amplification(fading, snr, theta);
        let mut tr;
        if self.cooperates(snr) {
            let mut h = vec![fading.h[0]];
            for r in 1..n {
                let t = n + r - 1;
                let tx = relay_obs[r][r] * b[r];
                let rx = fading.h[r] * tx + noise.dest[t];
                slots.push(SlotRecord {
                    slot: t + 1,
                    transmitted: vec![(r + 1, tx)],
                    relay_received: Vec::new(),
                    destination: rx,
                });
                y.push(rx);
                var.push(1.0 + b[r] * b[r] * fading.h[r].norm_sqr());
                h.push(fading.h[r] * fading.g[r] * b[r]);
            }
            tr = self.transcript(index, theta, slots);
            tr.cooperating = (2..=n).collect();
            tr.equivalent_codebook = self.equivalents[0].clone();
            tr.equivalent_channel = CMat::from_row_slice(1, n, &h);
        } else {
            tr = self.transcript(index, theta, slots);
            tr.equivalent_channel = CMat::from_element(1, 1, fading.h[0]);
        }
        tr.amplification = b[1..].to_vec();
        tr.noise_variance = var;
        tr.observations = CMat::from_row_slice(1, y.len(), &y);
        Ok(tr)
    }

    fn run_raf_dispersion(&self, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
        let n = self.n;
        let theta = self.theta(snr)?;
        let d = self.code.dispersion.as_ref().ok_or(Error::MissingDispersion)?;
        let s = self.code.source_vector(index as u128).ok_or(Error::MissingDispersion)?;
        let l = s.len();
        let (mut slots, relay_obs) = self.broadcast(&s, theta, fading, noise);
        let mut y: Vec<C64> = slots.iter().map(|s| s.destination).collect();
        let mut var = vec![1.0; l];
        let b = self.amplification(fading, snr, theta);
        let mut tr;
        if self.cooperates(snr) {
            let zero = C64::new(0.0, 0.0);
            for c in 0..self.code.t {
                let t = l + c;
                let src: C64 = (0..l).map(|k| s[k] * d.maps[0][(k, c)]).sum::<C64>() * theta;
                let mut transmitted = vec![(1, src)];
                let mut rx = fading.h[0] * src + noise.dest[t];
                let mut v = 1.0;
                for i in 1..n {
                    let a = &d.maps[i];
                    let tx = (0..l).fold(zero, |acc, k| acc + relay_obs[i][k] * a[(k, c)]) * b[i];
                    rx += fading.h[i] * tx;
                    transmitted.push((i + 1, tx));
                    let col: f64 = (0..l).map(|k| a[(k, c)].norm_sqr()).sum();
                    v += b[i] * b[i] * fading.h[i].norm_sqr() * col;
                }
                slots.push(SlotRecord {
                    slot: t + 1,
                    transmitted,
                    relay_received: Vec::new(),
                    destination: rx,
                });
                y.push(rx);
                var.push(v);
            }
            let mut h = vec![fading.h[0], fading.h[0]];
            h.extend((1..n).map(|i| fading.h[i] * fading.g[i] * b[i]));
            tr = self.transcript(index, theta, slots);
            tr.cooperating = (2..=n).collect();
            tr.equivalent_codebook = self.equivalents[0].clone();
            tr.equivalent_channel = CMat::from_row_slice(1, h.len(), &h);
        } else {
            tr = self.transcript(index, theta, slots);
            tr.equivalent_channel = CMat::from_element(1, 1, fading.h[0]);
        }
        tr.amplification = b[1..].to_vec();
        tr.noise_variance = var;
        tr.observations = CMat::from_row_slice(1, y.len(), &y);
        Ok(tr)
    }

    fn run_draf(&self, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
        let n = self.n;
        let d = 2 * (n - 1);
        let theta = self.theta(snr)?;
        let b = self.amplification(fading, snr, theta);
        let x = self.code.flat_codeword(index);
        let mut y = CMat::zeros(d, d);
        let mut slots = Vec::with_capacity(d * d);
        let mut held = vec![C64::new(0.0, 0.0); n];
        for k in 0..d {
            for p in 0..d {
                let t = k * d + p;
                let src = x[p * d + k] * theta;
                let mut transmitted = vec![(1, src)];
                let mut heard = Vec::new();
                let mut rx = fading.h[0] * src + noise.dest[t];
                for i in 1..n {
                    let o = 2 * (i - 1);
                    if p == o {
                        held[i] = fading.g[i] * src + noise.relay[i][t];
                        heard.push((i + 1, held[i]));
                    } else if p == o + 1 {
                        let tx = held[i] * b[i];
                        rx += fading.h[i] * tx;
                        transmitted.push((i + 1, tx));
                    }
                }
                y[(p, k)] = rx;
                slots.push(SlotRecord {
                    slot: t + 1,
                    transmitted,
                    relay_received: heard,
                    destination: rx,
                });
            }
        }
        let g = draf_equivalent_channel_amplified(fading, &b);
        let w = draf_whiten_amplified(&g, &y, &fading.h, &b)?;
        let mut tr = self.transcript(index, theta, slots);
        tr.cooperating = (2..=n).collect();
        tr.amplification = b[1..].to_vec();
        tr.equivalent_codebook = self.equivalents[0].clone();
        tr.equivalent_channel = w.h_eff;
        tr.noise_variance = (0..d * d).map(|e| w.row_variance[e / d]).collect();
        tr.observations = w.observations;
        Ok(tr)
    }
}

pub fn run_noncoop_frame(scheme: &Scheme, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
    expect_kind(scheme, &[SchemeKind::NonCooperative])?;
    scheme.run_frame(fading, noise, snr, index)
}

pub fn run_ndsdaf_frame(scheme: &Scheme, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
    expect_kind(scheme, &[SchemeKind::NdSdaf])?;
    scheme.run_frame(fading, noise, snr, index)
}

pub fn run_ndraf_frame(scheme: &Scheme, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
    expect_kind(scheme, &[SchemeKind::NdRaf, SchemeKind::NdAaf])?;
    scheme.run_frame(fading, noise, snr, index)
}

pub fn run_draf_frame(scheme: &Scheme, fading: &FadingRealization, noise: &NoiseDraw, snr: f64, index: usize) -> Result<FrameTranscript> {
    expect_kind(scheme, &[SchemeKind::Draf])?;
    scheme.run_frame(fading, noise, snr, index)
}

fn expect_kind(scheme: &Scheme, kinds: &[SchemeKind]) -> Result<()> {
    if kinds.contains(&scheme.kind()) {
        Ok(())
    } else {
        Err(Error::MismatchedCodebooks(format!("scheme is {:?}", scheme.kind())))
    }
}
