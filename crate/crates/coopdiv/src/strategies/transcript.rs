use std::sync::Arc;

use serde::Serialize;

use super::config::SchemeKind;
use crate::codes::{matrix_pairs, Codebook, CodebookDescriptor};
use crate::decoding::DecodeProblem;
use crate::linalg::CMat;
use crate::{Result, C64};

/// Signals of one time slot; users are 1-based, user 1 is the source.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub slot: usize,
    pub transmitted: Vec<(usize, C64)>,
    pub relay_received: Vec<(usize, C64)>,
    pub destination: C64,
}

#[derive(Debug, Clone)]
pub struct FrameTranscript {
    pub kind: SchemeKind,
    pub transmitted_index: usize,
    pub theta: f64,
    pub slots: Vec<SlotRecord>,
    /// `D(S)`, 1-based user indices of the relays that took part.
    pub cooperating: Vec<usize>,
    /// Relay and the index it decoded, for decoding relays.
    pub relay_decoded: Vec<(usize, usize)>,
    /// Amplification applied by each relay, user 1 excluded.
    pub amplification: Vec<f64>,
    pub equivalent_channel: CMat,
    pub equivalent_codebook: Arc<Codebook>,
    pub observations: CMat,
    /// Row-major variance of each observation.
    pub noise_variance: Vec<f64>,
}

impl FrameTranscript {
    pub fn observation_count(&self) -> usize {
        self.observations.len()
    }

    pub fn decode_problem(&self) -> Result<DecodeProblem<'_>> {
        DecodeProblem::new(
            self.equivalent_channel.clone(),
            self.observations.clone(),
            &self.equivalent_codebook,
            self.theta,
            &self.noise_variance,
        )
    }

    /// Whether any relay that decoded got the index wrong.
    pub fn relay_error(&self) -> bool {
        self.relay_decoded.iter().any(|&(_, k)| k != self.transmitted_index)
    }

    pub fn dump(&self) -> TranscriptDump {
        let pair = |z: &C64| [z.re, z.im];
        TranscriptDump {
            kind: self.kind,
            transmitted_index: self.transmitted_index,
            theta: self.theta,
            slots: self
                .slots
                .iter()
                .map(|s| SlotDump {
                    slot: s.slot,
                    transmitted: s.transmitted.iter().map(|(u, z)| (*u, pair(z))).collect(),
                    relay_received: s.relay_received.iter().map(|(u, z)| (*u, pair(z))).collect(),
                    destination: pair(&s.destination),
                })
                .collect(),
            cooperating: self.cooperating.clone(),
            relay_decoded: self.relay_decoded.clone(),
            amplification: self.amplification.clone(),
            equivalent_channel: matrix_pairs(&self.equivalent_channel),
            equivalent_codebook: self.equivalent_codebook.descriptor(),
            equivalent_rows: self.equivalent_codebook.row_labels.clone(),
            observations: matrix_pairs(&self.observations),
            noise_variance: self.noise_variance.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SlotDump {
    pub slot: usize,
    pub transmitted: Vec<(usize, [f64; 2])>,
    pub relay_received: Vec<(usize, [f64; 2])>,
    pub destination: [f64; 2],
}

/// JSON form of a transcript; complex entries are `[re, im]`.
#[derive(Debug, Clone, Serialize)]
pub struct TranscriptDump {
    pub kind: SchemeKind,
    pub transmitted_index: usize,
    pub theta: f64,
    pub slots: Vec<SlotDump>,
    pub cooperating: Vec<usize>,
    pub relay_decoded: Vec<(usize, usize)>,
    pub amplification: Vec<f64>,
    pub equivalent_channel: Vec<Vec<[f64; 2]>>,
    pub equivalent_codebook: CodebookDescriptor,
    pub equivalent_rows: Vec<usize>,
    pub observations: Vec<Vec<[f64; 2]>>,
    pub noise_variance: Vec<f64>,
}
