//! Exhaustive maximum-likelihood decoding of `Y = θ H X + W` with
//! independent, entrywise variances.

use crate::codes::{Codebook, MATERIALIZE_LIMIT};
use crate::linalg::CMat;
use crate::{Error, Result, C64};

pub const DECODE_BUDGET: u128 = MATERIALIZE_LIMIT;

#[derive(Debug, Clone)]
pub struct DecodeProblem<'a> {
    /// `K × n`.
    pub channel: CMat,
    /// `K × T`.
    pub observations: CMat,
    pub codebook: &'a Codebook,
    pub theta: f64,
    /// `K × T` noise variances.
    pub variance: CMat,
}

impl<'a> DecodeProblem<'a> {
    pub fn new(channel: CMat, observations: CMat, codebook: &'a Codebook, theta: f64, variance: &[f64]) -> Result<Self> {
        let (k, t) = observations.shape();
        if channel.ncols() != codebook.n || channel.nrows() != k || codebook.t != t {
            return Err(Error::Shape(format!(
                "channel {:?}, observations {:?}, codewords {}x{}",
                channel.shape(),
                observations.shape(),
                codebook.n,
                codebook.t
            )));
        }
        if variance.len() != k * t || variance.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Shape("variance profile must hold K*T positive entries".into()));
        }
        let variance = CMat::from_row_slice(k, t, &variance.iter().map(|v| C64::new(*v, 0.0)).collect::<Vec<_>>());
        Ok(Self {
            channel,
            observations,
            codebook,
            theta,
            variance,
        })
    }
}

/// `Σ_k |y_k − s_k|² / var_k`.
pub fn weighted_metric(y: &[C64], signal: &[C64], variance: &[f64]) -> f64 {
    y.iter()
        .zip(signal)
        .zip(variance)
        .map(|((a, b), v)| (a - b).norm_sqr() / v)
        .sum()
}

/// Index minimizing the weighted metric; the lowest index wins ties.
pub fn ml_decode(p: &DecodeProblem<'_>) -> Result<usize> {
    let cb = p.codebook;
    let size = cb.len();
    let flat = match cb.flat_codewords() {
        Some(f) if size <= DECODE_BUDGET => f,
        _ => return Err(Error::DecodeBudget { size, budget: DECODE_BUDGET }),
    };
    let (k, t) = p.observations.shape();
    let n = cb.n;
    let th: Vec<C64> = (0..k * n).map(|e| p.channel[(e / n, e % n)] * p.theta).collect();
    let y: Vec<C64> = (0..k * t).map(|e| p.observations[(e / t, e % t)]).collect();
    let inv: Vec<f64> = (0..k * t).map(|e| 1.0 / p.variance[(e / t, e % t)].re).collect();
    let stride = n * t;
    let mut best = (0usize, f64::INFINITY);
    for (idx, x) in flat.chunks_exact(stride).enumerate() {
        let mut metric = 0.0;
        'rows: for kk in 0..k {
            let hrow = &th[kk * n..(kk + 1) * n];
            for c in 0..t {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..n {
                    s += hrow[j] * x[j * t + c];
                }
                metric += (y[kk * t + c] - s).norm_sqr() * inv[kk * t + c];
            }
            if metric > best.1 {
                break 'rows;
            }
        }
        if metric < best.1 {
            best = (idx, metric);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{diagonal_restricted_code, full_cda_code, qam, uncoded};

    fn noiseless(cb: &Codebook, h: &CMat, theta: f64, idx: u128) -> CMat {
        h * cb.codeword(idx) * C64::new(theta, 0.0)
    }

    #[test]
    fn metric_examples() {
        let z = C64::new(0.0, 0.0);
        assert_eq!(weighted_metric(&[C64::new(1.0, 1.0)], &[C64::new(1.0, 1.0)], &[2.0]), 0.0);
        assert_eq!(weighted_metric(&[C64::new(1.0, 0.0), C64::i()], &[z, z], &[1.0, 1.0]), 2.0);
        assert_eq!(weighted_metric(&[z, C64::new(2.0, 0.0)], &[z, z], &[1.0, 4.0]), 1.0);
    }

    #[test]
    fn noiseless_diagonal_index_7() {
        let cb = diagonal_restricted_code(2, &qam(4).unwrap()).unwrap();
        let h = CMat::from_row_slice(1, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let y = noiseless(&cb, &h, 1.0, 7);
        let p = DecodeProblem::new(h, y, &cb, 1.0, &[1.0, 1.0]).unwrap();
        assert_eq!(ml_decode(&p).unwrap(), 7);
    }

    #[test]
    fn noiseless_full_cda_all_indices() {
        let cb = full_cda_code(2, &qam(4).unwrap()).unwrap();
        let h = CMat::from_row_slice(2, 2, &[C64::new(0.3, 0.4), C64::new(0.0, 0.0), C64::new(-0.2, 0.9), C64::new(0.3, 0.4)]);
        for idx in 0..cb.len() {
            let y = noiseless(&cb, &h, 2.0, idx);
            let p = DecodeProblem::new(h.clone(), y, &cb, 2.0, &[1.0, 1.0, 0.5, 0.5]).unwrap();
            assert_eq!(ml_decode(&p).unwrap() as u128, idx);
        }
    }

    #[test]
    fn singleton_and_ties() {
        let q = qam(4).unwrap();
        let single = crate::codes::Constellation { points: vec![q.points[0]], ..q.clone() };
        let cb = uncoded(&single).unwrap();
        let h = CMat::identity(1, 1);
        let y = CMat::from_row_slice(1, 1, &[C64::new(5.0, 5.0)]);
        assert_eq!(ml_decode(&DecodeProblem::new(h.clone(), y, &cb, 1.0, &[1.0]).unwrap()).unwrap(), 0);

        // A zero channel makes every codeword tie.
        let cb = uncoded(&q).unwrap();
        let y = CMat::from_row_slice(1, 1, &[C64::new(1.0, 1.0)]);
        let p = DecodeProblem::new(CMat::zeros(1, 1), y, &cb, 1.0, &[1.0]).unwrap();
        assert_eq!(ml_decode(&p).unwrap(), 0);
    }

    #[test]
    fn budget_exceeded() {
        let cb = full_cda_code(4, &qam(4).unwrap()).unwrap();
        let p = DecodeProblem::new(CMat::identity(4, 4), CMat::zeros(4, 4), &cb, 1.0, &[1.0; 16]).unwrap();
        assert!(matches!(ml_decode(&p), Err(Error::DecodeBudget { .. })));
    }
}
