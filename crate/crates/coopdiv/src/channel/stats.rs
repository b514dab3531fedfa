use rand::Rng;
use serde::{Deserialize, Serialize};

use super::equivalent::lambda_statistic;
use super::fading::{cn01, sample_fading, FadingDistribution};
use crate::linalg::CMat;
use crate::C64;

/// An empirical probability compared with a bound, with the combined
/// binomial standard error of both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub empirical: f64,
    pub bound: f64,
    pub sigma: f64,
}

impl BoundCheck {
    pub fn holds(&self, sigmas: f64) -> bool {
        self.empirical <= self.bound + sigmas * self.sigma
    }
}

fn binomial_var(p: f64, samples: usize) -> f64 {
    p * (1.0 - p) / samples as f64
}

/// `P(Σ_i a_i < t)` against `P(a_1 < t)^n` for i.i.d. two-product powers
/// `a_i = |h_i g_i|²`.
pub fn hypercube_check<R: Rng + ?Sized>(n: usize, t: f64, samples: usize, rng: &mut R) -> BoundCheck {
    let mut below_sum = 0usize;
    let mut below_one = 0usize;
    for _ in 0..samples {
        let a: Vec<f64> = (0..n).map(|_| (cn01(rng) * cn01(rng)).norm_sqr()).collect();
        below_sum += (a.iter().sum::<f64>() < t) as usize;
        below_one += (a[0] < t) as usize;
    }
    let p_sum = below_sum as f64 / samples as f64;
    let p_one = below_one as f64 / samples as f64;
    // Delta method for the n-th power of an estimated proportion.
    let bound_sigma = n as f64 * p_one.powi(n as i32 - 1) * binomial_var(p_one, samples).sqrt();
    BoundCheck {
        empirical: p_sum,
        bound: p_one.powi(n as i32),
        sigma: (binomial_var(p_sum, samples) + bound_sigma * bound_sigma).sqrt(),
    }
}

/// Empirical `P(λ ≤ z)` for Rayleigh realizations against
/// `[z(1 − ln z)]^n`.
pub fn lambda_cdf_check<R: Rng + ?Sized>(n: usize, z: f64, samples: usize, rng: &mut R) -> BoundCheck {
    let mut below = 0usize;
    for _ in 0..samples {
        let r = sample_fading(&FadingDistribution::Rayleigh, n, rng);
        below += (lambda_statistic(&r) <= z) as usize;
    }
    let p = below as f64 / samples as f64;
    BoundCheck {
        empirical: p,
        bound: (z * (1.0 - z.ln())).powi(n as i32),
        sigma: binomial_var(p, samples).sqrt(),
    }
}

/// Sample covariance of `W = Σ_i h_i v_i A_i + w` for fixed `h` and
/// maps `A_i` (`L × T`), over `draws` noise draws.
pub fn noise_covariance<R: Rng + ?Sized>(h: &[C64], maps: &[CMat], draws: usize, rng: &mut R) -> CMat {
    let t = maps[0].ncols();
    let l = maps[0].nrows();
    let mut acc = CMat::zeros(t, t);
    let mut w = vec![C64::new(0.0, 0.0); t];
    let mut v = vec![C64::new(0.0, 0.0); l];
    for _ in 0..draws {
        for x in w.iter_mut() {
            *x = cn01(rng);
        }
        for (hi, a) in h.iter().zip(maps) {
            for x in v.iter_mut() {
                *x = cn01(rng);
            }
            for c in 0..t {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..l {
                    s += v[k] * a[(k, c)];
                }
                w[c] += hi * s;
            }
        }
        for r in 0..t {
            for c in 0..t {
                acc[(r, c)] += w[r] * w[c].conj();
            }
        }
    }
    acc / C64::new(draws as f64, 0.0)
}
