use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::codebook::Codebook;
use crate::linalg::{gram_eigenvalues, CMat};
use crate::{Error, Result, C64};

/// Column-major flattening.
pub fn vectorize_columns(x: &CMat) -> Vec<C64> {
    x.iter().copied().collect()
}

/// Inverse of [`vectorize_columns`].
pub fn reshape_columns(v: &[C64], rows: usize, cols: usize) -> Result<CMat> {
    if v.len() != rows * cols {
        return Err(Error::Shape(format!(
            "vector of length {} cannot fill {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMat::from_column_slice(rows, cols, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeMetrics {
    /// `min |det(ΔX ΔX†)|`, square codes only.
    pub min_det: Option<f64>,
    /// `min Π_c ‖ΔX[:, c]‖`; for diagonal and `1 × n` codes this is the
    /// product distance `|Π_j δz(j)|`.
    pub min_product_distance: f64,
    pub min_eigenvalue: f64,
    pub pairs_scanned: u64,
    pub exhaustive: bool,
}

/// Minima over distinct codeword pairs. Scans every pair when there are
/// at most `max_pairs`, otherwise `max_pairs` uniformly drawn pairs.
pub fn code_metrics(codebook: &Codebook, max_pairs: u64, seed: u64) -> Result<CodeMetrics> {
    let size = codebook.len();
    if size < 2 {
        return Err(Error::UndefinedMetrics);
    }
    let total = size.saturating_mul(size - 1) / 2;
    let square = codebook.n == codebook.t;
    let mut out = CodeMetrics {
        min_det: square.then_some(f64::INFINITY),
        min_product_distance: f64::INFINITY,
        min_eigenvalue: f64::INFINITY,
        pairs_scanned: 0,
        exhaustive: total <= max_pairs as u128,
    };
    let mut visit = |a: u128, b: u128| {
        let d = codebook.codeword(a) - codebook.codeword(b);
        let prod: f64 = (0..d.ncols()).map(|c| d.column(c).norm()).product();
        out.min_product_distance = out.min_product_distance.min(prod);
        out.min_eigenvalue = out.min_eigenvalue.min(gram_eigenvalues(&d)[0]);
        if let Some(md) = out.min_det.as_mut() {
            let det = (&d * d.adjoint()).determinant().norm();
            *md = md.min(det);
        }
        out.pairs_scanned += 1;
    };
    if out.exhaustive {
        for a in 0..size {
            for b in a + 1..size {
                visit(a, b);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut drawn = 0u64;
        while drawn < max_pairs {
            let a = rng.random_range(0..size);
            let b = rng.random_range(0..size);
            if a != b {
                visit(a, b);
                drawn += 1;
            }
        }
    }
    Ok(out)
}

/// `θ` such that `E‖θX‖_F² / T = snr`.
///
/// With `r = None` the codebook's own constellation sets the energy. With
/// `Some(r)` the QAM size follows the rate: `K log2|A| = r T log2 snr`,
/// and a QAM of size `|A|` has energy `2(|A| − 1)/3` on the odd grid.
pub fn power_normalizer(codebook: &Codebook, snr: f64, r: Option<f64>) -> Result<f64> {
    if codebook.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    if snr <= 0.0 {
        return Err(Error::InvalidParameter("snr must be positive".into()));
    }
    let shape_energy: f64 = codebook.basis().iter().map(crate::linalg::frobenius_sq).sum();
    let symbol_energy = match r {
        None => codebook.constellation.average_energy(),
        Some(r) => {
            let k = codebook.info_symbols_per_matrix() as f64;
            let size = snr.powf(r * codebook.t as f64 / k);
            if size <= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "rate r = {r} implies a constellation of size {size:.3}"
                )));
            }
            2.0 * (size - 1.0) / 3.0
        }
    };
    Ok((snr * codebook.t as f64 / (symbol_energy * shape_energy)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub keep: Vec<usize>,
    pub pairs: u64,
    pub min_full_eigenvalue: f64,
    pub min_truncated_eigenvalue: f64,
    /// Cauchy interlacing `λ_j ≤ μ_j ≤ λ_{j+n−k}` held on every pair.
    pub interlacing_holds: bool,
    /// `μ_min ≥ λ_min²` held on every pair with `λ_min ≤ 1`.
    pub squared_bound_holds: bool,
    /// No two codewords coincide after truncation.
    pub distinct: bool,
}

impl TruncationReport {
    pub fn passed(&self) -> bool {
        self.interlacing_holds && self.squared_bound_holds && self.distinct && self.min_truncated_eigenvalue >= 0.0
    }
}

const INTERLACE_TOL: f64 = 1e-9;

/// Compares `ΔX ΔX†` with its principal submatrix on `keep` over random
/// distinct pairs, and checks every truncated codeword is unique.
pub fn truncation_check(codebook: &Codebook, keep: &[usize], pairs: u64, seed: u64) -> Result<TruncationReport> {
    let size = codebook.len();
    if size < 2 {
        return Err(Error::UndefinedMetrics);
    }
    let truncated = super::codebook::truncate_rows(codebook, keep)?;
    let (n, k) = (codebook.n, keep.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TruncationReport {
        keep: keep.to_vec(),
        pairs: 0,
        min_full_eigenvalue: f64::INFINITY,
        min_truncated_eigenvalue: f64::INFINITY,
        interlacing_holds: true,
        squared_bound_holds: true,
        distinct: true,
    };
    while report.pairs < pairs {
        let a = rng.random_range(0..size);
        let b = rng.random_range(0..size);
        if a == b {
            continue;
        }
        let full = gram_eigenvalues(&(codebook.codeword(a) - codebook.codeword(b)));
        let trunc = gram_eigenvalues(&(truncated.codeword(a) - truncated.codeword(b)));
        for (j, mu) in trunc.iter().enumerate() {
            if *mu < full[j] - INTERLACE_TOL || *mu > full[j + n - k] + INTERLACE_TOL {
                report.interlacing_holds = false;
            }
        }
        if full[0] <= 1.0 && trunc[0] < full[0] * full[0] - INTERLACE_TOL {
            report.squared_bound_holds = false;
        }
        report.min_full_eigenvalue = report.min_full_eigenvalue.min(full[0]);
        report.min_truncated_eigenvalue = report.min_truncated_eigenvalue.min(trunc[0]);
        report.pairs += 1;
    }
    report.distinct = all_distinct(&truncated);
    Ok(report)
}

fn all_distinct(codebook: &Codebook) -> bool {
    let quantize = |z: &C64| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64);
    let mut seen = std::collections::HashSet::new();
    (0..codebook.len()).all(|i| seen.insert(codebook.codeword(i).iter().map(quantize).collect::<Vec<_>>()))
}
