use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::linalg::{from_rows, mat_pow, unitarity_defect, CMat};
use crate::{Error, Result, C64};

pub const UNITARY_TOL: f64 = 1e-10;

/// Unitary generator of a perfect-code lattice. Row `i` holds the
/// embeddings of basis element `β_i`, column `j` the `j`-th Galois
/// conjugate, so a layer is `diag(f · G)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeGenerator {
    pub n: usize,
    pub matrix: CMat,
    pub basis_tag: String,
}

impl LatticeGenerator {
    /// Wraps an arbitrary matrix, rejecting it unless it passes the
    /// unitarity gate.
    pub fn from_matrix(matrix: CMat, basis_tag: &str) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Shape("generator must be square".into()));
        }
        let defect = unitarity_defect(&matrix);
        if defect > UNITARY_TOL {
            return Err(Error::InvalidParameter(format!(
                "generator `{basis_tag}` is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            n: matrix.nrows(),
            matrix,
            basis_tag: basis_tag.to_string(),
        })
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

/// Integer change of basis turning the power basis `{α θ^k}` into an
/// orthonormal one for the trace form.
const B3: [[f64; 3]; 3] = [[-2.0, 0.0, 1.0], [-2.0, 1.0, 1.0], [-1.0, 0.0, 0.0]];
const B4: [[f64; 4]; 4] = [
    [-1.0, -3.0, 1.0, 1.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, -3.0, 0.0, 1.0],
    [0.0, -1.0, 0.0, 0.0],
];

pub fn perfect_lattice_generator(n: usize) -> Result<LatticeGenerator> {
    let i = C64::i();
    let one = C64::new(1.0, 0.0);
    match n {
        1 => LatticeGenerator::from_matrix(CMat::identity(1, 1), "trivial"),
        2 => {
            let s5 = 5f64.sqrt();
            let th = (1.0 + s5) / 2.0;
            let thb = (1.0 - s5) / 2.0;
            let a = one + i - i * th;
            let ab = one + i - i * thb;
            let m = from_rows(&[vec![a, ab], vec![a * th, ab * thb]]) / C64::new(s5, 0.0);
            LatticeGenerator::from_matrix(m, "golden")
        }
        3 => {
            // Q(ζ7 + ζ7⁻¹) over Q(j); σ: θ_k ↦ θ_{2k}.
            let j = C64::from_polar(1.0, 2.0 * PI / 3.0);
            let thetas: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|k| 2.0 * (2.0 * PI * k / 7.0).cos()).collect();
            let alpha = |t: f64| one + j + t;
            power_basis(&B3.map(|r| r.to_vec()), &thetas, alpha, 7.0, "cubic-zeta7")
        }
        4 => {
            // Q(ζ15 + ζ15⁻¹) over Q(i); σ: θ_k ↦ θ_{2k}.
            let thetas: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
                .iter()
                .map(|k| 2.0 * (2.0 * PI * k / 15.0).cos())
                .collect();
            let alpha = |t: f64| C64::new(1.0, -3.0) + i * t * t;
            power_basis(&B4.map(|r| r.to_vec()), &thetas, alpha, 15.0, "quartic-zeta15")
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

fn power_basis(
    change: &[Vec<f64>],
    thetas: &[f64],
    alpha: impl Fn(f64) -> C64,
    disc: f64,
    tag: &str,
) -> Result<LatticeGenerator> {
    let n = thetas.len();
    let scale = disc.sqrt();
    let m = CMat::from_fn(n, n, |row, col| {
        let t = thetas[col];
        let mut acc = C64::new(0.0, 0.0);
        for (k, &b) in change[row].iter().enumerate() {
            acc += b * alpha(t) * t.powi(k as i32);
        }
        acc / scale
    });
    LatticeGenerator::from_matrix(m, tag)
}

/// Non-norm element used with the supported generators.
pub fn default_gamma(n: usize) -> C64 {
    if n % 2 == 0 {
        C64::i()
    } else if n == 1 {
        C64::new(1.0, 0.0)
    } else {
        C64::from_polar(1.0, 2.0 * PI / 3.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaMatrix {
    pub n: usize,
    pub gamma: C64,
    pub matrix: CMat,
}

impl GammaMatrix {
    pub fn pow(&self, k: usize) -> CMat {
        mat_pow(&self.matrix, k)
    }
}

/// Companion-style shift: ones on the subdiagonal and `γ` in the top-right
/// corner, so that `Γ^n = γ I`.
pub fn gamma_matrix(n: usize, gamma: C64) -> Result<GammaMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if gamma.norm() == 0.0 {
        return Err(Error::InvalidParameter("gamma must be nonzero".into()));
    }
    let mut m = CMat::zeros(n, n);
    for r in 1..n {
        m[(r, r - 1)] = C64::new(1.0, 0.0);
    }
    m[(0, n - 1)] += gamma;
    Ok(GammaMatrix { n, gamma, matrix: m })
}
