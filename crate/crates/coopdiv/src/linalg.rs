//! Thin helpers over `nalgebra` for the small complex matrices used here.

use nalgebra::DMatrix;

use crate::C64;

pub type CMat = DMatrix<C64>;

/// `‖M†M − I‖_F`, the unitarity defect of a square or tall matrix.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    (gram - CMat::identity(m.ncols(), m.ncols())).norm()
}

pub fn frobenius_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigenvalues of the Hermitian matrix `M M†`, ascending.
pub fn gram_eigenvalues(m: &CMat) -> Vec<f64> {
    let g = m * m.adjoint();
    let mut ev: Vec<f64> = g.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn mat_pow(m: &CMat, k: usize) -> CMat {
    let mut out = CMat::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Row-major construction from nested slices.
pub fn from_rows(rows: &[Vec<C64>]) -> CMat {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, c, |i, j| rows[i][j])
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_unitary() {
        assert!(unitarity_defect(&CMat::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn gram_eigenvalues_of_diagonal() {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(0.0, 1.0),
        ]));
        let ev = gram_eigenvalues(&m);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 4.0).abs() < 1e-12);
    }
}
