use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::constellation::{Constellation, ConstellationKind};
use super::generator::{default_gamma, gamma_matrix, perfect_lattice_generator, LatticeGenerator, UNITARY_TOL};
use crate::linalg::{frobenius_sq, unitarity_defect, CMat};
use crate::{Error, Result, C64};

/// Codebooks up to this many codewords are stored; larger ones are
/// generated from the index on demand.
pub const MATERIALIZE_LIMIT: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeVariant {
    HorizontalRestricted,
    DiagonalRestricted,
    IntegralRestricted,
    MLayered,
    FullCda,
    VectorizedCda,
    HorizontallyStacked,
    Uncoded,
}

/// Linear relay processing: the source broadcasts `s = f · source_map`
/// and row `u` of the codeword is `s · maps[u]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispersion {
    pub source_map: CMat,
    pub maps: Vec<CMat>,
}

impl Dispersion {
    pub fn max_unitarity_defect(&self) -> f64 {
        self.maps.iter().map(unitarity_defect).fold(0.0, f64::max)
    }
}

/// A linear space-time code: codeword `X = Σ_k f_k D_k` over the
/// information symbols `f_k` drawn from one constellation.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub variant: CodeVariant,
    pub n: usize,
    pub t: usize,
    pub layers: usize,
    pub constellation: Constellation,
    pub generator: Option<LatticeGenerator>,
    pub gamma: Option<C64>,
    pub dispersion: Option<Dispersion>,
    basis: Vec<CMat>,
    /// Original row of each kept row, after truncation.
    pub row_labels: Vec<usize>,
    flat: Option<Arc<[C64]>>,
}

impl Codebook {
    pub fn from_basis(
        variant: CodeVariant,
        constellation: Constellation,
        basis: Vec<CMat>,
        layers: usize,
    ) -> Result<Self> {
        let first = basis.first().ok_or(Error::EmptyCodebook)?;
        let (n, t) = first.shape();
        if basis.iter().any(|d| d.shape() != (n, t)) {
            return Err(Error::Shape("basis matrices differ in shape".into()));
        }
        let mut cb = Self {
            variant,
            n,
            t,
            layers,
            constellation,
            generator: None,
            gamma: None,
            dispersion: None,
            basis,
            row_labels: (0..n).collect(),
            flat: None,
        };
        cb.materialize();
        Ok(cb)
    }

    fn materialize(&mut self) {
        if self.len() > MATERIALIZE_LIMIT {
            self.flat = None;
            return;
        }
        let size = self.len() as usize;
        let stride = self.n * self.t;
        let mut flat = vec![C64::new(0.0, 0.0); size * stride];
        for idx in 0..size {
            let x = self.encode(&self.symbols(idx as u128));
            let out = &mut flat[idx * stride..(idx + 1) * stride];
            for r in 0..self.n {
                for c in 0..self.t {
                    out[r * self.t + c] = x[(r, c)];
                }
            }
        }
        self.flat = Some(flat.into());
    }

    pub fn info_symbols_per_matrix(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Number of codewords, `|A|^K`.
    pub fn len(&self) -> u128 {
        (self.constellation.size() as u128)
            .checked_pow(self.basis.len() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_materialized(&self) -> bool {
        self.flat.is_some()
    }

    /// Information symbols of codeword `index`; symbol `k` is digit `k`
    /// (least significant first) in base `|A|`.
    pub fn symbols(&self, index: u128) -> Vec<C64> {
        let m = self.constellation.size() as u128;
        let mut rem = index;
        (0..self.basis.len())
            .map(|_| {
                let d = (rem % m) as usize;
                rem /= m;
                self.constellation.points[d]
            })
            .collect()
    }

    pub fn encode(&self, f: &[C64]) -> CMat {
        let mut x = CMat::zeros(self.n, self.t);
        for (fk, d) in f.iter().zip(&self.basis) {
            x += d * *fk;
        }
        x
    }

    pub fn codeword(&self, index: u128) -> CMat {
        match (&self.flat, usize::try_from(index)) {
            (Some(_), Ok(i)) => {
                let row = self.flat_codeword(i);
                CMat::from_row_slice(self.n, self.t, row)
            }
            _ => self.encode(&self.symbols(index)),
        }
    }

    /// Row-major entries of a stored codeword.
    pub fn flat_codeword(&self, index: usize) -> &[C64] {
        let stride = self.n * self.t;
        let flat = self.flat.as_ref().expect("codebook is not materialized");
        &flat[index * stride..(index + 1) * stride]
    }

    pub fn flat_codewords(&self) -> Option<&[C64]> {
        self.flat.as_deref()
    }

    /// The source's broadcast vector for codeword `index` when relays
    /// apply linear dispersion.
    pub fn source_vector(&self, index: u128) -> Option<Vec<C64>> {
        let d = self.dispersion.as_ref()?;
        let f = self.symbols(index);
        Some(
            (0..d.source_map.ncols())
                .map(|c| f.iter().enumerate().map(|(k, fk)| fk * d.source_map[(k, c)]).sum())
                .collect(),
        )
    }

    /// Expected `‖X‖_F²` over uniform symbols.
    pub fn average_energy(&self) -> f64 {
        self.constellation.average_energy() * self.basis.iter().map(frobenius_sq).sum::<f64>()
    }

    /// Sub-code on the given columns (time slots), preserving indices.
    pub(crate) fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() || cols.iter().any(|&c| c >= self.t) {
            return Err(Error::InvalidParameter(format!("bad column set {cols:?}")));
        }
        let basis = self.basis.iter().map(|d| d.select_columns(cols.iter())).collect();
        let mut cb = Codebook::from_basis(self.variant, self.constellation.clone(), basis, self.layers)?;
        cb.generator = self.generator.clone();
        cb.gamma = self.gamma;
        cb.row_labels = self.row_labels.clone();
        Ok(cb)
    }

    pub fn descriptor(&self) -> CodebookDescriptor {
        CodebookDescriptor {
            variant: self.variant,
            n: self.n,
            t: self.t,
            layers: self.layers,
            info_symbols: self.basis.len(),
            constellation: ConstellationDescriptor {
                kind: self.constellation.kind,
                size: self.constellation.size(),
            },
            gamma: self.gamma.map(|g| [g.re, g.im]),
            generator: self.generator.as_ref().map(|g| matrix_pairs(&g.matrix)),
            basis_tag: self.generator.as_ref().map(|g| g.basis_tag.clone()),
        }
    }
}

pub fn matrix_pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationDescriptor {
    pub kind: ConstellationKind,
    pub size: usize,
}

/// JSON-friendly summary of a codebook; complex entries are `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookDescriptor {
    pub variant: CodeVariant,
    pub n: usize,
    pub t: usize,
    pub layers: usize,
    pub info_symbols: usize,
    pub constellation: ConstellationDescriptor,
    pub gamma: Option<[f64; 2]>,
    pub generator: Option<Vec<Vec<[f64; 2]>>>,
    pub basis_tag: Option<String>,
}

fn diag_of_row(g: &CMat, row: usize) -> CMat {
    let n = g.ncols();
    CMat::from_fn(n, n, |r, c| if r == c { g[(row, c)] } else { C64::new(0.0, 0.0) })
}

/// Row `u` of every codeword as a `K × T` map of the information vector.
fn generic_dispersion(basis: &[CMat]) -> Dispersion {
    let k = basis.len();
    let (n, t) = basis[0].shape();
    Dispersion {
        source_map: CMat::identity(k, k),
        maps: (0..n)
            .map(|u| CMat::from_fn(k, t, |kk, c| basis[kk][(u, c)]))
            .collect(),
    }
}

pub fn uncoded(constellation: &Constellation) -> Result<Codebook> {
    Codebook::from_basis(CodeVariant::Uncoded, constellation.clone(), vec![CMat::identity(1, 1)], 1)
}

/// `1 × n` code `z = f · G`.
pub fn horizontally_restricted_code(n: usize, constellation: &Constellation) -> Result<Codebook> {
    let g = perfect_lattice_generator(n)?;
    let basis = (0..n).map(|k| g.matrix.rows(k, 1).into_owned()).collect();
    let mut cb = Codebook::from_basis(CodeVariant::HorizontalRestricted, constellation.clone(), basis, 1)?;
    cb.dispersion = Some(Dispersion {
        source_map: g.matrix.clone(),
        maps: vec![CMat::identity(n, n)],
    });
    cb.generator = Some(g);
    Ok(cb)
}

/// `n × n` code `diag(f · G)`.
pub fn diagonal_restricted_code(n: usize, constellation: &Constellation) -> Result<Codebook> {
    let g = perfect_lattice_generator(n)?;
    let basis = (0..n).map(|k| diag_of_row(&g.matrix, k)).collect();
    let mut cb = Codebook::from_basis(CodeVariant::DiagonalRestricted, constellation.clone(), basis, 1)?;
    cb.generator = Some(g);
    Ok(cb)
}

/// The diagonal code laid out over `2n − 1` time slots: row 1 carries the
/// whole layer `z` in slots `1..n`, row `i ≥ 2` carries `z_i` alone in
/// slot `n + i − 1`. Columns `{1, n+1, …, 2n−1}` are `diag(z)`.
pub fn slotted_diagonal_code(n: usize, constellation: &Constellation) -> Result<Codebook> {
    let g = perfect_lattice_generator(n)?;
    let zero = C64::new(0.0, 0.0);
    let basis = (0..n)
        .map(|k| {
            CMat::from_fn(n, 2 * n - 1, |r, c| match r {
                0 if c < n => g.matrix[(k, c)],
                r if r > 0 && c == n + r - 1 => g.matrix[(k, r)],
                _ => zero,
            })
        })
        .collect();
    let mut cb = Codebook::from_basis(CodeVariant::DiagonalRestricted, constellation.clone(), basis, 1)?;
    cb.generator = Some(g);
    Ok(cb)
}

/// `X = Σ_k f_k Γ^k`. The relays see `s = (f_{n−1}, …, f_0)`, which is
/// the last row of `X`, and row `i` is `s Γ^{n−i}`.
pub fn integral_restriction_code(n: usize, constellation: &Constellation) -> Result<Codebook> {
    integral_restriction_code_with_gamma(n, constellation, default_gamma(n))
}

pub fn integral_restriction_code_with_gamma(
    n: usize,
    constellation: &Constellation,
    gamma: C64,
) -> Result<Codebook> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if (gamma.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("integral restriction needs |gamma| = 1".into()));
    }
    let gm = gamma_matrix(n, gamma)?;
    let basis = (0..n).map(|k| gm.pow(k)).collect();
    let mut cb = Codebook::from_basis(CodeVariant::IntegralRestricted, constellation.clone(), basis, n)?;
    let reversal = CMat::from_fn(n, n, |k, c| {
        if k + c == n - 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    cb.dispersion = Some(Dispersion {
        source_map: reversal,
        maps: (1..=n).map(|i| gm.pow(n - i)).collect(),
    });
    cb.gamma = Some(gamma);
    Ok(cb)
}

/// `X = Σ_{j<m} Γ^j diag(f_j · G)`; layer `j` occupies symbols
/// `j·n .. (j+1)·n`.
pub fn m_layered_code(n: usize, m: usize, constellation: &Constellation) -> Result<Codebook> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("layers m = {m} outside 1..={n}")));
    }
    let g = perfect_lattice_generator(n)?;
    let gamma = default_gamma(n);
    let gm = gamma_matrix(n, gamma)?;
    let mut basis = Vec::with_capacity(m * n);
    for j in 0..m {
        let shift = gm.pow(j);
        for i in 0..n {
            basis.push(&shift * diag_of_row(&g.matrix, i));
        }
    }
    let variant = if m == n { CodeVariant::FullCda } else { CodeVariant::MLayered };
    let mut cb = Codebook::from_basis(variant, constellation.clone(), basis, m)?;
    if m == n {
        cb.dispersion = Some(generic_dispersion(cb.basis()));
    }
    cb.generator = Some(g);
    cb.gamma = Some(gamma);
    Ok(cb)
}

pub fn full_cda_code(n: usize, constellation: &Constellation) -> Result<Codebook> {
    m_layered_code(n, n, constellation)
}

/// Full CDA code whose codewords are sent column by column.
pub fn vectorized_cda_code(n: usize, constellation: &Constellation) -> Result<Codebook> {
    let mut cb = full_cda_code(n, constellation)?;
    cb.variant = CodeVariant::VectorizedCda;
    Ok(cb)
}

/// `[X^(1) … X^(k)]` from `k` independent `m × m` full CDA codewords.
pub fn horizontally_stacked_code(m: usize, k: usize, constellation: &Constellation) -> Result<Codebook> {
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one block".into()));
    }
    let block = full_cda_code(m, constellation)?;
    let mut basis = Vec::with_capacity(k * block.basis().len());
    for b in 0..k {
        for d in block.basis() {
            let mut wide = CMat::zeros(m, m * k);
            wide.view_mut((0, b * m), (m, m)).copy_from(d);
            basis.push(wide);
        }
    }
    let mut cb = Codebook::from_basis(CodeVariant::HorizontallyStacked, constellation.clone(), basis, m)?;
    cb.generator = block.generator.clone();
    cb.gamma = block.gamma;
    Ok(cb)
}

/// Keeps the listed rows (0-based); codeword indices are unchanged.
pub fn truncate_rows(codebook: &Codebook, keep: &[usize]) -> Result<Codebook> {
    if keep.is_empty() {
        return Err(Error::InvalidParameter("keep set is empty".into()));
    }
    if keep.iter().any(|&r| r >= codebook.n) {
        return Err(Error::InvalidParameter(format!("row set {keep:?} exceeds n = {}", codebook.n)));
    }
    let basis = codebook.basis().iter().map(|d| d.select_rows(keep.iter())).collect();
    let mut cb = Codebook::from_basis(codebook.variant, codebook.constellation.clone(), basis, codebook.layers)?;
    cb.generator = codebook.generator.clone();
    cb.gamma = codebook.gamma;
    cb.row_labels = keep.iter().map(|&r| codebook.row_labels[r]).collect();
    cb.dispersion = codebook.dispersion.as_ref().map(|d| Dispersion {
        source_map: d.source_map.clone(),
        maps: keep.iter().map(|&r| d.maps[r].clone()).collect(),
    });
    Ok(cb)
}

/// Checks a codebook's structural guarantees, returning the worst
/// unitarity defect among its generator and dispersion matrices.
pub fn check_unitarity(codebook: &Codebook) -> Result<f64> {
    let mut worst = codebook.generator.as_ref().map_or(0.0, |g| g.unitarity_defect());
    if let Some(d) = &codebook.dispersion {
        worst = worst.max(d.max_unitarity_defect());
    }
    if worst > UNITARY_TOL {
        return Err(Error::InvalidParameter(format!("unitarity defect {worst:.3e}")));
    }
    Ok(worst)
}
