use std::collections::HashSet;

use coopdiv::codes::{
    check_unitarity, code_metrics, default_gamma, diagonal_restricted_code, full_cda_code, gamma_matrix,
    horizontally_restricted_code, horizontally_stacked_code, integral_restriction_code, m_layered_code, matrix_pairs,
    perfect_lattice_generator, qam, slotted_diagonal_code, uncoded, vectorized_cda_code, CodeVariant, Codebook,
    NVD_TOL, UNITARY_TOL,
};
use coopdiv::linalg::unitarity_defect;
use serde_json::{json, Value};

use crate::report::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Variant {
    Uncoded,
    Horizontal,
    Diagonal,
    SlottedDiagonal,
    Integral,
    Layered,
    FullCda,
    Vectorized,
    Stacked,
    /// The `n × n` shift matrix `Γ` alone.
    Gamma,
    /// The unitary lattice generator alone.
    Generator,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CodeArgs {
    #[arg(long, value_enum)]
    pub variant: Variant,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub qam: usize,
    /// Layers of the layered code.
    #[arg(long, default_value_t = 1)]
    pub layers: usize,
    /// Blocks of the stacked code.
    #[arg(long, default_value_t = 2)]
    pub blocks: usize,
    /// Pair budget for the metric scan; exhaustive when the code has fewer pairs.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_pairs: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn build_codebook(a: &CodeArgs) -> coopdiv::Result<Codebook> {
    let q = qam(a.qam)?;
    match a.variant {
        Variant::Uncoded => uncoded(&q),
        Variant::Horizontal => horizontally_restricted_code(a.n, &q),
        Variant::Diagonal => diagonal_restricted_code(a.n, &q),
        Variant::SlottedDiagonal => slotted_diagonal_code(a.n, &q),
        Variant::Integral => integral_restriction_code(a.n, &q),
        Variant::Layered => m_layered_code(a.n, a.layers, &q),
        Variant::FullCda => full_cda_code(a.n, &q),
        Variant::Vectorized => vectorized_cda_code(a.n, &q),
        Variant::Stacked => horizontally_stacked_code(a.n, a.blocks, &q),
        Variant::Gamma | Variant::Generator => unreachable!("matrix variants have no codebook"),
    }
}

pub fn build(a: &CodeArgs) -> coopdiv::Result<Value> {
    Ok(match a.variant {
        Variant::Gamma => {
            // Γ is tied to the perfect code of the same dimension.
            perfect_lattice_generator(a.n)?;
            let g = gamma_matrix(a.n, default_gamma(a.n))?;
            json!({ "n": g.n, "gamma": [g.gamma.re, g.gamma.im], "matrix": matrix_pairs(&g.matrix) })
        }
        Variant::Generator => {
            let g = perfect_lattice_generator(a.n)?;
            json!({ "n": g.n, "basis_tag": g.basis_tag, "matrix": matrix_pairs(&g.matrix) })
        }
        _ => {
            let cb = build_codebook(a)?;
            let mut v = serde_json::to_value(cb.descriptor()).expect("descriptor serializes");
            v["codewords"] = json!(cb.len().to_string());
            v
        }
    })
}

pub fn metrics(a: &CodeArgs) -> coopdiv::Result<Value> {
    let cb = build_codebook(a)?;
    let m = code_metrics(&cb, a.max_pairs, a.seed)?;
    Ok(serde_json::to_value(m).expect("metrics serialize"))
}

fn quantized(x: &coopdiv::linalg::CMat) -> Vec<(i64, i64)> {
    x.iter().map(|z| ((z.re * 1e8).round() as i64, (z.im * 1e8).round() as i64)).collect()
}

/// Unitarity, non-vanishing determinant and cardinality of one code.
pub fn verify(a: &CodeArgs) -> coopdiv::Result<Table> {
    let mut t = Table::default();
    if matches!(a.variant, Variant::Gamma | Variant::Generator) {
        let (name, m) = if a.variant == Variant::Gamma {
            perfect_lattice_generator(a.n)?;
            ("gamma", gamma_matrix(a.n, default_gamma(a.n))?.matrix)
        } else {
            ("generator", perfect_lattice_generator(a.n)?.matrix)
        };
        let d = unitarity_defect(&m);
        t.row(format!("{name} unitarity n={}", a.n), d <= UNITARY_TOL, format!("defect {d:.2e}"));
        return Ok(t);
    }
    let cb = build_codebook(a)?;
    let label = format!("{:?} n={} {}-QAM", a.variant, a.n, a.qam);

    match check_unitarity(&cb) {
        Ok(d) => t.row(format!("{label}: unitarity"), true, format!("defect {d:.2e}")),
        Err(e) => t.row(format!("{label}: unitarity"), false, e.to_string()),
    }

    let m = code_metrics(&cb, a.max_pairs, a.seed)?;
    // Diagonal and 1 x n codes carry the unit-scale product distance bound;
    // the rest only need full rank differences.
    let floor = match cb.variant {
        CodeVariant::DiagonalRestricted | CodeVariant::HorizontalRestricted => 1.0 - NVD_TOL,
        _ => NVD_TOL,
    };
    let scan = if m.exhaustive { "exhaustive" } else { "sampled" };
    t.row(
        format!("{label}: min product distance"),
        m.min_product_distance >= floor,
        format!("{:.6} over {} pairs ({scan}), floor {floor:.3e}", m.min_product_distance, m.pairs_scanned),
    );

    let expected = (cb.constellation.size() as u128).checked_pow(cb.info_symbols_per_matrix() as u32);
    let mut ok = expected == Some(cb.len());
    let mut detail = format!("{} codewords", cb.len());
    if ok && cb.len() <= 1 << 16 {
        let mut seen = HashSet::new();
        ok = (0..cb.len()).all(|i| seen.insert(quantized(&cb.codeword(i))));
        detail.push_str(", all distinct");
    }
    t.row(format!("{label}: cardinality"), ok, detail);
    Ok(t)
}
