//! Constellations, perfect-code generators and the code variants built on
//! them.

mod codebook;
mod constellation;
mod generator;
mod ops;

pub use codebook::{
    check_unitarity, diagonal_restricted_code, full_cda_code, horizontally_restricted_code,
    horizontally_stacked_code, integral_restriction_code, integral_restriction_code_with_gamma,
    m_layered_code, matrix_pairs, slotted_diagonal_code, truncate_rows, uncoded,
    vectorized_cda_code, CodeVariant, Codebook, CodebookDescriptor, ConstellationDescriptor,
    Dispersion, MATERIALIZE_LIMIT,
};
pub use constellation::{make_constellation, Constellation, ConstellationKind};
pub use generator::{
    default_gamma, gamma_matrix, perfect_lattice_generator, GammaMatrix, LatticeGenerator,
    UNITARY_TOL,
};
pub use ops::{
    code_metrics, power_normalizer, reshape_columns, truncation_check, vectorize_columns, CodeMetrics, TruncationReport,
};

/// Tolerance on non-vanishing product distances at unit lattice scale.
pub const NVD_TOL: f64 = 1e-9;

pub fn qam(m_squared: usize) -> crate::Result<Constellation> {
    make_constellation(ConstellationKind::Qam, m_squared)
}
