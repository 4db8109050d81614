//! Littlewood–Paley theory on the torus grid: dyadic blocks, Besov and
//! Sobolev norms, Bony's decomposition, commutators, and empirical
//! inequality constants.

pub mod besov;
pub mod bony;
pub mod constants;
pub mod filter;

pub use besov::{besov_norm, block_norms, sequence_norm, sobolev_norm_direct, BesovIndex};
pub use bony::{commutator_block, paraproduct, paraproduct_term, remainder};
pub use constants::{
    commutator_norm, empirical_constant, ConstantReport, ConstantRow, FieldSampler, Inequality,
    InequalityId,
};
pub use filter::{
    build_filter_bank, chi, dyadic_block, low_pass, phi, smooth_step, LPDecomposition, LPFilterBank,
};
