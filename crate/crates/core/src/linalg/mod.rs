//! Dense Hermitian linear algebra shared by the frame routines.

mod complement;
mod eig;
mod matrix;
mod norms;

pub use complement::{orthonormal_complement_basis, ISOMETRY_TOLERANCE};
pub use eig::{
    hermitian_eig, spectral_function, spectral_function_of, Power, Spectrum, EIG_TOLERANCE,
    HERMITIAN_TOLERANCE, MAX_SWEEPS, RANK_TOLERANCE,
};
pub use matrix::{inner, norm, ComplexMatrix, C64};
pub use norms::{operator_norm, schur_norm_bound};
