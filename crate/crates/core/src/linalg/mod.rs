//! Dense real symmetric linear algebra.

mod eigen;
mod matrix;
mod ops;

pub use eigen::{eig_sym, eig_tolerance, eigenvalues, SpectralDecomposition};
pub use matrix::{DenseMatrix, SymmetricMatrix};
pub use ops::{
    eigen_range_projector, golden_thompson_report, interlacing_report, lambda_max, lambda_min,
    matrix_exp, psd_dominates, spectral_norm, GoldenThompson, Interlacing, Projector,
};
