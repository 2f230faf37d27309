//! Kernels on `[0, 1]²`, inhomogeneous random graphs built from them, and
//! the step-function machinery that compares the two.

mod embedding;
mod kernel;
mod points;
mod step;
mod approx;

pub use embedding::{he_algebra_check, HeAlgebraReport, Rect, StepEmbedding, DEFAULT_REFINEMENT};
pub use kernel::{Kernel, KernelKind, Multiplicity, SmoothKind, SpectralPoint, VALIDATION_GRID};
pub use points::{model_inhomogeneous, sample_inhomogeneous, sample_points, PointSample};
pub use step::{
    cut_norm_step, discretization_remainder, embed_from_grid, embed_matrix, graph_step_kernel, kernel_step_kernel,
    norm_sandwich_check, step_operator_norm, NormSandwich, StepKernel, CUT_NORM_MAX_ORDER,
};
pub use approx::{
    leading_eigenvalues, scaled_window_projector, theta_bound, thm6_assertion_check, MultiplicityOutcome,
    ProjectorOutcome, ApproxOptions, ApproxReport, ApproxTrial,
};
