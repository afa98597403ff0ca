//! Truncated Fock-space engine for a single bath mode.
//!
//! Operators are obtained by exponentiating their anti-Hermitian generators
//! at a padded dimension and cropping, so truncation leakage is measured
//! rather than assumed. States are checked for tail mass before they are
//! returned, and entropies come from a complex Jacobi eigensolver.

mod eigen;
mod matrix;
mod ops;
mod state;
mod wigner;

use thiserror::Error;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, EigenDecomposition};
pub use matrix::FockMatrix;
pub use ops::{
    annihilation_op, displacement_op, displacement_op_with, number_op, padded_dim, squeeze_op, squeeze_op_with,
    thermal_occupation, thermal_state, thermal_tail, TruncatedUnitary, LEAKAGE_TOL,
};
pub use state::{
    approx_entropy_rate_mode, auto_dim, entropy_from_eigenvalues, entropy_rate_fd, mode_state, mode_state_auto,
    mode_state_with, moments, von_neumann_entropy, Moments, AUTO_DIM_CAP, AUTO_DIM_START, EIGEN_FLOOR,
    STEP_HALVING_ABS, STEP_HALVING_REL,
};
pub use wigner::{
    gaussian_branch_from_params, mixture_moments, mode_branches, wigner_grid, GaussianBranch, PhaseGrid, WignerGrid,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("dimension {dim} is below the minimum {min}")]
    Dimension { dim: usize, min: usize },
    #[error("invalid {name} = {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("{0} is not finite")]
    NonFinite(&'static str),
    #[error("{what} leaks {leakage:e} beyond dimension {dim}; retry with dim ≥ {suggested_dim}")]
    Truncation {
        what: &'static str,
        leakage: f64,
        dim: usize,
        suggested_dim: usize,
    },
    #[error("truncation still leaks {leakage:e} at the dimension cap {cap}")]
    DimensionCap { cap: usize, leakage: f64 },
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    Convergence { sweeps: usize, off_norm: f64 },
    #[error("finite-difference rate failed step halving: {coarse:e} (h) vs {fine:e} (h/2)")]
    StepSize { coarse: f64, fine: f64 },
    #[error("semi-Born entropy rate diverges at T = {0}")]
    Divergence(f64),
    #[error("covariance is not positive definite (det {0:e})")]
    Covariance(f64),
    #[error("branch weights sum to {0}, not 1")]
    Weights(f64),
    #[error("no Gaussian branches supplied")]
    NoBranches,
}
