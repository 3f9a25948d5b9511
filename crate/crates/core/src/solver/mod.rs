//! Regularized reconstruction: Tikhonov by conjugate gradients, l1 / TV /
//! phase-corrected TV by complex ADMM, and optimality diagnostics.

pub mod admm;
pub mod demo;
pub mod diagnostics;
pub mod operators;
pub mod tikhonov;

pub use admm::{
    admm_continue, admm_l1, lagrangian, lagrangian_gradient, objective, shrink, spectral_step, SolverConfig,
    SolverState, StepRule,
};
pub use diagnostics::{optimality_residuals, subgradient_certificate, Residuals};
pub use operators::{
    adjoint_mismatch, compose, difference_operator, fourier_samples, gradient_2d, operator_norm_sq,
    partial_fourier, phase_diag, random_rows, sar_operator, Boundary, Dense, Identity, LinearOperator,
};
pub use tikhonov::tikhonov_solve;
