//! Spotlight SAR toolkit: phase-history simulation from synthetic complex
//! scenes, image formation (matched filter, backprojection, gridding), the
//! analytic convolution kernels behind those images, random-phase power
//! statistics, and regularized reconstruction by complex ADMM.
//!
//! Conventions shared by every module:
//! - pixel `(j1, j2)` of an `N x N` image sits at `(j1 h, j2 h)`, with
//!   `j1, j2` in `-N/2 .. N/2 - 1`;
//! - phase-history samples are stored frequency-major: all frequencies of
//!   the first azimuth, then the second, and so on;
//! - complex inner products are `<x, y> = sum_j conj(x_j) y_j`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forward;
pub mod fourier;
pub mod geometry;
pub mod imaging;
pub mod io;
pub mod kernels;
pub mod phasestats;
pub mod rng;
pub mod scene;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
