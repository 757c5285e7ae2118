//! Solvers for the periodic Benjamin equation
//!
//! ```text
//! u_t + alpha u_x + beta u u_x - gamma H u_xx - delta u_xxx = 0
//! ```
//!
//! on `[-L, L]`, where `H` is the periodic Hilbert transform. Two time
//! steppers are provided: a hybrid finite-element/spectral scheme (periodic
//! B-spline Galerkin space, implicit Runge-Kutta in time, spectral
//! evaluation of the nonlocal term) and a fully spectral integrating-factor
//! scheme with explicit RK4. A Newton/conjugate-gradient continuation
//! solver generates solitary-wave profiles used as initial data.

pub mod banded;
pub mod diagnostics;
pub mod equation;
pub mod error;
pub mod fourier;
pub mod config;
pub mod hybrid;
pub mod presets;
pub mod profile;
pub mod runner;
pub mod spectral;
pub mod spline;
pub mod waves;

pub use equation::EquationParams;
pub use error::{Result, SolverError};
