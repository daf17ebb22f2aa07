//! Oversampled least-squares collocation for boundary integral equations on
//! closed curves in the plane.
//!
//! Layout:
//! - [`geometry`]: parametrized boundary curves.
//! - [`spectral`]: Fourier coefficients, Sobolev norms and pairings.
//! - [`basis`]: periodic splines, the ψ_μ basis and H^s projections.
//! - [`operators`]: Helmholtz layer operators and the pseudo-differential model.
//! - [`colloc`]: collocation grids and discrete inner products.
//! - [`solver`]: assembly and the least-squares, modified and Galerkin solves.
//! - [`oracle`]: closed-form error references.
//! - [`harness`]: configuration-driven convergence studies.

pub mod basis;
pub mod colloc;
pub mod geometry;
pub mod harness;
pub mod operators;
pub mod oracle;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod spectral;

pub use num_complex::Complex64;

/// Crate version, echoed into emitted JSON.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
