//! Numerical kernels shared by the vortex laboratory crates.
//!
//! Everything in here is generic infrastructure: an embedded Runge-Kutta
//! integrator with dense output, adaptive Gauss-Kronrod quadrature, Brent
//! root finding, monotone cubic interpolation, finite-difference stencil
//! weights on arbitrary nodes, symmetric tridiagonal (pencil) eigensolvers,
//! and least-squares line fits for measured scaling exponents.

pub mod fit;
pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod stencil;
pub mod tridiag;
