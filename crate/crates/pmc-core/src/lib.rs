//! Numerical kernel for prescribed-mean-curvature Killing graphs over
//! rotationally symmetric Cartan-Hadamard model manifolds.
//!
//! The crate is organized around the warped product `M x_rho R`: a model base
//! with metric `dr^2 + xi^2(r) dtheta^2` and a radial warping `rho = |X|`,
//! where `X` is the Killing field generating the graph direction. Graph
//! heights `u` solve
//!
//! ```text
//! div(grad u / W) + <grad log rho, grad u / W> = n H,
//! W = sqrt(rho^-2 + |grad u|^2).
//! ```
//!
//! Modules:
//!
//! - [`geometry`]: curvature profiles, Jacobi-field integration, warping
//!   functions, Killing-cylinder curvature, and hypothesis validation.
//! - [`radial`]: flux first integral and quadrature solutions for
//!   rotationally symmetric data, plus the global `u_plus` barrier.
//! - [`grid`]: polar grids over geodesic balls and discrete fields.
//! - [`solver`]: conservative finite-difference discretization, damped
//!   Newton with continuation, banded elimination, and the exhaustion driver.
//! - [`barriers`]: the `V` barrier, the boundary barrier `psi` with its
//!   smoothed direction field, and the finite-ball height barrier.
//! - [`analysis`]: quantitative interior gradient bound and non-existence
//!   condition probes.
//!
//! The crate is `no_std` (with `alloc`); all floating-point transcendentals
//! route through `libm` so results are bit-identical across hosts.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod barriers;
pub mod geometry;
pub mod grid;
pub mod quad;
pub mod radial;
pub mod report;
pub mod solver;

pub use geometry::{CurvatureProfile, ModelGeometry, Radial, RadialFunction};
pub use grid::{DiscreteField, PolarGrid};
pub use report::{BoundReport, ValidationReport, VerificationReport};
