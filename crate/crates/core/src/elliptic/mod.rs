//! Elliptic problems in the truncated half-space.
//!
//! The streamfunction splits as `Psi = Psi_1 + Psi_2`: a harmonic part carrying
//! the surface Neumann data and an interior part with homogeneous Neumann data.

mod exponents;
mod gradient;
mod split;
pub(crate) mod vertical;

pub use exponents::{commutator_threshold, neumann_lift, sobolev_lift, trace_exponent};
pub use gradient::{boundary_trace, gradient, hodge_project, vector_inner, VectorField3D};
pub use split::{psi1_at, psi1_dz_at, psi2_surface, solve_neumann_fd, solve_psi1, solve_psi2, EllipticSplit};
