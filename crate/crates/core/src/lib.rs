//! Numerical laboratory for the time-fractional diffusion equation
//! `∂_t^α u + A u = 0` on `(0, L) × (0, T)` with Dirichlet data `u = g` on the
//! two boundary points and zero initial state.
//!
//! Weak solutions for rough `g` are built by transposition against the
//! backward (Riemann–Liouville) dual problem; regular solutions by lifting.
//! The [`norms`] module measures everything in fractional space-time Sobolev
//! norms so that the regularity estimates can be checked as ratio bands.

pub mod dual;
pub mod elliptic;
pub mod error;
pub mod field;
pub mod forward;
pub mod fracops;
pub mod harness;
pub mod linalg;
pub mod norms;
pub mod quadrature;
pub mod special;
pub mod transposition;

pub use error::{Error, Result};
pub use field::{BoundaryData, SpaceTimeField};
pub use fracops::{TimeGrid, TimeSeries};
pub use elliptic::{Coefficients, EigenBasis, SpatialGrid};
