//! Uniform grids, scalar fields, finite-difference calculus and the double-well potential.

mod grid;
mod interp;
mod io;
mod potential;
mod spectral;
mod stencil;

pub use grid::{Boundary, GridSpec, ScalarField};
pub(crate) use grid::kahan_sum;
pub use interp::{sample, Interp};
pub use io::{read_snapshot, write_snapshot, SnapshotMeta};
pub use potential::{potential_eval, w, w1, w2, w3};
pub use spectral::{Dst2, SpectralPlan};
pub use stencil::{
    derivatives, fd_gradient, fd_hessian, fd_laplacian, DerivativeScheme, Derivatives, Hessian,
};
