//! Multivariate polynomial interpolation on non-tensorial grids.
//!
//! Interpolants live in spaces spanned by monomials over a downward-closed
//! multi-index set, are stored in Newton form and evaluated or differentiated
//! without ever forming a Vandermonde matrix.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod io;
pub mod multi_index;
pub mod newton;

pub use error::{Error, Result};
pub use grid::{
    build_grid, build_uniform_grid, chebyshev_lobatto, lcl_axis, leja_order, leja_points,
    vandermonde_unisolvence_check, NodeFamily, Nodes1D, UnisolventGrid,
};
pub use multi_index::{make_lp_set, LpDegree, MultiIndex, MultiIndexSet};
pub use newton::{
    divided_differences, eval_derivative, eval_iterative, eval_recursive, interpolate,
    lagrange_basis_in_newton, newton_to_lagrange, LagrangeCoefficients, NewtonPolynomial,
};
