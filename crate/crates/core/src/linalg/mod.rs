//! Exact linear and affine algebra over `F_p`.
//!
//! Subspaces are kept in reduced row-echelon form, so two subspaces are
//! equal exactly when their bases are. Orthogonality is always with respect
//! to the dot form `x · y = Σ x_i y_i`.

mod affine;
mod matrix;
mod subspace;
mod vector;

pub use affine::{solve_affine_from_points, AffineEndo};
pub use matrix::Matrix;
pub use subspace::{greedy_avoiding_subspace, Coset, Subspace};
pub use vector::{Ambient, GVector, MAX_GROUP_SIZE};

pub(crate) use vector::{add_mod, dot_slices, sub_mod};
