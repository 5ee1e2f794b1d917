//! Dense linear algebra on complex matrices: decompositions, subspaces,
//! projections and the CMX text format.

pub mod basis;
pub mod cmx;
pub mod decomp;
pub mod matrix;
pub mod support;

pub use basis::{
    angle_between, augment_subspace, cross_residual_norm, subspace_distance, GramSchmidt,
    OrthonormalBasis,
};
pub use decomp::{
    dominant_subspace, hermitian_eig_desc, numerical_rank, pseudo_inverse, singular_values,
    spectral_norm, thin_svd,
};
pub use matrix::{Field, Matrix, C64};
pub use support::{support_match, SupportSet};
