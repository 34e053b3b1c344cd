//! Finite-dimensional complex linear algebra and local measurement primitives.

mod ket;
mod kraus;
mod nullspace;
mod operator;

pub use ket::{inner_product, Ket};
pub use kraus::{
    apply_kraus, povm_from_kraus, random_kraus_set, random_unitary, BranchDecomposition, KrausSet,
};
pub use nullspace::{
    from_coordinates, hermitian_basis, hermitian_nullspace, max_constraint_residual, project_onto,
    real_nullspace, to_coordinates, Functional,
};
pub use operator::{operator_norm, polar_unitary, CMatrix, HermitianOp, Povm};
