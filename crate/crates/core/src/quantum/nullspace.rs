//! Null spaces of complex-linear functionals restricted to Hermitian operators.
//!
//! A Hermitian operator on dimension `d` is parametrized by `d²` real numbers:
//! the `d` diagonal entries and the real and imaginary parts of the `d(d−1)/2`
//! upper off-diagonal entries, scaled so that the corresponding basis is
//! orthonormal under the trace inner product. A functional `E ↦ ⟨x|E|y⟩` then
//! contributes two real rows (its real and imaginary parts) to a linear system
//! whose null space is read off an SVD.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::ket::Ket;
use super::operator::{CMatrix, HermitianOp};
use crate::error::{Error, Result};
use crate::tol;

/// The functional `E ↦ ⟨x|E|y⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    pub x: Ket,
    pub y: Ket,
}

impl Functional {
    pub fn new(x: Ket, y: Ket) -> Self {
        Functional { x, y }
    }

    pub fn eval(&self, e: &HermitianOp) -> Complex64 {
        e.sandwich(&self.x, &self.y)
    }
}

/// Trace-orthonormal basis of the real space of Hermitian `dim × dim` operators.
///
/// Order: diagonal units, then for each `j < l` the symmetric element
/// `(|j⟩⟨l| + |l⟩⟨j|)/√2` followed by the antisymmetric `i(|j⟩⟨l| − |l⟩⟨j|)/√2`.
pub fn hermitian_basis(dim: usize) -> Vec<HermitianOp> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        let mut m = CMatrix::zeros(dim, dim);
        m[(j, j)] = Complex64::new(1.0, 0.0);
        basis.push(HermitianOp::hermitian_part(&m));
    }
    for j in 0..dim {
        for l in (j + 1)..dim {
            let mut sym = CMatrix::zeros(dim, dim);
            sym[(j, l)] = Complex64::new(s, 0.0);
            sym[(l, j)] = Complex64::new(s, 0.0);
            basis.push(HermitianOp::hermitian_part(&sym));
            let mut anti = CMatrix::zeros(dim, dim);
            anti[(j, l)] = Complex64::new(0.0, s);
            anti[(l, j)] = Complex64::new(0.0, -s);
            basis.push(HermitianOp::hermitian_part(&anti));
        }
    }
    basis
}

/// Coordinates of `e` in [`hermitian_basis`].
pub fn to_coordinates(e: &HermitianOp) -> DVector<f64> {
    let basis = hermitian_basis(e.dim());
    DVector::from_iterator(basis.len(), basis.iter().map(|b| b.trace_inner(e)))
}

/// Operator with the given coordinates in [`hermitian_basis`].
pub fn from_coordinates(dim: usize, coords: &[f64]) -> HermitianOp {
    let basis = hermitian_basis(dim);
    let mut m = CMatrix::zeros(dim, dim);
    for (b, &c) in basis.iter().zip(coords) {
        m += b.matrix().scale(c);
    }
    HermitianOp::hermitian_part(&m)
}

/// Orthogonal projection (trace inner product) of `e` onto the span of an
/// orthonormal family.
pub fn project_onto(e: &HermitianOp, orthonormal: &[HermitianOp]) -> HermitianOp {
    orthonormal
        .iter()
        .fold(HermitianOp::zeros(e.dim()), |acc, b| acc.add(&b.scale(b.trace_inner(e))))
}

/// Real constraint matrix: two rows per functional, one column per basis element.
fn constraint_matrix(constraints: &[Functional], basis: &[HermitianOp]) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(2 * constraints.len(), basis.len());
    for (r, f) in constraints.iter().enumerate() {
        for (c, b) in basis.iter().enumerate() {
            let v = f.eval(b);
            a[(2 * r, c)] = v.re;
            a[(2 * r + 1, c)] = v.im;
        }
    }
    a
}

/// Trace-orthonormal basis of the Hermitian operators annihilated by every functional.
///
/// Singular values at or below `1e-10` relative to the largest one span the
/// null space. An empty constraint list yields the full `dim²`-dimensional basis.
pub fn hermitian_nullspace(constraints: &[Functional], dim: usize) -> Result<Vec<HermitianOp>> {
    if dim == 0 {
        return Err(Error::OutOfRange {
            what: "dim",
            value: 0.0,
        });
    }
    for f in constraints {
        for k in [&f.x, &f.y] {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
        }
    }
    let basis = hermitian_basis(dim);
    if constraints.is_empty() {
        return Ok(basis);
    }
    let a = constraint_matrix(constraints, &basis);
    Ok(real_nullspace(&a)
        .iter()
        .map(|v| from_coordinates(dim, v.as_slice()))
        .collect())
}

/// Orthonormal basis of `{x : A x = 0}`, cutting singular values at `1e-10`
/// relative to the largest. A zero matrix yields the standard basis.
pub fn real_nullspace(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = a.ncols();
    // pad with zero rows so the SVD returns a full n×n right factor
    let rows = a.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);

    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let cut = tol::NULLSPACE * sigma_max;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &sigma)| sigma_max == 0.0 || sigma <= cut)
        .map(|(idx, _)| v_t.row(idx).transpose())
        .collect()
}

/// Largest `|f(E)|` over the functionals and operators given.
pub fn max_constraint_residual(constraints: &[Functional], ops: &[HermitianOp]) -> f64 {
    ops.iter()
        .flat_map(|e| constraints.iter().map(move |f| f.eval(e).norm()))
        .fold(0.0, f64::max)
}
