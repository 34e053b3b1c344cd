use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::ket::Ket;
use crate::error::{Error, Result};
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;

/// A Hermitian operator on a local space.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOp(CMatrix);

impl HermitianOp {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let residual = max_abs(&(&m - m.adjoint()));
        if residual > tol::INVARIANT {
            return Err(Error::NotHermitian { residual });
        }
        Ok(HermitianOp(m))
    }

    /// Takes the Hermitian part `(m + m†)/2`.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        HermitianOp((m + m.adjoint()).scale(0.5))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOp(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOp(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// `⟨x|E|y⟩`.
    pub fn sandwich(&self, x: &Ket, y: &Ket) -> Complex64 {
        x.amps().dotc(&(&self.0 * y.amps()))
    }

    /// `⟨x|E|x⟩`, real for Hermitian `E`.
    pub fn expectation(&self, x: &Ket) -> f64 {
        self.sandwich(x, x).re
    }

    /// Hilbert-Schmidt inner product `tr(A B)` (real for Hermitian operands).
    pub fn trace_inner(&self, other: &HermitianOp) -> f64 {
        self.0
            .iter()
            .zip(other.0.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianOp(self.0.scale(s))
    }

    pub fn add(&self, other: &HermitianOp) -> Self {
        HermitianOp(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianOp) -> Self {
        HermitianOp(&self.0 - &other.0)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Distance from the closest multiple of the identity, relative to the
    /// operator's Frobenius norm.
    pub fn identity_residual(&self) -> f64 {
        let n = self.frobenius_norm();
        if n == 0.0 {
            return 0.0;
        }
        let d = self.dim() as f64;
        let shifted = &self.0 - CMatrix::identity(self.dim(), self.dim()).scale(self.trace() / d);
        shifted.norm() / n
    }

    /// Applies a real function to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let eig = SymmetricEigen::new(self.0.clone());
        let v = &eig.eigenvectors;
        let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(f(x), 0.0)));
        v * d * v.adjoint()
    }

    /// Unitary conjugation `U E U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        HermitianOp::hermitian_part(&(u * &self.0 * u.adjoint()))
    }
}

/// A positive operator-valued measure on one local space.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOp>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOp>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::InvalidProtocol("POVM has no elements".into()));
        };
        let dim = first.dim();
        let mut sum = HermitianOp::zeros(dim);
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            let min_eigenvalue = e.eigenvalues()[0];
            if min_eigenvalue < tol::PSD_EIGENVALUE {
                return Err(Error::NotPositive { min_eigenvalue });
            }
            sum = sum.add(e);
        }
        let residual = operator_norm(&(sum.matrix() - CMatrix::identity(dim, dim)));
        if residual > tol::RESIDUAL {
            return Err(Error::Incomplete { residual });
        }
        Ok(Povm { elements })
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn elements(&self) -> &[HermitianOp] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Outcome probabilities `⟨s|E_k|s⟩` for a normalized ket.
    pub fn probabilities(&self, s: &Ket) -> Vec<f64> {
        self.elements.iter().map(|e| e.expectation(s)).collect()
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Unitary factor `U` of the polar decomposition `M = U |M|`.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    u * v_t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermitianOp::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sandwich_and_trace_inner() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let e = HermitianOp::new(m).unwrap();
        let k0 = Ket::basis(2, 0);
        let k1 = Ket::basis(2, 1);
        assert_eq!(e.sandwich(&k0, &k1), c(0.0, 1.0));
        assert_eq!(e.expectation(&k1), 3.0);
        // tr(E E) = 4 + 9 + 1 + 1
        assert!((e.trace_inner(&e) - 15.0).abs() < 1e-14);
        assert!((e.frobenius_norm().powi(2) - 15.0).abs() < 1e-13);
    }

    #[test]
    fn identity_residual_detects_non_scalar() {
        assert!(HermitianOp::identity(3).scale(0.7).identity_residual() < 1e-15);
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        assert!(HermitianOp::new(m).unwrap().identity_residual() > 0.1);
    }

    #[test]
    fn povm_rejects_negative_and_incomplete() {
        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        let rest = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-0.5, 0.0), c(1.5, 0.0)]));
        let r = Povm::new(vec![HermitianOp::new(neg).unwrap(), HermitianOp::new(rest).unwrap()]);
        assert!(matches!(r, Err(Error::NotPositive { .. })));
        let r = Povm::new(vec![HermitianOp::identity(2).scale(0.5)]);
        assert!(matches!(r, Err(Error::Incomplete { .. })));
    }

    #[test]
    fn polar_factor_is_unitary() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.2, 0.0), c(-0.3, 0.1), c(0.7, -0.4)]);
        let u = polar_unitary(&m);
        let residual = max_abs(&(u.adjoint() * &u - CMatrix::identity(2, 2)));
        assert!(residual < 1e-12);
    }
}
