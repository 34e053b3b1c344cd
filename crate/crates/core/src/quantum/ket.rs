use std::fmt;
use std::ops::Index;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// A pure state vector over a small local basis.
///
/// Most kets are normalized; unnormalized branch vectors are built with
/// [`Ket::unnormalized`].
#[derive(Clone, Debug, PartialEq)]
pub struct Ket(DVector<Complex64>);

impl Ket {
    /// Builds a normalized ket, failing if the squared amplitudes do not sum to 1.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let k = Ket(DVector::from_vec(amps));
        let residual = (k.norm() - 1.0).abs();
        if k.dim() == 0 || residual > tol::INVARIANT {
            return Err(Error::NotNormalized { label: 0, residual });
        }
        Ok(k)
    }

    /// Builds a ket from real amplitudes, normalizing them.
    pub fn from_real(amps: &[f64]) -> Self {
        Ket::normalize(DVector::from_iterator(
            amps.len(),
            amps.iter().map(|&a| Complex64::new(a, 0.0)),
        ))
    }

    pub fn unnormalized(amps: DVector<Complex64>) -> Self {
        Ket(amps)
    }

    pub fn normalize(amps: DVector<Complex64>) -> Self {
        let n = amps.norm();
        Ket(amps.unscale(n))
    }

    /// Computational basis state `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ket(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn amps(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<Complex64> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.0.iter()
    }

    /// Multiplies by a global phase so the first nonzero amplitude is real positive.
    pub fn canonical_phase(&self) -> Self {
        match self.0.iter().find(|a| a.norm() > tol::INVARIANT) {
            Some(first) => {
                let phase = first.conj() / first.norm();
                Ket(self.0.map(|a| a * phase))
            }
            None => self.clone(),
        }
    }

    /// Largest entrywise modulus difference between two kets of equal dimension.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Ket {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.6}{:+.6}i", a.re, a.im)?;
        }
        write!(f, "]")
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner_product(a: &Ket, b: &Ket) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.0.dotc(&b.0))
}
