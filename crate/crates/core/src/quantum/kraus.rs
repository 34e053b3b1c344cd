use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ket::Ket;
use super::operator::{operator_norm, CMatrix, HermitianOp, Povm};
use crate::error::{Error, Result};
use crate::tol;

const MAX_DRAW_RETRIES: u32 = 100;

/// Kraus representation `{M_k}` of a local measurement, with `Σ M_k†M_k = I`.
///
/// Any measuring device coupled to the local system is absorbed here: the
/// operators act on the local space directly and `M_k|φ⟩` is the (unnormalized)
/// branch vector for outcome `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<CMatrix>,
}

/// One branch of a measured state: `M_k|φ⟩ = amplitude · state`.
///
/// `state` is `None` when the amplitude is below the zero cut.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchDecomposition {
    pub outcome: usize,
    pub amplitude: f64,
    pub state: Option<Ket>,
}

impl BranchDecomposition {
    /// Splits a branch vector into a nonnegative amplitude and a unit ket.
    pub fn from_vector(outcome: usize, v: DVector<Complex64>) -> Self {
        let amplitude = v.norm();
        let state = (amplitude > tol::ZERO_AMPLITUDE).then(|| Ket::unnormalized(v.unscale(amplitude)));
        BranchDecomposition {
            outcome,
            amplitude,
            state,
        }
    }

    /// Squared amplitude, i.e. the outcome probability.
    pub fn weight(&self) -> f64 {
        self.amplitude * self.amplitude
    }

    /// `α_i α_j ⟨w_i|w_j⟩`, zero when either branch vanishes.
    pub fn weighted_overlap(&self, other: &BranchDecomposition) -> Complex64 {
        match (&self.state, &other.state) {
            (Some(a), Some(b)) => a.amps().dotc(b.amps()) * (self.amplitude * other.amplitude),
            _ => Complex64::new(0.0, 0.0),
        }
    }
}

impl KrausSet {
    /// Validates shapes and completeness.
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = check_shapes(&ops)?;
        let set = KrausSet { dim, ops };
        let residual = set.completeness_residual();
        if residual > tol::RESIDUAL {
            return Err(Error::Incomplete { residual });
        }
        Ok(set)
    }

    /// Rescales arbitrary operators to completeness: `M_k ↦ M_k S^{-1/2}` with
    /// `S = Σ M_k†M_k`. Fails when `S` is singular below the invariant cut.
    pub fn normalized(ops: Vec<CMatrix>) -> Result<Self> {
        let dim = check_shapes(&ops)?;
        let s = completeness_sum(&ops, dim);
        let min_eigenvalue = s.eigenvalues()[0];
        if min_eigenvalue < tol::INVARIANT {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let inv_sqrt = s.map_spectrum(|x| 1.0 / x.sqrt());
        let ops = ops.into_iter().map(|m| m * &inv_sqrt).collect();
        Ok(KrausSet { dim, ops })
    }

    /// Rank-one projective measurement onto an orthonormal basis.
    pub fn projective(basis: &[Ket]) -> Result<Self> {
        let ops = basis
            .iter()
            .map(|b| b.amps() * b.amps().adjoint())
            .collect();
        KrausSet::new(ops)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcome_count(&self) -> usize {
        self.ops.len()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.ops
    }

    /// `‖Σ M_k†M_k − I‖` in operator norm.
    pub fn completeness_residual(&self) -> f64 {
        let s = completeness_sum(&self.ops, self.dim);
        operator_norm(&(s.matrix() - CMatrix::identity(self.dim, self.dim)))
    }

    /// Conjugates every operator by the unitary `u`: `M_k ↦ U M_k U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        KrausSet {
            dim: self.dim,
            ops: self.ops.iter().map(|m| u * m * u.adjoint()).collect(),
        }
    }

    /// Branch table for a list of states: entry `[i][k]` decomposes `M_k|φ_i⟩`.
    pub fn branch_table(&self, states: &[&Ket]) -> Result<Vec<Vec<BranchDecomposition>>> {
        states
            .iter()
            .map(|s| {
                (0..self.outcome_count())
                    .map(|k| apply_kraus(self, k, s))
                    .collect()
            })
            .collect()
    }
}

fn check_shapes(ops: &[CMatrix]) -> Result<usize> {
    let Some(first) = ops.first() else {
        return Err(Error::InvalidProtocol("Kraus set has no operators".into()));
    };
    let dim = first.nrows();
    for m in ops {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if m.nrows() != dim { m.nrows() } else { m.ncols() },
            });
        }
    }
    Ok(dim)
}

fn completeness_sum(ops: &[CMatrix], dim: usize) -> HermitianOp {
    let mut s = CMatrix::zeros(dim, dim);
    for m in ops {
        s += m.adjoint() * m;
    }
    HermitianOp::hermitian_part(&s)
}

/// Applies outcome `k` of `m` to `s` and splits the result into amplitude and branch state.
pub fn apply_kraus(m: &KrausSet, k: usize, s: &Ket) -> Result<BranchDecomposition> {
    if k >= m.outcome_count() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: m.outcome_count(),
        });
    }
    if s.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: s.dim(),
        });
    }
    Ok(BranchDecomposition::from_vector(k, &m.ops[k] * s.amps()))
}

/// POVM elements `E_k = M_k†M_k`.
pub fn povm_from_kraus(m: &KrausSet) -> Povm {
    let elements = m
        .ops
        .iter()
        .map(|op| HermitianOp::hermitian_part(&(op.adjoint() * op)))
        .collect();
    Povm::new(elements).expect("a complete Kraus set yields a valid POVM")
}

fn gaussian_matrix(rng: &mut impl Rng, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, dim).qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the distribution is Haar
    let phases = CMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        (0..dim).map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        }),
    ));
    q * phases
}

/// Deterministic random complete Kraus set: `K` Gaussian matrices normalized
/// to completeness. Singular draws are retried on a fresh stream.
pub fn random_kraus_set(seed: u64, dim: usize, outcomes: usize) -> Result<KrausSet> {
    if dim == 0 || outcomes == 0 {
        return Err(Error::OutOfRange {
            what: if dim == 0 { "dim" } else { "outcome count" },
            value: 0.0,
        });
    }
    for retry in 0..MAX_DRAW_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(retry));
        let ops: Vec<CMatrix> = (0..outcomes).map(|_| gaussian_matrix(&mut rng, dim)).collect();
        match KrausSet::normalized(ops) {
            Ok(set) => return Ok(set),
            Err(Error::NotPositive { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateDraw {
        retries: MAX_DRAW_RETRIES,
    })
}
