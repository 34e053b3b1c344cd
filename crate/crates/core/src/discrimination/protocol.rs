use std::f64::consts::FRAC_PI_8;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::ProductEnsemble;
use crate::error::{Error, Result};
use crate::quantum::{inner_product, CMatrix, KrausSet, Ket};
use crate::tol;

/// Bob's projective measurement for one Alice outcome, with the label guessed
/// for each of his outcomes. `None` is allowed only for outcome pairs that
/// never occur.
#[derive(Clone, Debug, PartialEq)]
pub struct BobStrategy {
    basis: Vec<Ket>,
    guesses: Vec<Option<usize>>,
}

impl BobStrategy {
    pub fn new(basis: Vec<Ket>, guesses: Vec<Option<usize>>) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::InvalidProtocol("Bob basis is empty".into()));
        };
        let dim = first.dim();
        if basis.len() != dim {
            return Err(Error::InvalidProtocol(format!(
                "Bob basis has {} vectors in dimension {dim}",
                basis.len()
            )));
        }
        for (a, x) in basis.iter().enumerate() {
            for (b, y) in basis.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                let r = (inner_product(x, y)? - expect).norm();
                if r > tol::INVARIANT {
                    return Err(Error::InvalidProtocol(format!(
                        "Bob basis is not orthonormal at ({a}, {b}): residual {r:.3e}"
                    )));
                }
            }
        }
        if guesses.len() != dim {
            return Err(Error::InvalidProtocol(format!(
                "{} guesses for {dim} Bob outcomes",
                guesses.len()
            )));
        }
        Ok(BobStrategy { basis, guesses })
    }

    /// Computational-basis measurement with the given guesses.
    pub fn computational(guesses: Vec<Option<usize>>) -> Result<Self> {
        let dim = guesses.len();
        BobStrategy::new((0..dim).map(|m| Ket::basis(dim, m)).collect(), guesses)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Ket] {
        &self.basis
    }

    pub fn guesses(&self) -> &[Option<usize>] {
        &self.guesses
    }

    /// `|⟨b_m|ψ⟩|²` for each of Bob's outcomes.
    pub fn probabilities(&self, psi: &Ket) -> Result<Vec<f64>> {
        self.basis
            .iter()
            .map(|b| inner_product(b, psi).map(|z| z.norm_sqr()))
            .collect()
    }
}

/// Alice measures and announces her outcome `k`; Bob then runs `bob[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneWayProtocol {
    alice: KrausSet,
    bob: Vec<BobStrategy>,
}

impl OneWayProtocol {
    pub fn new(alice: KrausSet, bob: Vec<BobStrategy>) -> Result<Self> {
        if bob.len() != alice.outcome_count() {
            return Err(Error::InvalidProtocol(format!(
                "{} Bob strategies for {} Alice outcomes",
                bob.len(),
                alice.outcome_count()
            )));
        }
        if let Some(b) = bob.iter().find(|b| b.dim() != bob[0].dim()) {
            return Err(Error::DimensionMismatch {
                expected: bob[0].dim(),
                found: b.dim(),
            });
        }
        Ok(OneWayProtocol { alice, bob })
    }

    pub fn alice(&self) -> &KrausSet {
        &self.alice
    }

    pub fn bob(&self) -> &[BobStrategy] {
        &self.bob
    }

    pub fn d_a(&self) -> usize {
        self.alice.dim()
    }

    pub fn d_b(&self) -> usize {
        self.bob[0].dim()
    }

    /// Applies local unitaries: Alice's operators become `U M U†`, Bob's basis vectors `V b`.
    pub fn transform(&self, u_a: &CMatrix, u_b: &CMatrix) -> Result<Self> {
        let bob = self
            .bob
            .iter()
            .map(|s| {
                BobStrategy::new(
                    s.basis
                        .iter()
                        .map(|b| Ket::unnormalized(u_b * b.amps()))
                        .collect(),
                    s.guesses.clone(),
                )
            })
            .collect::<Result<_>>()?;
        OneWayProtocol::new(self.alice.conjugate_by(u_a), bob)
    }
}

/// Parameters `(γ, ε, δ)` of one Alice outcome of a four-state-family protocol:
/// `α₁² = γ(1+ε)`, `α₂² = γ(1−ε)`, `α₃² = γ(1+δ)`, `α₄² = γ(1−δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimationParametrization {
    pub gamma_weight: f64,
    pub epsilon: f64,
    pub delta: f64,
}

impl EstimationParametrization {
    /// From the four squared branch amplitudes of one outcome. `None` when the
    /// outcome never occurs.
    pub fn from_weights(w: [f64; 4]) -> Option<Self> {
        let gamma = (w[0] + w[1]) / 2.0;
        if gamma <= tol::ZERO_AMPLITUDE {
            return None;
        }
        let gamma34 = (w[2] + w[3]) / 2.0;
        Some(EstimationParametrization {
            gamma_weight: gamma,
            epsilon: (w[0] - w[1]) / (2.0 * gamma),
            delta: (w[2] - w[3]) / (2.0 * gamma34.max(tol::ZERO_AMPLITUDE)),
        })
    }

    /// The four squared amplitudes implied by the parameters.
    pub fn weights(&self) -> [f64; 4] {
        let g = self.gamma_weight;
        [
            g * (1.0 + self.epsilon),
            g * (1.0 - self.epsilon),
            g * (1.0 + self.delta),
            g * (1.0 - self.delta),
        ]
    }

    /// Conditional success probability of this outcome under the max rule.
    pub fn success(&self) -> f64 {
        (2.0 + self.epsilon.abs() + self.delta.abs()) / 4.0
    }
}

/// Exact success probabilities of a protocol on an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimationResult {
    pub per_state_success: Vec<f64>,
    pub average_success: f64,
    /// One entry per occurring Alice outcome; empty unless the ensemble is a four-state family.
    pub parameters: Vec<EstimationParametrization>,
}

impl EstimationResult {
    pub fn from_per_state(per_state_success: Vec<f64>) -> Self {
        let average_success = per_state_success.iter().sum::<f64>() / per_state_success.len() as f64;
        EstimationResult {
            per_state_success,
            average_success,
            parameters: Vec::new(),
        }
    }
}

/// True for four states on `2 × 2` where states 1,2 share Bob's ket, states 3,4
/// share Bob's ket, and the two Bob kets are orthogonal.
pub fn is_four_state_family(e: &ProductEnsemble) -> bool {
    use crate::ensembles::Party::Bob;
    if e.len() != 4 || e.d_a() != 2 || e.d_b() != 2 {
        return false;
    }
    let same = |i, j| (e.overlap(Bob, i, j).norm() - 1.0).abs() < tol::RESIDUAL;
    same(1, 2) && same(3, 4) && e.overlap(Bob, 1, 3).norm() < tol::RESIDUAL
}

/// Squared branch amplitudes `α_ik² = ‖M_k φ_i‖²`, indexed `[i][k]`.
pub fn branch_weights(e: &ProductEnsemble, alice: &KrausSet) -> Result<Vec<Vec<f64>>> {
    if alice.dim() != e.d_a() {
        return Err(Error::DimensionMismatch {
            expected: e.d_a(),
            found: alice.dim(),
        });
    }
    let parts = e.parts(crate::ensembles::Party::Alice);
    Ok(alice
        .branch_table(&parts)?
        .into_iter()
        .map(|row| row.iter().map(|b| b.weight()).collect())
        .collect())
}

pub(crate) fn four_state_parameters(weights: &[Vec<f64>]) -> Vec<EstimationParametrization> {
    let outcomes = weights[0].len();
    (0..outcomes)
        .filter_map(|k| {
            EstimationParametrization::from_weights([
                weights[0][k],
                weights[1][k],
                weights[2][k],
                weights[3][k],
            ])
        })
        .collect()
}

/// Exact per-state success of a one-way protocol (Born rule, no sampling).
pub fn simulate_one_way(e: &ProductEnsemble, p: &OneWayProtocol) -> Result<EstimationResult> {
    if p.d_b() != e.d_b() {
        return Err(Error::DimensionMismatch {
            expected: e.d_b(),
            found: p.d_b(),
        });
    }
    let weights = branch_weights(e, &p.alice)?;
    let n = e.len();
    let bob_probs: Vec<Vec<Vec<f64>>> = p
        .bob
        .iter()
        .map(|s| {
            e.states()
                .iter()
                .map(|st| s.probabilities(&st.bob))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut success = vec![0.0; n];
    for (k, strategy) in p.bob.iter().enumerate() {
        for (m, guess) in strategy.guesses.iter().enumerate() {
            let joint: Vec<f64> = (0..n).map(|i| weights[i][k] * bob_probs[k][i][m]).collect();
            let total: f64 = joint.iter().sum();
            if total <= tol::ZERO_AMPLITUDE {
                continue;
            }
            match guess {
                Some(label) if (1..=n).contains(label) => success[label - 1] += joint[label - 1],
                Some(label) => {
                    return Err(Error::InvalidProtocol(format!(
                        "guess {label} is not a state label (1..={n})"
                    )))
                }
                None => {
                    return Err(Error::IncompleteGuessMap {
                        outcome: k,
                        bob_outcome: m,
                    })
                }
            }
        }
    }
    let mut result = EstimationResult::from_per_state(success);
    if is_four_state_family(e) {
        result.parameters = four_state_parameters(&weights);
    }
    Ok(result)
}

/// Alice measures `{χ₁, χ₂}` with `χ₁ = sin(π/8)|0⟩ + cos(π/8)|1⟩`,
/// `χ₂ = cos(π/8)|0⟩ − sin(π/8)|1⟩`; Bob measures `{|0⟩, |1⟩}`.
/// Announced guesses: `χ₁` → state 2 or 3, `χ₂` → state 1 or 4, by Bob's result.
pub fn chi_basis_protocol() -> OneWayProtocol {
    let (s, c) = FRAC_PI_8.sin_cos();
    let chi = [Ket::from_real(&[s, c]), Ket::from_real(&[c, -s])];
    let alice = KrausSet::projective(&chi).expect("orthonormal basis");
    let bob = vec![
        BobStrategy::computational(vec![Some(2), Some(3)]).expect("valid"),
        BobStrategy::computational(vec![Some(1), Some(4)]).expect("valid"),
    ];
    OneWayProtocol::new(alice, bob).expect("consistent outcome counts")
}

pub const PROTOCOL_FORMAT_TAG: &str = "locc-protocol/1";

/// Protocol file: Alice's Kraus operators as row-major `[re, im]` matrices and,
/// per Alice outcome, Bob's basis vectors plus one guess (label or `null`)
/// per Bob outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub format: String,
    pub alice: Vec<Vec<Vec<[f64; 2]>>>,
    pub bob: Vec<BobRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BobRecord {
    pub basis: Vec<Vec<[f64; 2]>>,
    pub guesses: Vec<Option<usize>>,
}

fn c(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<&OneWayProtocol> for ProtocolFile {
    fn from(p: &OneWayProtocol) -> Self {
        let alice = p
            .alice
            .operators()
            .iter()
            .map(|m| {
                (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect())
                    .collect()
            })
            .collect();
        let bob = p
            .bob
            .iter()
            .map(|s| BobRecord {
                basis: s.basis.iter().map(|b| b.iter().map(|a| [a.re, a.im]).collect()).collect(),
                guesses: s.guesses.clone(),
            })
            .collect();
        ProtocolFile {
            format: PROTOCOL_FORMAT_TAG.into(),
            alice,
            bob,
        }
    }
}

impl TryFrom<ProtocolFile> for OneWayProtocol {
    type Error = Error;

    fn try_from(f: ProtocolFile) -> Result<Self> {
        if f.format != PROTOCOL_FORMAT_TAG {
            return Err(Error::Parse(format!(
                "unsupported protocol format '{}' (expected '{PROTOCOL_FORMAT_TAG}')",
                f.format
            )));
        }
        let mut ops = Vec::with_capacity(f.alice.len());
        for rows in &f.alice {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::Parse("Kraus operators must be square".into()));
            }
            ops.push(CMatrix::from_fn(n, n, |r, col| c(rows[r][col])));
        }
        let alice = KrausSet::new(ops)?;
        let bob = f
            .bob
            .into_iter()
            .map(|rec| {
                let basis = rec
                    .basis
                    .iter()
                    .map(|v| Ket::unnormalized(DVector::from_iterator(v.len(), v.iter().map(|&p| c(p)))))
                    .collect();
                BobStrategy::new(basis, rec.guesses)
            })
            .collect::<Result<_>>()?;
        OneWayProtocol::new(alice, bob)
    }
}

pub fn load_protocol(path: impl AsRef<Path>) -> Result<OneWayProtocol> {
    let text = std::fs::read_to_string(path)?;
    let file: ProtocolFile = serde_json::from_str(&text)?;
    OneWayProtocol::try_from(file)
}

pub fn save_protocol(p: &OneWayProtocol, path: impl AsRef<Path>) -> Result<()> {
    let mut s = serde_json::to_string_pretty(&ProtocolFile::from(p))?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
