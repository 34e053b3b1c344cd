//! Bipartite product-state ensembles with uniform priors.

mod io;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{inner_product, Ket};
use crate::tol;

pub use io::{load_ensemble, parse_ensemble, save_ensemble, to_file_string, EnsembleFile, StateRecord};

/// One of the two parties. For measurement-order questions this is the party
/// that acts first; the other party is passive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alice" | "a" => Ok(Party::Alice),
            "bob" | "b" => Ok(Party::Bob),
            _ => Err(Error::Parse(format!("unknown party '{s}' (expected alice or bob)"))),
        }
    }
}

/// `|φ⟩_a ⊗ |ψ⟩_b` with a 1-based label.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteProductState {
    pub label: usize,
    pub alice: Ket,
    pub bob: Ket,
}

impl BipartiteProductState {
    pub fn part(&self, party: Party) -> &Ket {
        match party {
            Party::Alice => &self.alice,
            Party::Bob => &self.bob,
        }
    }
}

/// An unordered state pair and the overlap of one party's local kets.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapPair {
    pub i: usize,
    pub j: usize,
    pub overlap: Complex64,
}

/// Mutually orthogonal product states, labeled `1..=n`, uniform priors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductEnsemble {
    d_a: usize,
    d_b: usize,
    states: Vec<BipartiteProductState>,
}

impl ProductEnsemble {
    /// Builds an ensemble from `(alice, bob)` parts, labeling them `1..=n`.
    pub fn new(parts: Vec<(Ket, Ket)>) -> Result<Self> {
        let states = parts
            .into_iter()
            .enumerate()
            .map(|(idx, (alice, bob))| BipartiteProductState {
                label: idx + 1,
                alice,
                bob,
            })
            .collect();
        ProductEnsemble::from_states(states)
    }

    /// Validates labels, normalization and joint orthogonality, and fixes the
    /// global phase of every local ket.
    pub fn from_states(states: Vec<BipartiteProductState>) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::InvalidProtocol("ensemble has no states".into()));
        };
        let (d_a, d_b) = (first.alice.dim(), first.bob.dim());
        let n = states.len();
        let mut canonical = Vec::with_capacity(n);
        for (position, s) in states.into_iter().enumerate() {
            if s.label != position + 1 {
                return Err(Error::BadLabel {
                    n,
                    position,
                    found: s.label,
                });
            }
            for (ket, dim) in [(&s.alice, d_a), (&s.bob, d_b)] {
                if ket.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: ket.dim(),
                    });
                }
                let residual = (ket.norm() - 1.0).abs();
                if residual > tol::INVARIANT {
                    return Err(Error::NotNormalized {
                        label: s.label,
                        residual,
                    });
                }
            }
            canonical.push(BipartiteProductState {
                label: s.label,
                alice: s.alice.canonical_phase(),
                bob: s.bob.canonical_phase(),
            });
        }
        let e = ProductEnsemble {
            d_a,
            d_b,
            states: canonical,
        };
        if let Some((i, j, residual)) = e.worst_orthogonality() {
            if residual > tol::RESIDUAL {
                return Err(Error::NotOrthogonal { i, j, residual });
            }
        }
        Ok(e)
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn dim(&self, party: Party) -> usize {
        match party {
            Party::Alice => self.d_a,
            Party::Bob => self.d_b,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BipartiteProductState] {
        &self.states
    }

    /// State by 1-based label.
    pub fn state(&self, label: usize) -> &BipartiteProductState {
        &self.states[label - 1]
    }

    pub fn prior(&self) -> f64 {
        1.0 / self.states.len() as f64
    }

    /// Local kets of one party, in label order.
    pub fn parts(&self, party: Party) -> Vec<&Ket> {
        self.states.iter().map(|s| s.part(party)).collect()
    }

    /// `⟨x_i|x_j⟩` for one party's local kets (labels are 1-based).
    pub fn overlap(&self, party: Party, i: usize, j: usize) -> Complex64 {
        inner_product(self.state(i).part(party), self.state(j).part(party))
            .expect("ensemble parts share a dimension")
    }

    /// Pair with the largest joint overlap `|⟨φ_i|φ_j⟩⟨ψ_i|ψ_j⟩|`, if there are two or more states.
    pub fn worst_orthogonality(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 1..=self.len() {
            for j in (i + 1)..=self.len() {
                let r = (self.overlap(Party::Alice, i, j) * self.overlap(Party::Bob, i, j)).norm();
                if worst.is_none_or(|(_, _, w)| r > w) {
                    worst = Some((i, j, r));
                }
            }
        }
        worst
    }

    /// Largest normalization defect over all local kets.
    pub fn max_normalization_residual(&self) -> f64 {
        self.states
            .iter()
            .flat_map(|s| [&s.alice, &s.bob])
            .map(|k| (k.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Pairs `i < j` whose local kets at `party` are not orthogonal.
    pub fn overlap_pairs(&self, party: Party) -> Vec<OverlapPair> {
        let mut out = Vec::new();
        for i in 1..=self.len() {
            for j in (i + 1)..=self.len() {
                let overlap = self.overlap(party, i, j);
                if overlap.norm() > tol::INVARIANT {
                    out.push(OverlapPair { i, j, overlap });
                }
            }
        }
        out
    }

    /// Largest entrywise difference from another ensemble with the same shape.
    pub fn max_abs_diff(&self, other: &ProductEnsemble) -> Option<f64> {
        if self.d_a != other.d_a || self.d_b != other.d_b || self.len() != other.len() {
            return None;
        }
        Some(
            self.states
                .iter()
                .zip(&other.states)
                .map(|(a, b)| a.alice.max_abs_diff(&b.alice).max(a.bob.max_abs_diff(&b.bob)))
                .fold(0.0, f64::max),
        )
    }

    /// Applies local unitaries `U_A ⊗ U_B` to every state.
    pub fn transform(&self, u_a: &crate::quantum::CMatrix, u_b: &crate::quantum::CMatrix) -> Result<Self> {
        let states = self
            .states
            .iter()
            .map(|s| BipartiteProductState {
                label: s.label,
                alice: Ket::unnormalized(u_a * s.alice.amps()),
                bob: Ket::unnormalized(u_b * s.bob.amps()),
            })
            .collect();
        ProductEnsemble::from_states(states)
    }

    /// Reorders states by `order` (a permutation of `1..=n`) and relabels them `1..=n`.
    pub fn relabel(&self, order: &[usize]) -> Result<Self> {
        ProductEnsemble::new(
            order
                .iter()
                .map(|&l| (self.state(l).alice.clone(), self.state(l).bob.clone()))
                .collect(),
        )
    }
}

/// Bob-nonorthogonal pairs: those Alice must keep distinguishable when she measures first.
pub fn bob_overlap_pairs(e: &ProductEnsemble) -> Vec<OverlapPair> {
    e.overlap_pairs(Party::Bob)
}

/// Rejects angles outside the open interval `(0, π/2)`.
pub fn check_open_angle(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 && value < FRAC_PI_2 {
        Ok(value)
    } else {
        Err(Error::InvalidAngle { name, value })
    }
}

fn k(amps: &[f64]) -> Ket {
    Ket::from_real(amps)
}

/// The four states `|0⟩|0⟩, |1⟩|0⟩, |+⟩|1⟩, |−⟩|1⟩`.
pub fn four_state() -> ProductEnsemble {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ProductEnsemble::new(vec![
        (k(&[1.0, 0.0]), k(&[1.0, 0.0])),
        (k(&[0.0, 1.0]), k(&[1.0, 0.0])),
        (k(&[s, s]), k(&[0.0, 1.0])),
        (k(&[s, -s]), k(&[0.0, 1.0])),
    ])
    .expect("four-state ensemble is valid")
}

/// Four-state family with Alice's second pair rotated by `theta ∈ (0, π/2)`.
pub fn four_state_general(theta: f64) -> Result<ProductEnsemble> {
    check_open_angle("theta", theta)?;
    let (s, c) = theta.sin_cos();
    ProductEnsemble::new(vec![
        (k(&[1.0, 0.0]), k(&[1.0, 0.0])),
        (k(&[0.0, 1.0]), k(&[1.0, 0.0])),
        (k(&[c, s]), k(&[0.0, 1.0])),
        (k(&[s, -c]), k(&[0.0, 1.0])),
    ])
}

/// The nine "domino" states on `3 × 3`.
pub fn nine_state() -> ProductEnsemble {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ProductEnsemble::new(vec![
        (k(&[1.0, 0.0, 0.0]), k(&[s, s, 0.0])),
        (k(&[1.0, 0.0, 0.0]), k(&[s, -s, 0.0])),
        (k(&[0.0, 0.0, 1.0]), k(&[0.0, s, s])),
        (k(&[0.0, 0.0, 1.0]), k(&[0.0, s, -s])),
        (k(&[s, s, 0.0]), k(&[0.0, 0.0, 1.0])),
        (k(&[s, -s, 0.0]), k(&[0.0, 0.0, 1.0])),
        (k(&[0.0, s, s]), k(&[1.0, 0.0, 0.0])),
        (k(&[0.0, s, -s]), k(&[1.0, 0.0, 0.0])),
        (k(&[0.0, 1.0, 0.0]), k(&[0.0, 1.0, 0.0])),
    ])
    .expect("nine-state ensemble is valid")
}

/// Nine-state family with the four rotated pairs at angles `eta, xi, theta, gamma`.
///
/// The second member of the `xi` pair is `sin ξ|1⟩ − cos ξ|2⟩` on Bob's side;
/// with `|1⟩` in both terms it would neither be normalized in general nor
/// orthogonal to its partner.
pub fn nine_state_general(eta: f64, xi: f64, theta: f64, gamma: f64) -> Result<ProductEnsemble> {
    check_open_angle("eta", eta)?;
    check_open_angle("xi", xi)?;
    check_open_angle("theta", theta)?;
    check_open_angle("gamma", gamma)?;
    let (se, ce) = eta.sin_cos();
    let (sx, cx) = xi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    ProductEnsemble::new(vec![
        (k(&[1.0, 0.0, 0.0]), k(&[ce, se, 0.0])),
        (k(&[1.0, 0.0, 0.0]), k(&[se, -ce, 0.0])),
        (k(&[0.0, 0.0, 1.0]), k(&[0.0, cx, sx])),
        (k(&[0.0, 0.0, 1.0]), k(&[0.0, sx, -cx])),
        (k(&[ct, st, 0.0]), k(&[0.0, 0.0, 1.0])),
        (k(&[st, -ct, 0.0]), k(&[0.0, 0.0, 1.0])),
        (k(&[0.0, cg, sg]), k(&[1.0, 0.0, 0.0])),
        (k(&[0.0, sg, -cg]), k(&[1.0, 0.0, 0.0])),
        (k(&[0.0, 1.0, 0.0]), k(&[0.0, 1.0, 0.0])),
    ])
}

/// All `d_a · d_b` computational product states, Bob's index running fastest.
pub fn computational(d_a: usize, d_b: usize) -> Result<ProductEnsemble> {
    if d_a < 2 || d_b < 2 {
        return Err(Error::OutOfRange {
            what: "local dimension",
            value: d_a.min(d_b) as f64,
        });
    }
    let mut parts = Vec::with_capacity(d_a * d_b);
    for a in 0..d_a {
        for b in 0..d_b {
            parts.push((Ket::basis(d_a, a), Ket::basis(d_b, b)));
        }
    }
    ProductEnsemble::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn pair_set(v: &[OverlapPair]) -> Vec<(usize, usize)> {
        v.iter().map(|p| (p.i, p.j)).collect()
    }

    #[test]
    fn four_state_parts() {
        let e = four_state();
        assert_eq!((e.d_a(), e.d_b(), e.len()), (2, 2, 4));
        let a3 = &e.state(3).alice;
        assert!((a3[0].re - FRAC_1_SQRT_2).abs() < 1e-15 && (a3[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(e.overlap(Party::Alice, 1, 2).norm(), 0.0);
        assert_eq!(e.overlap(Party::Bob, 1, 3).norm(), 0.0);
        assert!((e.prior() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn four_general_at_quarter_pi_matches() {
        let g = four_state_general(FRAC_PI_4).unwrap();
        assert!(g.max_abs_diff(&four_state()).unwrap() < 1e-12);
    }

    #[test]
    fn four_general_is_orthogonal() {
        for theta in [0.01, FRAC_PI_6, FRAC_PI_3, 1.5] {
            let g = four_state_general(theta).unwrap();
            assert!(g.overlap(Party::Alice, 3, 4).norm() < 1e-15);
            assert!(g.worst_orthogonality().unwrap().2 < 1e-10);
        }
    }

    #[test]
    fn angles_outside_open_interval_rejected() {
        for bad in [0.0, FRAC_PI_2, -0.1, 2.0, f64::NAN] {
            assert!(matches!(four_state_general(bad), Err(Error::InvalidAngle { .. })));
            assert!(nine_state_general(FRAC_PI_4, bad, FRAC_PI_4, FRAC_PI_4).is_err());
        }
    }

    #[test]
    fn nine_state_parts() {
        let e = nine_state();
        assert_eq!((e.d_a(), e.d_b(), e.len()), (3, 3, 9));
        let s9 = e.state(9);
        assert!(s9.alice.max_abs_diff(&Ket::basis(3, 1)) < 1e-15);
        assert!(s9.bob.max_abs_diff(&Ket::basis(3, 1)) < 1e-15);
        assert!((e.overlap(Party::Bob, 1, 9).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(e.overlap(Party::Alice, 1, 9).norm(), 0.0);
        assert!(e.worst_orthogonality().unwrap().2 < 1e-10);
    }

    #[test]
    fn nine_general_reduces_and_stays_orthogonal() {
        let g = nine_state_general(FRAC_PI_4, FRAC_PI_4, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!(g.max_abs_diff(&nine_state()).unwrap() < 1e-12);
        let g = nine_state_general(FRAC_PI_6, FRAC_PI_4, FRAC_PI_4, FRAC_PI_4).unwrap();
        assert!(g.worst_orthogonality().unwrap().2 < 1e-10);
        assert!(g.overlap(Party::Bob, 3, 4).norm() < 1e-15);
    }

    #[test]
    fn computational_counts() {
        let e = computational(2, 2).unwrap();
        assert_eq!(e.len(), 4);
        assert_eq!(e.worst_orthogonality().unwrap().2, 0.0);
        assert_eq!(computational(3, 3).unwrap().len(), 9);
        assert!(computational(1, 3).is_err());
    }

    #[test]
    fn bob_pairs_of_named_ensembles() {
        assert_eq!(pair_set(&bob_overlap_pairs(&four_state())), vec![(1, 2), (3, 4)]);
        assert_eq!(
            pair_set(&bob_overlap_pairs(&computational(2, 2).unwrap())),
            vec![(1, 3), (2, 4)]
        );
        let nine = pair_set(&bob_overlap_pairs(&nine_state()));
        for p in [(5, 6), (7, 8), (1, 9), (3, 9), (1, 3), (1, 7), (2, 9), (3, 5)] {
            assert!(nine.contains(&p), "missing {p:?}");
        }
    }

    #[test]
    fn nine_bob_pairs_match_brute_force() {
        // Bob parts written out by hand, real amplitudes in the |0>,|1>,|2> basis
        let s = FRAC_1_SQRT_2;
        let bob = [
            [s, s, 0.0],
            [s, -s, 0.0],
            [0.0, s, s],
            [0.0, s, -s],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
        ];
        let mut expected = Vec::new();
        for i in 0..9 {
            for j in (i + 1)..9 {
                let dot: f64 = (0..3).map(|c| bob[i][c] * bob[j][c]).sum();
                if dot.abs() > 1e-12 {
                    expected.push((i + 1, j + 1));
                }
            }
        }
        assert_eq!(pair_set(&bob_overlap_pairs(&nine_state())), expected);
    }

    #[test]
    fn overlaps_are_conjugate_symmetric() {
        let i = Complex64::new(0.0, 1.0);
        let e = ProductEnsemble::new(vec![
            (Ket::basis(2, 0), Ket::basis(2, 0)),
            (Ket::basis(2, 1), Ket::new(vec![Complex64::new(0.6, 0.0), i * 0.8]).unwrap()),
        ])
        .unwrap();
        let ab = e.overlap(Party::Bob, 1, 2);
        let ba = e.overlap(Party::Bob, 2, 1);
        assert!((ab - ba.conj()).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_orthogonal_and_unnormalized() {
        let r = ProductEnsemble::new(vec![
            (Ket::basis(2, 0), Ket::basis(2, 0)),
            (Ket::from_real(&[1.0, 1.0]), Ket::basis(2, 0)),
        ]);
        assert!(matches!(r, Err(Error::NotOrthogonal { i: 1, j: 2, .. })));
        let r = ProductEnsemble::new(vec![
            (Ket::basis(2, 0), Ket::basis(2, 0)),
            (Ket::unnormalized(Ket::basis(2, 1).amps().scale(2.0)), Ket::basis(2, 0)),
        ]);
        assert!(matches!(r, Err(Error::NotNormalized { label: 2, .. })));
    }

    #[test]
    fn party_parsing() {
        assert_eq!("Alice".parse::<Party>().unwrap(), Party::Alice);
        assert_eq!("bob".parse::<Party>().unwrap(), Party::Bob);
        assert!("carol".parse::<Party>().is_err());
        assert_eq!(Party::Alice.other(), Party::Bob);
    }
}
