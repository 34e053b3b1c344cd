use num_complex::Complex64;
use serde::Serialize;

use crate::ensembles::{Party, ProductEnsemble};
use crate::error::{Error, Result};
use crate::quantum::{hermitian_nullspace, max_constraint_residual, Functional, HermitianOp};
use crate::tol;

/// A zero-error constraint on the acting party's POVM elements: the pair
/// `(i, j)` is not orthogonal at the passive party, so every outcome must keep
/// `⟨x_i|E_k|x_j⟩ = 0` at the acting party.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintPair {
    pub i: usize,
    pub j: usize,
    /// Overlap of the passive party's kets (Bob's when Alice acts).
    pub passive_overlap: Complex64,
    pub functional: Functional,
}

/// Constraint pairs for `party` measuring first.
pub fn constraint_pairs(e: &ProductEnsemble, party: Party) -> Vec<ConstraintPair> {
    e.overlap_pairs(party.other())
        .into_iter()
        .map(|p| ConstraintPair {
            i: p.i,
            j: p.j,
            passive_overlap: p.overlap,
            functional: Functional::new(
                e.state(p.i).part(party).clone(),
                e.state(p.j).part(party).clone(),
            ),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NoProgress,
    ProgressPossible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilityReport {
    pub party: Party,
    pub pairs: Vec<ConstraintPair>,
    pub nullspace_dim: usize,
    /// Trace-orthonormal basis of the feasible POVM-element space.
    pub nullspace_basis: Vec<HermitianOp>,
    pub verdict: Verdict,
    /// Relative distance of the basis element from a multiple of the identity
    /// (only meaningful when the space is one-dimensional).
    pub identity_residual: f64,
    pub max_constraint_residual: f64,
    /// Feasible operator orthogonal to the identity (unit Frobenius norm).
    pub witness: Option<HermitianOp>,
    /// `max_i ⟨x_i|W|x_i⟩ − min_i ⟨x_i|W|x_i⟩` over the acting party's kets.
    pub witness_spread: f64,
    /// Largest `|⟨x_i|W|x_j⟩|` over acting-party-orthogonal pairs that are not constrained.
    pub witness_offdiagonal: f64,
}

impl FeasibilityReport {
    pub fn pair_labels(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|p| (p.i, p.j)).collect()
    }
}

fn diagonal_spread(w: &HermitianOp, kets: &[&crate::quantum::Ket]) -> f64 {
    let vals: Vec<f64> = kets.iter().map(|k| w.expectation(k)).collect();
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Feasible-operator analysis for `party` measuring first, using every
/// passive-nonorthogonal pair as a constraint.
pub fn feasibility_analysis(e: &ProductEnsemble, party: Party) -> Result<FeasibilityReport> {
    analyze(e, party, constraint_pairs(e, party))
}

/// Same analysis restricted to the listed pairs (each must be a constraint pair).
pub fn feasibility_for_pairs(e: &ProductEnsemble, party: Party, pairs: &[(usize, usize)]) -> Result<FeasibilityReport> {
    let all = constraint_pairs(e, party);
    let mut chosen = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        let (i, j) = (i.min(j), i.max(j));
        match all.iter().find(|p| p.i == i && p.j == j) {
            Some(p) => chosen.push(p.clone()),
            None => {
                return Err(Error::InvalidProtocol(format!(
                    "({i}, {j}) is not a constraint pair for {party} measuring first"
                )))
            }
        }
    }
    analyze(e, party, chosen)
}

fn analyze(e: &ProductEnsemble, party: Party, pairs: Vec<ConstraintPair>) -> Result<FeasibilityReport> {
    let dim = e.dim(party);
    let functionals: Vec<Functional> = pairs.iter().map(|p| p.functional.clone()).collect();
    let basis = hermitian_nullspace(&functionals, dim)?;
    let nullspace_dim = basis.len();
    let identity_residual = basis.first().map_or(1.0, |b| b.identity_residual());
    let verdict = if nullspace_dim == 1 && identity_residual < tol::RESIDUAL {
        Verdict::NoProgress
    } else {
        Verdict::ProgressPossible
    };

    let kets = e.parts(party);
    let (witness, witness_spread, witness_offdiagonal) = match verdict {
        Verdict::NoProgress => (None, 0.0, 0.0),
        Verdict::ProgressPossible => {
            let unit_identity = HermitianOp::identity(dim).scale(1.0 / (dim as f64).sqrt());
            let mut best: Option<(HermitianOp, f64)> = None;
            for b in &basis {
                let w = b.sub(&unit_identity.scale(unit_identity.trace_inner(b)));
                let norm = w.frobenius_norm();
                if norm < tol::RESIDUAL {
                    continue;
                }
                let w = w.scale(1.0 / norm);
                let spread = diagonal_spread(&w, &kets);
                if best.as_ref().is_none_or(|(_, s)| spread > *s + tol::INVARIANT) {
                    best = Some((w, spread));
                }
            }
            match best {
                Some((w, spread)) => {
                    let mut off: f64 = 0.0;
                    for i in 1..=e.len() {
                        for j in (i + 1)..=e.len() {
                            let constrained = pairs.iter().any(|p| p.i == i && p.j == j);
                            if !constrained && e.overlap(party, i, j).norm() < tol::INVARIANT {
                                off = off.max(w.sandwich(kets[i - 1], kets[j - 1]).norm());
                            }
                        }
                    }
                    (Some(w), spread, off)
                }
                None => (None, 0.0, 0.0),
            }
        }
    };

    Ok(FeasibilityReport {
        party,
        max_constraint_residual: max_constraint_residual(&functionals, &basis),
        pairs,
        nullspace_dim,
        nullspace_basis: basis,
        verdict,
        identity_residual,
        witness,
        witness_spread,
        witness_offdiagonal,
    })
}

/// What zero error forces on every outcome of the first measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForcedStructure {
    pub party: Party,
    /// Labels whose branch weights `α_ik` must coincide for every outcome.
    pub equal_weight_classes: Vec<Vec<usize>>,
    /// Pairs whose branch states must stay orthogonal, `⟨w_ik|w_jk⟩ = 0`.
    pub forced_branch_orthogonalities: Vec<(usize, usize)>,
    /// Pairs with identical local kets, hence identical branches for any measurement.
    pub identical_branches: Vec<(usize, usize)>,
}

/// Reads the forced branch structure off the feasible space. Requires a
/// `NoProgress` verdict.
pub fn forced_structure(e: &ProductEnsemble, party: Party) -> Result<ForcedStructure> {
    let report = feasibility_analysis(e, party)?;
    if report.verdict != Verdict::NoProgress {
        return Err(Error::ProgressPossible);
    }
    Ok(structure_from_basis(e, party, &report.nullspace_basis))
}

pub(crate) fn structure_from_basis(e: &ProductEnsemble, party: Party, basis: &[HermitianOp]) -> ForcedStructure {
    let kets = e.parts(party);
    let n = e.len();
    let profile = |i: usize| -> Vec<f64> { basis.iter().map(|b| b.expectation(kets[i])).collect() };

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let p = profile(i);
        let found = reps
            .iter()
            .position(|r| r.iter().zip(&p).all(|(a, b)| (a - b).abs() < tol::RESIDUAL));
        match found {
            Some(c) => classes[c].push(i + 1),
            None => {
                reps.push(p);
                classes.push(vec![i + 1]);
            }
        }
    }

    let mut orth = Vec::new();
    let mut identical = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if basis
                .iter()
                .all(|b| b.sandwich(kets[i], kets[j]).norm() < tol::RESIDUAL)
            {
                orth.push((i + 1, j + 1));
            }
            if (e.overlap(party, i + 1, j + 1).norm() - 1.0).abs() < tol::INVARIANT {
                identical.push((i + 1, j + 1));
            }
        }
    }
    ForcedStructure {
        party,
        equal_weight_classes: classes,
        forced_branch_orthogonalities: orth,
        identical_branches: identical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{computational, four_state, four_state_general, nine_state};
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn four_state_constraints_and_verdict() {
        let e = four_state();
        let r = feasibility_analysis(&e, Party::Alice).unwrap();
        assert_eq!(r.pair_labels(), vec![(1, 2), (3, 4)]);
        assert_eq!(r.nullspace_dim, 1);
        assert!(r.identity_residual < 1e-10);
        assert_eq!(r.verdict, Verdict::NoProgress);
        assert!(r.witness.is_none());
    }

    #[test]
    fn nine_state_is_stuck_for_both_parties() {
        let e = nine_state();
        for party in [Party::Alice, Party::Bob] {
            let r = feasibility_analysis(&e, party).unwrap();
            assert_eq!(r.nullspace_dim, 1, "{party}");
            assert_eq!(r.verdict, Verdict::NoProgress);
        }
        let labels = feasibility_analysis(&e, Party::Alice).unwrap().pair_labels();
        for p in [(5, 6), (7, 8), (1, 9), (3, 9)] {
            assert!(labels.contains(&p));
        }
    }

    #[test]
    fn computational_allows_progress() {
        let e = computational(2, 2).unwrap();
        let r = feasibility_analysis(&e, Party::Alice).unwrap();
        assert_eq!(r.pair_labels(), vec![(1, 3), (2, 4)]);
        assert_eq!(r.nullspace_dim, 2);
        assert_eq!(r.verdict, Verdict::ProgressPossible);
        let w = r.witness.as_ref().unwrap();
        assert!(w.matrix()[(0, 1)].norm() < 1e-12, "diagonal witness");
        assert!(r.witness_spread > 1e-8);
        for p in &r.pairs {
            assert!(p.functional.eval(w).norm() < 1e-10);
        }
    }

    #[test]
    fn four_state_bob_first_can_progress() {
        let r = feasibility_analysis(&four_state(), Party::Bob).unwrap();
        assert_eq!(r.verdict, Verdict::ProgressPossible);
    }

    #[test]
    fn forced_structure_of_four_state() {
        let f = forced_structure(&four_state(), Party::Alice).unwrap();
        assert_eq!(f.equal_weight_classes, vec![vec![1, 2, 3, 4]]);
        assert!(f.forced_branch_orthogonalities.contains(&(1, 2)));
        assert_eq!(f.forced_branch_orthogonalities, vec![(1, 2), (3, 4)]);
        assert!(f.identical_branches.is_empty());
    }

    #[test]
    fn forced_structure_of_nine_state() {
        let f = forced_structure(&nine_state(), Party::Alice).unwrap();
        assert_eq!(f.equal_weight_classes, vec![(1..=9).collect::<Vec<_>>()]);
        for p in [(1, 3), (1, 9), (3, 9)] {
            assert!(f.forced_branch_orthogonalities.contains(&p), "{p:?}");
        }
        assert_eq!(f.identical_branches, vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn forced_structure_of_rotated_family() {
        let f = forced_structure(&four_state_general(FRAC_PI_3).unwrap(), Party::Alice).unwrap();
        assert_eq!(f.equal_weight_classes, vec![vec![1, 2, 3, 4]]);
    }

    #[test]
    fn forced_structure_refuses_progress_case() {
        let e = computational(2, 2).unwrap();
        assert_eq!(forced_structure(&e, Party::Alice).unwrap_err(), Error::ProgressPossible);
    }

    #[test]
    fn subsystem_rejects_unknown_pair() {
        assert!(feasibility_for_pairs(&four_state(), Party::Alice, &[(1, 3)]).is_err());
        let r = feasibility_for_pairs(&four_state(), Party::Alice, &[(1, 2)]).unwrap();
        assert_eq!(r.nullspace_dim, 2);
    }
}
