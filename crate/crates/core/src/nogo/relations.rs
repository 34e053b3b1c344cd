//! Algebraic identities behind the no-go arguments, checked on random samples.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::ensembles::check_open_angle;
use crate::error::{Error, Result};
use crate::quantum::{
    from_coordinates, hermitian_nullspace, project_onto, real_nullspace, BranchDecomposition,
    Functional, HermitianOp, Ket,
};

/// Alice's kets of the rotated nine-state family that enter the relations.
struct NineAlice {
    phi1: Ket,
    phi9: Ket,
    phi3: Ket,
    phi5: Ket,
    phi6: Ket,
    phi7: Ket,
    phi8: Ket,
}

impl NineAlice {
    fn new(theta: f64, gamma: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sg, cg) = gamma.sin_cos();
        NineAlice {
            phi1: Ket::basis(3, 0),
            phi9: Ket::basis(3, 1),
            phi3: Ket::basis(3, 2),
            phi5: Ket::from_real(&[ct, st, 0.0]),
            phi6: Ket::from_real(&[st, -ct, 0.0]),
            phi7: Ket::from_real(&[0.0, cg, sg]),
            phi8: Ket::from_real(&[0.0, sg, -cg]),
        }
    }

    fn pair(a: &Ket, b: &Ket) -> Functional {
        Functional::new(a.clone(), b.clone())
    }

    /// Constraint pairs (5,6), (1,9), (7,8), (3,9), in relation order.
    fn constraints(&self) -> [Functional; 4] {
        [
            Self::pair(&self.phi5, &self.phi6),
            Self::pair(&self.phi1, &self.phi9),
            Self::pair(&self.phi7, &self.phi8),
            Self::pair(&self.phi3, &self.phi9),
        ]
    }

    /// Squared amplitudes `[α1², α9², α5², α6², α3², α7², α8²]` for POVM element `e`.
    fn weights(&self, e: &HermitianOp) -> [f64; 7] {
        [
            e.expectation(&self.phi1),
            e.expectation(&self.phi9),
            e.expectation(&self.phi5),
            e.expectation(&self.phi6),
            e.expectation(&self.phi3),
            e.expectation(&self.phi7),
            e.expectation(&self.phi8),
        ]
    }
}

const A1: usize = 0;
const A9: usize = 1;
const A5: usize = 2;
const A6: usize = 3;
const A3: usize = 4;
const A7: usize = 5;
const A8: usize = 6;

/// Residuals of the four relations
/// `α1²−α9² = c2θ(α5²−α6²)`, `α5²−α6² = c2θ(α1²−α9²)`,
/// `α9²−α3² = c2γ(α7²−α8²)`, `α7²−α8² = c2γ(α9²−α3²)`.
fn relation_residuals(w: &[f64; 7], c_theta: f64, c_gamma: f64) -> [f64; 4] {
    [
        (w[A1] - w[A9]) - c_theta * (w[A5] - w[A6]),
        (w[A5] - w[A6]) - c_theta * (w[A1] - w[A9]),
        (w[A9] - w[A3]) - c_gamma * (w[A7] - w[A8]),
        (w[A7] - w[A8]) - c_gamma * (w[A9] - w[A3]),
    ]
}

/// Coefficient rows of the four relations plus the two sum rules
/// `α5²+α6² = α1²+α9²` and `α7²+α8² = α9²+α3²` (both hold for any POVM element).
fn combined_system(c_theta: f64, c_gamma: f64) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(6, 7);
    let mut row = |r: usize, entries: &[(usize, f64)]| {
        for &(c, v) in entries {
            a[(r, c)] += v;
        }
    };
    row(0, &[(A1, 1.0), (A9, -1.0), (A5, -c_theta), (A6, c_theta)]);
    row(1, &[(A5, 1.0), (A6, -1.0), (A1, -c_theta), (A9, c_theta)]);
    row(2, &[(A9, 1.0), (A3, -1.0), (A7, -c_gamma), (A8, c_gamma)]);
    row(3, &[(A7, 1.0), (A8, -1.0), (A9, -c_gamma), (A3, c_gamma)]);
    row(4, &[(A5, 1.0), (A6, 1.0), (A1, -1.0), (A9, -1.0)]);
    row(5, &[(A7, 1.0), (A8, 1.0), (A9, -1.0), (A3, -1.0)]);
    a
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationsReport {
    pub theta: f64,
    pub gamma: f64,
    pub samples: usize,
    pub seed: u64,
    pub cos_2theta: f64,
    pub cos_2gamma: f64,
    /// Max relation residual when each relation is checked on operators obeying
    /// only the single constraint it follows from.
    pub max_single_constraint_residual: f64,
    /// Max relation residual on operators obeying the constraint pair of each angle.
    pub max_paired_constraint_residual: f64,
    /// Max spread of `α1², α9², α3²` and of each rotated pair on operators
    /// obeying all four constraints.
    pub max_forced_equality_residual: f64,
    /// Null-space dimension of the four relations plus the two sum rules.
    pub combined_nullspace_dim: usize,
    /// Largest deviation of a combined null vector from the all-equal direction.
    pub combined_equality_residual: f64,
    pub max_residual: f64,
}

fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianOp {
    let coords: Vec<f64> = (0..dim * dim).map(|_| rng.sample(StandardNormal)).collect();
    from_coordinates(dim, &coords)
}

/// Samples random Hermitian operators on Alice's qutrit under subsets of the
/// zero-error constraints of the rotated nine-state family and checks the
/// four linear relations between squared branch weights, together with the
/// equal-weight conclusion of the full system.
pub fn check_generalized_relations(theta: f64, gamma: f64, samples: usize, seed: u64) -> Result<RelationsReport> {
    check_open_angle("theta", theta)?;
    check_open_angle("gamma", gamma)?;
    if samples == 0 {
        return Err(Error::OutOfRange {
            what: "samples",
            value: 0.0,
        });
    }
    let alice = NineAlice::new(theta, gamma);
    let (c_theta, c_gamma) = ((2.0 * theta).cos(), (2.0 * gamma).cos());
    let cs = alice.constraints();

    let single: Vec<Vec<HermitianOp>> = cs
        .iter()
        .map(|c| hermitian_nullspace(std::slice::from_ref(c), 3))
        .collect::<Result<_>>()?;
    let theta_pair = hermitian_nullspace(&cs[0..2], 3)?;
    let gamma_pair = hermitian_nullspace(&cs[2..4], 3)?;
    let all = hermitian_nullspace(&cs, 3)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut single_res: f64 = 0.0;
    let mut paired_res: f64 = 0.0;
    let mut forced_res: f64 = 0.0;
    for _ in 0..samples {
        let e = random_hermitian(&mut rng, 3);
        for (r, space) in single.iter().enumerate() {
            let w = alice.weights(&project_onto(&e, space));
            single_res = single_res.max(relation_residuals(&w, c_theta, c_gamma)[r].abs());
        }
        let wt = alice.weights(&project_onto(&e, &theta_pair));
        let wg = alice.weights(&project_onto(&e, &gamma_pair));
        let rt = relation_residuals(&wt, c_theta, c_gamma);
        let rg = relation_residuals(&wg, c_theta, c_gamma);
        paired_res = paired_res.max(rt[0].abs()).max(rt[1].abs()).max(rg[2].abs()).max(rg[3].abs());

        let w = alice.weights(&project_onto(&e, &all));
        for (a, b) in [(A1, A9), (A9, A3), (A5, A6), (A7, A8), (A1, A5), (A9, A7)] {
            forced_res = forced_res.max((w[a] - w[b]).abs());
        }
    }

    let null = real_nullspace(&combined_system(c_theta, c_gamma));
    let equal = DVector::from_element(7, 1.0 / 7f64.sqrt());
    let combined_equality_residual = null
        .iter()
        .map(|v| {
            let along = v.dot(&equal);
            (v - &equal * along).norm()
        })
        .fold(0.0, f64::max);

    Ok(RelationsReport {
        theta,
        gamma,
        samples,
        seed,
        cos_2theta: c_theta,
        cos_2gamma: c_gamma,
        max_single_constraint_residual: single_res,
        max_paired_constraint_residual: paired_res,
        max_forced_equality_residual: forced_res,
        combined_nullspace_dim: null.len(),
        combined_equality_residual,
        max_residual: single_res.max(paired_res).max(forced_res),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelogramReport {
    pub trials: usize,
    pub seed: u64,
    pub max_residual: f64,
}

/// Builds the branches `α3 w3 = (α1 w1 + α2 w2)/√2`, `α4 w4 = (α1 w1 − α2 w2)/√2`
/// and returns the largest residual of the four identities
/// `α1² = ½(α3² + α4² + 2α3α4 Re⟨w3|w4⟩)`, `α2² = ½(α3² + α4² − 2α3α4 Re⟨w3|w4⟩)`,
/// `α3² = ½(α1² + α2² + 2α1α2 Re⟨w1|w2⟩)`, `α4² = ½(α1² + α2² − 2α1α2 Re⟨w1|w2⟩)`.
pub fn parallelogram_residual(alpha1: f64, w1: &Ket, alpha2: f64, w2: &Ket) -> f64 {
    let b1 = BranchDecomposition::from_vector(0, w1.amps() * Complex64::new(alpha1, 0.0));
    let b2 = BranchDecomposition::from_vector(0, w2.amps() * Complex64::new(alpha2, 0.0));
    let v1 = w1.amps() * Complex64::new(alpha1, 0.0);
    let v2 = w2.amps() * Complex64::new(alpha2, 0.0);
    let b3 = BranchDecomposition::from_vector(0, (&v1 + &v2) * Complex64::new(FRAC_1_SQRT_2, 0.0));
    let b4 = BranchDecomposition::from_vector(0, (&v1 - &v2) * Complex64::new(FRAC_1_SQRT_2, 0.0));

    let cross34 = b3.weighted_overlap(&b4).re;
    let cross12 = b1.weighted_overlap(&b2).re;
    let (a1, a2, a3, a4) = (b1.weight(), b2.weight(), b3.weight(), b4.weight());
    [
        a1 - 0.5 * (a3 + a4 + 2.0 * cross34),
        a2 - 0.5 * (a3 + a4 - 2.0 * cross34),
        a3 - 0.5 * (a1 + a2 + 2.0 * cross12),
        a4 - 0.5 * (a1 + a2 - 2.0 * cross12),
    ]
    .iter()
    .fold(0.0, |m, r| m.max(r.abs()))
}

fn random_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    let v = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    Ket::normalize(v)
}

/// Randomized check of the four parallelogram identities on complex kets of
/// dimension 2 or 3 with amplitudes in `[0, 1]`.
pub fn verify_parallelogram(trials: usize, seed: u64) -> Result<ParallelogramReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            value: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    for _ in 0..trials {
        let dim = rng.gen_range(2..=3);
        let w1 = random_ket(&mut rng, dim);
        let w2 = random_ket(&mut rng, dim);
        let (a1, a2): (f64, f64) = (rng.gen(), rng.gen());
        max_residual = max_residual.max(parallelogram_residual(a1, &w1, a2, &w2));
    }
    Ok(ParallelogramReport {
        trials,
        seed,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn quarter_pi_reduces_to_direct_equality() {
        let r = check_generalized_relations(FRAC_PI_4, FRAC_PI_4, 200, 1).unwrap();
        assert!(r.cos_2theta.abs() < 1e-15 && r.cos_2gamma.abs() < 1e-15);
        assert!(r.max_residual < 1e-10);
        // with cos 2θ = 0 the first relation alone reads α1² = α9²
        let w = [0.3, 0.3, 0.1, 0.5, 0.2, 0.4, 0.4];
        assert!(relation_residuals(&w, 0.0, 0.0)[0].abs() < 1e-15);
    }

    #[test]
    fn relations_hold_at_pi_over_6() {
        let r = check_generalized_relations(FRAC_PI_6, FRAC_PI_6, 1000, 2).unwrap();
        assert!(r.max_single_constraint_residual < 1e-10, "{r:?}");
        assert!(r.max_paired_constraint_residual < 1e-10);
    }

    #[test]
    fn combined_system_forces_equal_weights() {
        let r = check_generalized_relations(FRAC_PI_3, 0.4, 100, 3).unwrap();
        assert_eq!(r.combined_nullspace_dim, 1);
        assert!(r.combined_equality_residual < 1e-10);
        assert!(r.max_forced_equality_residual < 1e-10);
    }

    #[test]
    fn single_relation_is_not_vacuous() {
        // without any constraint the first relation fails for generic operators
        let alice = NineAlice::new(FRAC_PI_3, FRAC_PI_4);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = random_hermitian(&mut rng, 3);
        let w = alice.weights(&e);
        assert!(relation_residuals(&w, (2.0 * FRAC_PI_3).cos(), 0.0)[0].abs() > 1e-3);
    }

    #[test]
    fn degenerate_angles_rejected() {
        assert!(check_generalized_relations(0.0, 0.3, 10, 1).is_err());
        assert!(check_generalized_relations(0.3, std::f64::consts::FRAC_PI_2, 10, 1).is_err());
    }

    #[test]
    fn parallelogram_random_trials() {
        let r = verify_parallelogram(1000, 11).unwrap();
        assert!(r.max_residual < 1e-10, "{}", r.max_residual);
    }

    #[test]
    fn parallelogram_with_vanishing_second_branch() {
        let w1 = Ket::from_real(&[0.6, 0.8]);
        let w2 = Ket::basis(2, 1);
        assert!(parallelogram_residual(0.7, &w1, 0.0, &w2) < 1e-15);
        let v3 = BranchDecomposition::from_vector(0, w1.amps() * Complex64::new(0.7 * FRAC_1_SQRT_2, 0.0));
        assert!((v3.amplitude - 0.7 * FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn parallelogram_with_vanishing_difference_branch() {
        let w = Ket::from_real(&[1.0, 2.0, 2.0]);
        assert!(parallelogram_residual(0.5, &w, 0.5, &w) < 1e-15);
    }
}
