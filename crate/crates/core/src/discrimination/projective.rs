use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use super::protocol::{simulate_one_way, BobStrategy, EstimationResult, OneWayProtocol};
use crate::ensembles::{Party, ProductEnsemble};
use crate::error::{Error, Result};
use crate::quantum::{KrausSet, Ket};
use crate::tol;

/// Grid step of the coarse angle scan.
pub const GRID_STEP: f64 = PI / 720.0;

/// Orthonormal qubit basis at `angle`: `(cos a, sin a)`, `(sin a, −cos a)`.
pub fn projective_basis(angle: f64) -> [Ket; 2] {
    let (s, c) = angle.sin_cos();
    [Ket::from_real(&[c, s]), Ket::from_real(&[s, -c])]
}

/// Protocol in which Bob measures his computational basis and, for each pair
/// of outcomes `(k, m)`, the team guesses the state with the largest joint
/// weight `α_ik² |⟨m|ψ_i⟩|²`; ties go to the lower label.
pub fn max_rule_protocol(e: &ProductEnsemble, alice: KrausSet) -> Result<OneWayProtocol> {
    let weights = super::protocol::branch_weights(e, &alice)?;
    let d_b = e.d_b();
    let bob_probs: Vec<Vec<f64>> = e
        .parts(Party::Bob)
        .iter()
        .map(|psi| (0..d_b).map(|m| psi[m].norm_sqr()).collect())
        .collect();
    let mut bob = Vec::with_capacity(alice.outcome_count());
    for k in 0..alice.outcome_count() {
        let guesses = (0..d_b)
            .map(|m| {
                let mut best: Option<(usize, f64)> = None;
                for i in 0..e.len() {
                    let w = weights[i][k] * bob_probs[i][m];
                    if best.is_none_or(|(_, b)| w > b) {
                        best = Some((i + 1, w));
                    }
                }
                best.filter(|&(_, w)| w > 0.0).map(|(label, _)| label)
            })
            .collect();
        bob.push(BobStrategy::computational(guesses)?);
    }
    OneWayProtocol::new(alice, bob)
}

/// Success of the max-rule protocol when Alice measures the basis at `angle`.
pub fn guess_probability_projective(e: &ProductEnsemble, angle: f64) -> Result<EstimationResult> {
    if e.d_a() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: e.d_a(),
        });
    }
    let alice = KrausSet::projective(&projective_basis(angle))?;
    simulate_one_way(e, &max_rule_protocol(e, alice)?)
}

/// `(2 + ε + √(1−ε²)·overlap) / 4`: conditional success of one outcome with
/// pair weights split by `ε` and branch overlap `⟨w₁|w₂⟩`.
pub fn analytic_p(epsilon: f64, overlap: f64) -> Result<f64> {
    for (what, v) in [("epsilon", epsilon), ("overlap", overlap)] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::OutOfRange { what, value: v });
        }
    }
    Ok((2.0 + epsilon + (1.0 - epsilon * epsilon).sqrt() * overlap) / 4.0)
}

/// Optimal success for guessing between two pure states with priors `q1, q2`
/// and overlap modulus `|⟨a|b⟩|`.
pub fn helstrom_two_pure(q1: f64, q2: f64, overlap_mod: f64) -> Result<f64> {
    if q1 < 0.0 || q2 < 0.0 || (q1 + q2 - 1.0).abs() > tol::INVARIANT {
        return Err(Error::InvalidPriors { q1, q2 });
    }
    if !(0.0..=1.0).contains(&overlap_mod) {
        return Err(Error::OutOfRange {
            what: "overlap modulus",
            value: overlap_mod,
        });
    }
    Ok((1.0 + (1.0 - 4.0 * q1 * q2 * overlap_mod * overlap_mod).max(0.0).sqrt()) / 2.0)
}

/// Maximizes `f` on `[lo, hi]` by golden-section search to bracket width `tol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectiveOptimum {
    /// Maximizing angle folded into `[0, π/2)` and, where the objective is
    /// symmetric about `π/4`, into `[0, π/4]`.
    pub best_angle: f64,
    pub result: EstimationResult,
    /// Every refined maximizer in `[0, π)` whose value is within `1e-9` of the best.
    pub maximizers: Vec<f64>,
}

/// Folds an angle into `[0, π/2)` using the `π/2` relabeling symmetry, then
/// reflects `a ↦ π/2 − a` into `[0, π/4]` when that leaves the objective unchanged.
pub fn canonicalize_angle(angle: f64, objective: impl Fn(f64) -> f64) -> f64 {
    let mut a = angle.rem_euclid(FRAC_PI_2);
    if FRAC_PI_2 - a < tol::CONVERGENCE {
        a = 0.0;
    }
    if a > FRAC_PI_4 {
        let reflected = FRAC_PI_2 - a;
        if (objective(reflected) - objective(a)).abs() <= tol::INVARIANT {
            a = reflected;
        }
    }
    a
}

/// Coarse scan of `[0, π)` at step `π/720`, golden-section refinement of the
/// grid's local maxima to `1e-9` in angle, and collection of every maximizer
/// that ties the best value within `1e-9`.
pub fn optimize_projective(e: &ProductEnsemble) -> Result<ProjectiveOptimum> {
    // validate once; the closure below cannot fail afterwards
    guess_probability_projective(e, 0.0)?;
    let f = |a: f64| {
        guess_probability_projective(e, a)
            .expect("validated ensemble")
            .average_success
    };
    let n = (PI / GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..n).map(|i| f(i as f64 * GRID_STEP)).collect();

    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| grid[i] >= grid[(i + n - 1) % n] && grid[i] >= grid[(i + 1) % n])
        .collect();
    peaks.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]).then(a.cmp(&b)));
    peaks.truncate(16);

    let mut refined: Vec<(f64, f64)> = peaks
        .iter()
        .map(|&i| {
            let center = i as f64 * GRID_STEP;
            let (a, v) = golden_section_max(f, center - GRID_STEP, center + GRID_STEP, tol::CONVERGENCE);
            if v >= grid[i] {
                (a.rem_euclid(PI), v)
            } else {
                (center, grid[i])
            }
        })
        .collect();
    refined.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.total_cmp(&y.0)));
    let best_value = refined[0].1;

    let mut maximizers: Vec<f64> = Vec::new();
    for &(a, v) in &refined {
        if best_value - v <= tol::CONVERGENCE
            && maximizers.iter().all(|&m| circular_distance(m, a) > 1e-6)
        {
            maximizers.push(a);
        }
    }
    maximizers.sort_by(f64::total_cmp);

    let best_angle = maximizers
        .iter()
        .map(|&a| canonicalize_angle(a, f))
        .min_by(f64::total_cmp)
        .expect("at least one maximizer");
    let result = guess_probability_projective(e, best_angle)?;
    Ok(ProjectiveOptimum {
        best_angle,
        result,
        maximizers,
    })
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}
