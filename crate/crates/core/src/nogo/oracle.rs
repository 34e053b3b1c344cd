//! Randomized cross-check of the feasible-space analysis through explicit
//! Kraus operators and branch decompositions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::feasibility::{feasibility_analysis, Verdict};
use crate::ensembles::{Party, ProductEnsemble};
use crate::error::{Error, Result};
use crate::quantum::{
    polar_unitary, project_onto, random_kraus_set, CMatrix, HermitianOp, KrausSet,
};
use crate::tol;

/// Statistics threshold for the "isomorphic structure" conclusion.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub party: Party,
    pub trials: usize,
    pub seed: u64,
    pub verdict: Verdict,
    /// Max over trials and outcomes of `max_i α_ik − min_i α_ik`.
    pub max_alpha_spread: f64,
    /// Max over trials, outcomes and pairs of `|⟨w_ik|w_jk⟩ − ⟨x_i|x_j⟩|`.
    pub max_overlap_deviation: f64,
    /// Max `|⟨x_i|E_k|x_j⟩|` over constraint pairs after projection.
    pub max_constraint_residual: f64,
    pub max_completeness_residual: f64,
    /// Largest negative eigenvalue removed after projecting a POVM element.
    pub max_clipped_eigenvalue: f64,
    /// For `NoProgress`, both spread statistics stay below `1e-8`.
    pub consistent: bool,
}

/// Projects the POVM of a random Kraus set onto the feasible space and rebuilds
/// Kraus operators `M'_k = U_k √E'_k`, keeping each original polar unitary `U_k`.
fn feasible_kraus(raw: &KrausSet, basis: &[HermitianOp]) -> Result<(KrausSet, f64)> {
    let dim = raw.dim();
    let mut clipped: f64 = 0.0;
    let projected: Vec<HermitianOp> = raw
        .operators()
        .iter()
        .map(|m| {
            let e = HermitianOp::hermitian_part(&(m.adjoint() * m));
            let p = project_onto(&e, basis);
            let min = p.eigenvalues()[0];
            if min < 0.0 {
                clipped = clipped.max(-min);
                HermitianOp::hermitian_part(&p.map_spectrum(|x| x.max(0.0)))
            } else {
                p
            }
        })
        .collect();

    let sum = projected
        .iter()
        .fold(HermitianOp::zeros(dim), |acc, e| acc.add(e));
    let inv_sqrt = sum.map_spectrum(|x| if x > tol::INVARIANT { 1.0 / x.sqrt() } else { 0.0 });
    let ops: Vec<CMatrix> = raw
        .operators()
        .iter()
        .zip(&projected)
        .map(|(m, e)| {
            let normalized = HermitianOp::hermitian_part(&(&inv_sqrt * e.matrix() * &inv_sqrt));
            polar_unitary(m) * normalized.map_spectrum(|x| x.max(0.0).sqrt())
        })
        .collect();
    Ok((KrausSet::new(ops)?, clipped))
}

/// Draws `trials` random Kraus sets for `party`, forces them into the feasible
/// space and measures how far the post-measurement structure departs from the
/// initial one.
pub fn kraus_oracle_check(e: &ProductEnsemble, party: Party, trials: usize, seed: u64) -> Result<OracleReport> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            value: 0.0,
        });
    }
    let analysis = feasibility_analysis(e, party)?;
    let functionals: Vec<_> = analysis.pairs.iter().map(|p| p.functional.clone()).collect();
    let kets = e.parts(party);
    let dim = e.dim(party);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut report = OracleReport {
        party,
        trials,
        seed,
        verdict: analysis.verdict,
        max_alpha_spread: 0.0,
        max_overlap_deviation: 0.0,
        max_constraint_residual: 0.0,
        max_completeness_residual: 0.0,
        max_clipped_eigenvalue: 0.0,
        consistent: true,
    };
    for _ in 0..trials {
        let outcomes = rng.gen_range(2..=4);
        let raw = random_kraus_set(rng.gen(), dim, outcomes)?;
        let (set, clipped) = feasible_kraus(&raw, &analysis.nullspace_basis)?;
        report.max_clipped_eigenvalue = report.max_clipped_eigenvalue.max(clipped);
        report.max_completeness_residual = report.max_completeness_residual.max(set.completeness_residual());

        for op in set.operators() {
            let elem = HermitianOp::hermitian_part(&(op.adjoint() * op));
            for f in &functionals {
                report.max_constraint_residual = report.max_constraint_residual.max(f.eval(&elem).norm());
            }
        }

        let table = set.branch_table(&kets)?;
        for k in 0..set.outcome_count() {
            let amps: Vec<f64> = table.iter().map(|row| row[k].amplitude).collect();
            let max = amps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = amps.iter().copied().fold(f64::INFINITY, f64::min);
            report.max_alpha_spread = report.max_alpha_spread.max(max - min);

            for i in 0..kets.len() {
                for j in (i + 1)..kets.len() {
                    let (Some(wi), Some(wj)) = (&table[i][k].state, &table[j][k].state) else {
                        continue;
                    };
                    let branch = wi.amps().dotc(wj.amps());
                    let initial = kets[i].amps().dotc(kets[j].amps());
                    report.max_overlap_deviation = report.max_overlap_deviation.max((branch - initial).norm());
                }
            }
        }
    }
    report.consistent = match report.verdict {
        Verdict::NoProgress => {
            report.max_alpha_spread < ORACLE_TOLERANCE && report.max_overlap_deviation < ORACLE_TOLERANCE
        }
        Verdict::ProgressPossible => true,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{computational, four_state, nine_state};

    #[test]
    fn four_state_weights_stay_equal() {
        let r = kraus_oracle_check(&four_state(), Party::Alice, 100, 5).unwrap();
        assert!(r.max_alpha_spread < 1e-8, "{}", r.max_alpha_spread);
        assert!(r.max_completeness_residual < 1e-10);
        assert!(r.consistent);
    }

    #[test]
    fn nine_state_structure_is_preserved() {
        let r = kraus_oracle_check(&nine_state(), Party::Alice, 100, 6).unwrap();
        assert!(r.max_overlap_deviation < 1e-8, "{}", r.max_overlap_deviation);
        assert!(r.max_constraint_residual < 1e-10);
        assert!(r.consistent);
    }

    #[test]
    fn computational_control_shows_progress() {
        let r = kraus_oracle_check(&computational(2, 2).unwrap(), Party::Alice, 100, 7).unwrap();
        assert_eq!(r.verdict, Verdict::ProgressPossible);
        assert!(r.max_alpha_spread > 0.1, "{}", r.max_alpha_spread);
        assert!(r.max_constraint_residual < 1e-10);
        assert_eq!(r.max_clipped_eigenvalue, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(kraus_oracle_check(&four_state(), Party::Alice, 0, 1).is_err());
    }
}
