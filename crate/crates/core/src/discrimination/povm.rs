use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::projective::max_rule_protocol;
use super::protocol::{simulate_one_way, EstimationResult};
use crate::ensembles::{Party, ProductEnsemble};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, KrausSet};

/// Number of random starting points.
pub const RESTARTS: usize = 6;
/// Simplex scales used for the refinement passes after each start.
const REFINE_STEPS: [f64; 4] = [0.1, 0.02, 0.004, 0.0008];

/// Downhill simplex (Nelder-Mead) minimization with a fixed evaluation budget.
///
/// Returns the best point and its value. Stops early once the spread of
/// simplex values falls below `1e-15`.
pub fn nelder_mead(f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    let mut evals = n + 1;

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        if (values[n] - values[0]).abs() < 1e-15 {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|x| x[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (contracted, fc) = if fr < values[n] {
                let c = along(-0.5);
                let v = f(&c);
                (c, v)
            } else {
                let c = along(0.5);
                let v = f(&c);
                (c, v)
            };
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    for d in 0..n {
                        simplex[i][d] = best[d] + 0.5 * (simplex[i][d] - best[d]);
                    }
                    values[i] = f(&simplex[i]);
                }
                evals += n;
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("nonempty simplex");
    (simplex[best].clone(), values[best])
}

fn params_to_ops(x: &[f64], dim: usize, outcomes: usize) -> Vec<CMatrix> {
    let per = 2 * dim * dim;
    (0..outcomes)
        .map(|k| {
            let block = &x[k * per..(k + 1) * per];
            CMatrix::from_fn(dim, dim, |r, c| {
                let idx = 2 * (r * dim + c);
                Complex64::new(block[idx], block[idx + 1])
            })
        })
        .collect()
}

/// Max-rule success with Bob in his computational basis, for raw (not yet
/// normalized) operators. Singular draws score zero.
fn max_rule_value(e: &ProductEnsemble, alice_parts: &[nalgebra::DVector<Complex64>], bob_probs: &[Vec<f64>], ops: Vec<CMatrix>) -> f64 {
    let Ok(set) = KrausSet::normalized(ops) else {
        return 0.0;
    };
    let n = e.len();
    let d_b = e.d_b();
    let mut total = 0.0;
    for m_k in set.operators() {
        let weights: Vec<f64> = alice_parts.iter().map(|phi| (m_k * phi).norm_squared()).collect();
        for m in 0..d_b {
            total += (0..n)
                .map(|i| weights[i] * bob_probs[i][m])
                .fold(0.0, f64::max);
        }
    }
    total / n as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PovmOptimum {
    #[serde(skip)]
    pub kraus: KrausSet,
    pub result: EstimationResult,
    pub restarts: usize,
    pub evaluations: usize,
}

/// Gradient-free search over complete `K`-outcome Kraus sets on Alice's space.
///
/// Each of [`RESTARTS`] Gaussian starting points is run through Nelder-Mead
/// with `iterations` evaluations, then refined by simplex restarts at
/// shrinking scales. Bob measures his computational basis and the guess
/// follows the max rule. Deterministic for a fixed seed.
pub fn optimize_povm(e: &ProductEnsemble, outcomes: usize, iterations: usize, seed: u64) -> Result<PovmOptimum> {
    if outcomes < 2 {
        return Err(Error::OutOfRange {
            what: "outcome budget",
            value: outcomes as f64,
        });
    }
    let dim = e.d_a();
    let alice_parts: Vec<_> = e.parts(Party::Alice).iter().map(|k| k.amps().clone()).collect();
    let bob_probs: Vec<Vec<f64>> = e
        .parts(Party::Bob)
        .iter()
        .map(|psi| psi.iter().map(|a| a.norm_sqr()).collect())
        .collect();

    let mut evaluations = 0usize;
    let mut objective = |x: &[f64]| {
        evaluations += 1;
        -max_rule_value(e, &alice_parts, &bob_probs, params_to_ops(x, dim, outcomes))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_params = 2 * dim * dim * outcomes;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for _ in 0..RESTARTS {
        let x0: Vec<f64> = (0..n_params).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (mut x, mut v) = nelder_mead(&mut objective, &x0, 0.5, iterations);
        for step in REFINE_STEPS {
            let (x2, v2) = nelder_mead(&mut objective, &x, step, iterations);
            if v2 <= v {
                x = x2;
                v = v2;
            }
        }
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((x, v));
        }
    }
    let (x, _) = best.expect("at least one restart");
    let kraus = KrausSet::normalized(params_to_ops(&x, dim, outcomes))?;
    let result = simulate_one_way(e, &max_rule_protocol(e, kraus.clone())?)?;
    Ok(PovmOptimum {
        kraus,
        result,
        restarts: RESTARTS,
        evaluations,
    })
}
