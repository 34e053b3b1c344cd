//! Command-line front end. [`run`] does all the work and returns what the
//! binary should print, so the commands can be driven in-process too.

mod report;
mod spec;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use report::{round_floats, round_sig, RunReport, SIGNIFICANT_DIGITS};
pub use spec::{parse_angle, EnsembleSpec};

use crate::discrimination::{
    chi_basis_protocol, is_four_state_family, load_protocol, max_rule_protocol, optimize_povm,
    optimize_projective, save_protocol, simulate_one_way,
};
use crate::ensembles::{save_ensemble, Party, ProductEnsemble};
use crate::error::{Error, Result};
use crate::nogo::{
    feasibility_analysis, feasibility_for_pairs, forced_structure, kraus_oracle_check,
    FeasibilityReport, Verdict, NINE_STATE_CORE_PAIRS,
};
use report::{ket_json, matrix_json, to_value};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "LOCC_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "locc", version, about = "One-way LOCC discrimination of product-state ensembles")]
pub struct Cli {
    /// Add wall-clock duration to the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an ensemble and print its states, residuals or constraint pairs.
    Ensemble {
        /// four | four-general:θ | nine | nine-general:η,ξ,θ,γ | computational:dA,dB | FILE
        spec: String,
        #[arg(long, group = "view")]
        show: bool,
        #[arg(long, group = "view")]
        validate: bool,
        #[arg(long, group = "view")]
        pairs: bool,
        /// Write the ensemble file to this path.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Maximize the average guessing probability over Alice's first measurement.
    Optimize {
        spec: String,
        #[arg(long, value_enum, default_value_t = Mode::Projective)]
        mode: Mode,
        /// Number of POVM outcomes (povm mode).
        #[arg(long, default_value_t = 4)]
        outcomes: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Nelder-Mead evaluation budget per restart (povm mode).
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        /// Write the optimal protocol file to this path.
        #[arg(long)]
        save_protocol: Option<PathBuf>,
    },
    /// Analyze the zero-error constraint system for the party measuring first.
    Verify {
        spec: String,
        #[arg(long, value_enum, default_value_t = PartyArg::Alice)]
        party: PartyArg,
        /// Random Kraus sets for the oracle cross-check (0 skips it).
        #[arg(long, default_value_t = 100)]
        oracle_trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a one-way protocol on an ensemble.
    Simulate {
        spec: String,
        /// `chi` or a protocol file.
        #[arg(long, default_value = "chi")]
        protocol: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Projective,
    Povm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PartyArg {
    Alice,
    Bob,
}

impl From<PartyArg> for Party {
    fn from(p: PartyArg) -> Party {
        match p {
            PartyArg::Alice => Party::Alice,
            PartyArg::Bob => Party::Bob,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// What the binary prints and its exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(e: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Reads [`SEED_ENV`]; unset means 0.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}='{s}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<I, S>(args: I, default_seed: u64) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("locc".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Ensemble {
            spec,
            show: _,
            validate,
            pairs,
            save,
        } => cmd_ensemble(spec, *validate, *pairs, save.as_deref()),
        Command::Optimize {
            spec,
            mode,
            outcomes,
            seed,
            iterations,
            save_protocol,
        } => cmd_optimize(
            spec,
            *mode,
            *outcomes,
            seed.unwrap_or(default_seed),
            *iterations,
            save_protocol.as_deref(),
        ),
        Command::Verify {
            spec,
            party,
            oracle_trials,
            seed,
        } => cmd_verify(spec, (*party).into(), *oracle_trials, seed.unwrap_or(default_seed)),
        Command::Simulate {
            spec,
            protocol,
            format,
        } => cmd_simulate(spec, protocol, *format),
    };
    match result {
        Ok(Done::Report { mut report, code }) => {
            report.command = args;
            if cli.timing {
                report.duration_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            Outcome {
                code,
                stdout: report.to_json_string(),
                stderr: String::new(),
            }
        }
        Ok(Done::Text(stdout)) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome::error(e),
    }
}

enum Done {
    Report { report: RunReport, code: i32 },
    Text(String),
}

fn load(spec: &str) -> Result<(EnsembleSpec, ProductEnsemble, Value)> {
    let s = EnsembleSpec::parse(spec)?;
    let e = s.build()?;
    let descriptor = json!({
        "spec": spec,
        "family": s.family(),
        "parameters": s.parameters(),
        "d_a": e.d_a(),
        "d_b": e.d_b(),
        "states": e.len(),
    });
    Ok((s, e, descriptor))
}

fn report(ensemble: Value, seed: Option<u64>, results: Value, code: i32) -> Done {
    Done::Report {
        report: RunReport {
            command: Vec::new(),
            ensemble,
            seed,
            results,
            duration_ms: None,
        },
        code,
    }
}

fn pairs_json(e: &ProductEnsemble, acting: Party) -> Value {
    Value::Array(
        e.overlap_pairs(acting.other())
            .iter()
            .map(|p| json!({ "i": p.i, "j": p.j, "passive_overlap": [p.overlap.re, p.overlap.im] }))
            .collect(),
    )
}

fn cmd_ensemble(spec: &str, validate: bool, pairs: bool, save: Option<&std::path::Path>) -> Result<Done> {
    let (_, e, descriptor) = load(spec)?;
    if let Some(path) = save {
        save_ensemble(&e, path)?;
    }
    let results = if validate {
        let (i, j, worst) = e.worst_orthogonality().unwrap_or((0, 0, 0.0));
        json!({
            "view": "validate",
            "max_normalization_residual": e.max_normalization_residual(),
            "worst_pair": [i, j],
            "max_joint_overlap": worst,
            "valid": worst < crate::tol::RESIDUAL && e.max_normalization_residual() < crate::tol::RESIDUAL,
        })
    } else if pairs {
        json!({
            "view": "pairs",
            "alice_first": pairs_json(&e, Party::Alice),
            "bob_first": pairs_json(&e, Party::Bob),
        })
    } else {
        let states: Vec<Value> = e
            .states()
            .iter()
            .map(|s| json!({ "label": s.label, "alice": ket_json(&s.alice), "bob": ket_json(&s.bob) }))
            .collect();
        json!({ "view": "show", "states": states })
    };
    Ok(report(descriptor, None, results, EXIT_OK))
}

fn cmd_optimize(
    spec: &str,
    mode: Mode,
    outcomes: usize,
    seed: u64,
    iterations: usize,
    save: Option<&std::path::Path>,
) -> Result<Done> {
    let (_, e, descriptor) = load(spec)?;
    let reference = is_four_state_family(&e).then_some(0.5 + 0.5 * std::f64::consts::FRAC_1_SQRT_2);
    match mode {
        Mode::Projective => {
            let opt = optimize_projective(&e)?;
            if let Some(path) = save {
                let alice = crate::quantum::KrausSet::projective(&crate::discrimination::projective_basis(opt.best_angle))?;
                save_protocol(&max_rule_protocol(&e, alice)?, path)?;
            }
            let results = json!({
                "mode": "projective",
                "value": opt.result.average_success,
                "best_angle": opt.best_angle,
                "maximizers": opt.maximizers,
                "per_state_success": opt.result.per_state_success,
                "parameters": to_value(&opt.result.parameters),
                "reference_p_max": reference,
            });
            Ok(report(descriptor, None, results, EXIT_OK))
        }
        Mode::Povm => {
            let opt = optimize_povm(&e, outcomes, iterations, seed)?;
            if let Some(path) = save {
                save_protocol(&max_rule_protocol(&e, opt.kraus.clone())?, path)?;
            }
            let kraus: Vec<Value> = opt.kraus.operators().iter().map(matrix_json).collect();
            let results = json!({
                "mode": "povm",
                "outcomes": outcomes,
                "iterations": iterations,
                "value": opt.result.average_success,
                "per_state_success": opt.result.per_state_success,
                "restarts": opt.restarts,
                "evaluations": opt.evaluations,
                "kraus": kraus,
                "reference_p_max": reference,
            });
            Ok(report(descriptor, Some(seed), results, EXIT_OK))
        }
    }
}

fn feasibility_json(r: &FeasibilityReport) -> Value {
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|p| json!({ "i": p.i, "j": p.j, "passive_overlap": [p.passive_overlap.re, p.passive_overlap.im] }))
        .collect();
    json!({
        "party": r.party,
        "pairs": pairs,
        "nullspace_dim": r.nullspace_dim,
        "verdict": r.verdict,
        "identity_residual": r.identity_residual,
        "max_constraint_residual": r.max_constraint_residual,
        "nullspace_basis": r.nullspace_basis.iter().map(|b| matrix_json(b.matrix())).collect::<Vec<_>>(),
        "witness": r.witness.as_ref().map(|w| matrix_json(w.matrix())),
        "witness_spread": r.witness_spread,
        "witness_offdiagonal": r.witness_offdiagonal,
    })
}

fn cmd_verify(spec: &str, party: Party, trials: usize, seed: u64) -> Result<Done> {
    let (s, e, descriptor) = load(spec)?;
    let analysis = feasibility_analysis(&e, party)?;
    let no_progress = analysis.verdict == Verdict::NoProgress;
    let structure = if no_progress {
        Some(to_value(&forced_structure(&e, party)?))
    } else {
        None
    };
    let oracle = if trials > 0 {
        Some(kraus_oracle_check(&e, party, trials, seed)?)
    } else {
        None
    };
    let subsystem = match (&s, party) {
        (EnsembleSpec::Nine | EnsembleSpec::NineGeneral { .. }, Party::Alice) => {
            let sub = feasibility_for_pairs(&e, party, &NINE_STATE_CORE_PAIRS)?;
            Some(json!({
                "pairs": sub.pair_labels(),
                "nullspace_dim": sub.nullspace_dim,
                "verdict": sub.verdict,
            }))
        }
        _ => None,
    };
    let expected = s.expected_no_progress(party);
    let verdict_matches = expected.is_none_or(|x| x == no_progress);
    let oracle_consistent = oracle.as_ref().is_none_or(|o| o.consistent);
    let code = if verdict_matches && oracle_consistent {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    };
    let expected_verdict = expected.map(|x| if x { Verdict::NoProgress } else { Verdict::ProgressPossible });
    let results = json!({
        "feasibility": feasibility_json(&analysis),
        "forced_structure": structure,
        "oracle": oracle.as_ref().map(to_value),
        "subsystem": subsystem,
        "expected_verdict": expected_verdict,
        "matches_expected": verdict_matches && oracle_consistent,
    });
    Ok(report(descriptor, (trials > 0).then_some(seed), results, code))
}

fn cmd_simulate(spec: &str, protocol: &str, format: Format) -> Result<Done> {
    let (_, e, descriptor) = load(spec)?;
    let p = if protocol == "chi" {
        chi_basis_protocol()
    } else {
        load_protocol(protocol)?
    };
    let r = simulate_one_way(&e, &p)?;
    match format {
        Format::Csv => {
            let mut out = String::from("label,success\n");
            for (i, v) in r.per_state_success.iter().enumerate() {
                out.push_str(&format!("{},{}\n", i + 1, round_sig(*v)));
            }
            Ok(Done::Text(out))
        }
        Format::Json => {
            let results = json!({
                "protocol": protocol,
                "per_state_success": r.per_state_success,
                "average_success": r.average_success,
                "parameters": to_value(&r.parameters),
            });
            Ok(report(descriptor, None, results, EXIT_OK))
        }
    }
}
