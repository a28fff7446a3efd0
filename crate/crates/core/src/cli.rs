//! Command-line front end. Exit codes: 0 answered, 2 input error, 3 guard exceeded.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    rank_threshold_table, render_runtime_table, render_threshold_table, runtime_base_table,
};
use crate::bench::{render_bench, run_bench, BenchConfig, Suite};
use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::generate::{random_setcover, random_tripartition};
use crate::io::{
    from_json_str, read_json, to_json_string, DecompositionFile, InstanceFile, SetCoverFile,
    SolveResult, TensorFile, TripartitionFile,
};
use crate::selftest::run_selftest;
use crate::setcover::{min_cover_size, reduce_and_solve, SetCoverInstance};
use crate::tensor::Decomposition;
use crate::tk::{best_group_decomposition, bounds_report, build_tk, naive_group_decomposition};
use crate::tripartition::{
    solve_brute, solve_tensor, solve_wht, SampleSet, TensorSolverConfig, TripartitionInstance,
};

#[derive(Debug, Parser)]
#[command(
    name = "tkrank",
    version,
    about = "Partition tensors, their decompositions, and the solvers built on them"
)]
pub struct Cli {
    /// Prime modulus; defaults to $TKRANK_MODULUS, then 2^31 - 1.
    #[arg(long, global = true)]
    pub modulus: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded random instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve a tripartition or set cover instance file.
    Solve(SolveArgs),
    /// Build, decompose and verify T_k.
    #[command(subcommand)]
    Tensor(TensorCommand),
    /// Runtime-base and rank-threshold tables.
    Bounds(BoundsArgs),
    /// Time a solver over several sizes.
    Bench(BenchArgs),
    /// Run the oracle-agreement corpus.
    Selftest(SelftestArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Three families of n-subsets of [3n]
    Tripartition {
        #[arg(long)]
        n: usize,
        /// Random members per family (0 gives empty families unless planted).
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long)]
        plant: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sets of size at most s over [n], with a cover budget t
    Setcover {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        /// Random sets before planting.
        #[arg(long, default_value_t = 6)]
        sets: usize,
        #[arg(long)]
        plant: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Brute,
    Wht,
    Tensor,
    /// Set cover only: dynamic programming over masks, no reduction.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Samples {
    Full,
    Four,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Wht)]
    pub algo: Algo,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 5.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Decomposition file to use instead of the built-in one.
    #[arg(long)]
    pub decomposition: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Samples::Full)]
    pub samples: Samples,
}

#[derive(Debug, Subcommand)]
pub enum TensorCommand {
    /// Write T_k as a sparse tensor.
    BuildTk {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a character decomposition of T_k.
    Decompose {
        #[arg(long)]
        k: usize,
        /// 2^(3k-1) terms (default).
        #[arg(long, conflicts_with = "naive")]
        group: bool,
        /// 2^(3k) terms.
        #[arg(long)]
        naive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a decomposition file against T_k.
    Verify {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Rank threshold that would refute the set cover conjecture.
    Bounds {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        candidate_rank: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 20)]
    pub k_max: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "wht")]
    pub suite: Suite,
    #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Minimum milliseconds per timed sample.
    #[arg(long, default_value_t = 20)]
    pub min_ms: u64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub quick: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

/// What a command printed and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let field = match cli.modulus {
        Some(p) => FieldContext::new(p)?,
        None => FieldContext::from_env()?,
    };
    match cli.command {
        Command::Gen(cmd) => gen(cmd),
        Command::Solve(args) => solve(args, field),
        Command::Tensor(cmd) => tensor(cmd, field),
        Command::Bounds(args) => {
            let runtime = runtime_base_table(args.k_max)?;
            let thresholds = rank_threshold_table(args.k_max)?;
            if args.json {
                let value =
                    serde_json::json!({ "runtime_bases": runtime, "thresholds": thresholds });
                return Ok(Outcome::ok(to_json_string(&value)? + "\n"));
            }
            Ok(Outcome::ok(format!(
                "{}\n{}",
                render_runtime_table(&runtime),
                render_threshold_table(&thresholds)
            )))
        }
        Command::Bench(args) => {
            let config = BenchConfig {
                repetitions: args.reps,
                seed: args.seed,
                min_sample: Duration::from_millis(args.min_ms),
                k: args.k,
                ..BenchConfig::new(args.suite, args.sizes)
            };
            let report = run_bench(&config)?;
            Ok(Outcome::ok(if args.json {
                to_json_string(&report)? + "\n"
            } else {
                render_bench(&report)
            }))
        }
        Command::Selftest(args) => {
            let report = run_selftest(args.quick, args.seed, field)?;
            let text = if args.json {
                to_json_string(&report)? + "\n"
            } else {
                report.render()
            };
            Ok(Outcome {
                stdout: text,
                code: if report.passed() { 0 } else { 1 },
            })
        }
    }
}

fn emit(text: String, out: Option<&Path>) -> Result<Outcome> {
    match out {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(Outcome::ok(String::new()))
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn gen(cmd: GenCommand) -> Result<Outcome> {
    match cmd {
        GenCommand::Tripartition {
            n,
            size,
            plant,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_tripartition(n, size, plant, &mut rng)?;
            emit(
                to_json_string(&TripartitionFile::from(&inst))? + "\n",
                out.as_deref(),
            )
        }
        GenCommand::Setcover {
            n,
            s,
            t,
            sets,
            plant,
            seed,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = random_setcover(n, s, t, sets, plant, &mut rng)?;
            emit(
                to_json_string(&SetCoverFile::from(&inst))? + "\n",
                out.as_deref(),
            )
        }
    }
}

fn load_decomposition(args: &SolveArgs, field: FieldContext) -> Result<Decomposition> {
    match &args.decomposition {
        Some(path) => read_json::<DecompositionFile>(path)?.into_decomposition(),
        None => Ok(best_group_decomposition(args.k, field)?.0),
    }
}

fn tensor_config(args: &SolveArgs, seed: u64) -> TensorSolverConfig {
    TensorSolverConfig {
        k: args.k,
        lambda: args.lambda,
        seed,
        threads: args.threads,
        sample_set: match args.samples {
            Samples::Full => SampleSet::FullField,
            Samples::Four => SampleSet::Four,
        },
    }
}

fn solve_tripartition(
    inst: &TripartitionInstance,
    args: &SolveArgs,
    field: FieldContext,
) -> Result<SolveResult> {
    let plain = |answer| SolveResult {
        answer,
        witness: None,
        trials_used: 1,
        p: None,
        count: None,
        reduction_calls: None,
    };
    match args.algo {
        Algo::Brute => {
            let r = solve_brute(inst);
            Ok(SolveResult {
                witness: r.witness.map(|w| w.map(|s| s.elements())),
                count: Some(r.count.to_string()),
                ..plain(r.answer)
            })
        }
        Algo::Wht => {
            let r = solve_wht(inst)?;
            Ok(SolveResult {
                count: Some(r.count.to_string()),
                ..plain(r.answer)
            })
        }
        Algo::Tensor => {
            let d = load_decomposition(args, field)?;
            let r = solve_tensor(inst, &d, &tensor_config(args, args.seed))?;
            Ok(SolveResult {
                trials_used: r.trials_used,
                p: Some(r.plan.p_string()),
                ..plain(r.answer)
            })
        }
        Algo::Exact => Err(Error::Parameter(
            "--algo exact applies to set cover instances".into(),
        )),
    }
}

fn solve_setcover(
    inst: &SetCoverInstance,
    args: &SolveArgs,
    field: FieldContext,
) -> Result<SolveResult> {
    let mut result = SolveResult {
        answer: false,
        witness: None,
        trials_used: 1,
        p: None,
        count: None,
        reduction_calls: None,
    };
    if args.algo == Algo::Exact {
        let min = min_cover_size(inst)?;
        result.answer = min.is_some_and(|m| m <= inst.t());
        return Ok(result);
    }
    let decomposition = match args.algo {
        Algo::Tensor => Some(load_decomposition(args, field)?),
        _ => None,
    };
    let mut trials = 0u64;
    let outcome = reduce_and_solve(inst, |tri| match args.algo {
        Algo::Brute => Ok(solve_brute(tri).answer),
        Algo::Wht => Ok(solve_wht(tri)?.answer),
        _ => {
            let d = decomposition.as_ref().expect("loaded above");
            let config = tensor_config(args, args.seed.wrapping_add(trials));
            let r = solve_tensor(tri, d, &config)?;
            trials += r.trials_used;
            Ok(r.answer)
        }
    })?;
    result.answer = outcome.answer;
    result.reduction_calls = Some(outcome.calls);
    if args.algo == Algo::Tensor {
        result.trials_used = trials;
    }
    Ok(result)
}

fn solve(args: SolveArgs, field: FieldContext) -> Result<Outcome> {
    let result = match read_json::<InstanceFile>(&args.file)? {
        InstanceFile::Tripartition(f) => solve_tripartition(&f.into_instance()?, &args, field)?,
        InstanceFile::SetCover(f) => solve_setcover(&f.into_instance()?, &args, field)?,
    };
    Ok(Outcome::ok(to_json_string(&result)? + "\n"))
}

fn tensor(cmd: TensorCommand, field: FieldContext) -> Result<Outcome> {
    match cmd {
        TensorCommand::BuildTk { k, out } => {
            let t = build_tk(k, field)?;
            emit(
                to_json_string(&TensorFile::from(&t))? + "\n",
                out.as_deref(),
            )
        }
        TensorCommand::Decompose {
            k,
            group: _,
            naive,
            out,
        } => {
            let d = if naive {
                naive_group_decomposition(k, field)?
            } else {
                best_group_decomposition(k, field)?.0
            };
            emit(
                to_json_string(&DecompositionFile::from(&d))? + "\n",
                out.as_deref(),
            )
        }
        TensorCommand::Verify { file, k } => {
            let text = std::fs::read_to_string(&file)?;
            let parsed = from_json_str::<DecompositionFile>(&text)
                .and_then(DecompositionFile::into_decomposition);
            let d = match parsed {
                Ok(d) => d,
                Err(e @ (Error::Input(_) | Error::Parameter(_) | Error::Dimension(_))) => {
                    return Ok(Outcome {
                        stdout: format!("invalid ({e})\n"),
                        code: e.exit_code(),
                    })
                }
                Err(e) => return Err(e),
            };
            let target = build_tk(k, d.field())?;
            let verdict = match d.verify(&target) {
                Ok(true) => format!("valid, rank {}\n", d.rank()),
                Ok(false) => "invalid\n".to_string(),
                Err(Error::Dimension(msg)) => format!("invalid ({msg})\n"),
                Err(e) => return Err(e),
            };
            Ok(Outcome::ok(verdict))
        }
        TensorCommand::Bounds {
            k,
            candidate_rank,
            json,
        } => {
            let report = bounds_report(k, candidate_rank)?;
            Ok(Outcome::ok(if json {
                to_json_string(&report)? + "\n"
            } else {
                format!("{report}\n")
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<Outcome> {
        let mut full = vec!["tkrank"];
        full.extend_from_slice(args);
        run(Cli::try_parse_from(full).expect("parses"))
    }

    #[test]
    fn gen_is_deterministic() {
        let a = run_args(&["gen", "tripartition", "--n", "3", "--plant", "--seed", "1"]).unwrap();
        let b = run_args(&["gen", "tripartition", "--n", "3", "--plant", "--seed", "1"]).unwrap();
        assert_eq!(a, b);
        let inst = from_json_str::<TripartitionFile>(&a.stdout)
            .unwrap()
            .into_instance()
            .unwrap();
        assert!(solve_brute(&inst).answer);
        let empty = run_args(&["gen", "tripartition", "--n", "3", "--size", "0"]).unwrap();
        let inst = from_json_str::<TripartitionFile>(&empty.stdout)
            .unwrap()
            .into_instance()
            .unwrap();
        assert!(!solve_brute(&inst).answer);
    }

    #[test]
    fn tensor_bounds_k2() {
        let out = run_args(&["tensor", "bounds", "--k", "2"]).unwrap();
        assert!(out.stdout.contains("640/81"), "{}", out.stdout);
    }

    #[test]
    fn guard_and_parameter_errors() {
        let err = run_args(&["tensor", "build-tk", "--k", "9"]).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
        let err = run_args(&["--modulus", "4", "bounds"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
