//! Wall-clock timing of the tripartition solvers over a range of sizes.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::generate::random_tripartition;
use crate::tk::best_group_decomposition;
use crate::tripartition::{
    solve_brute, solve_tensor, solve_wht, TensorSolverConfig, TripartitionInstance, MAX_WHT_N,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Brute,
    Wht,
    Tensor,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Suite::Brute),
            "wht" => Ok(Suite::Wht),
            "tensor" => Ok(Suite::Tensor),
            other => Err(Error::Parameter(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub suite: Suite,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    /// Members per family before the planted triple.
    pub family_size: usize,
    /// Each timed sample repeats the solve until at least this much time passes.
    pub min_sample: Duration,
    /// Block parameter for the tensor suite.
    pub k: usize,
}

impl BenchConfig {
    pub fn new(suite: Suite, sizes: Vec<usize>) -> Self {
        BenchConfig {
            suite,
            sizes,
            repetitions: 5,
            seed: 0,
            family_size: 8,
            min_sample: Duration::from_millis(20),
            k: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub solver: Suite,
    pub n: usize,
    pub family_sizes: [usize; 3],
    pub answer: bool,
    /// Median seconds per solve.
    pub median_secs: f64,
    /// Ratio to the previous row's median, if any.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub seed: u64,
    pub repetitions: usize,
    pub rows: Vec<BenchRow>,
}

fn guard(config: &BenchConfig) -> Result<()> {
    let limit = match config.suite {
        Suite::Wht => MAX_WHT_N,
        Suite::Brute => 7,
        Suite::Tensor => 6,
    };
    match config.sizes.iter().find(|&&n| n == 0 || n > limit) {
        Some(n) => Err(Error::Guard(format!(
            "{:?} bench takes 1 <= n <= {limit}, got {n}",
            config.suite
        ))),
        None => Ok(()),
    }
}

/// One timed sample: seconds per call of `f`, batching calls until at least
/// `min_sample` has passed.
pub fn time_sample<F: FnMut()>(mut f: F, min_sample: Duration) -> f64 {
    let start = Instant::now();
    let mut calls = 0u32;
    while calls == 0 || start.elapsed() < min_sample {
        f();
        calls += 1;
    }
    start.elapsed().as_secs_f64() / calls as f64
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    samples[samples.len() / 2]
}

/// Samples are taken round-robin over the sizes, so slow drift in machine
/// speed affects every size alike.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    guard(config)?;
    let decomposition = match config.suite {
        Suite::Tensor => Some(best_group_decomposition(config.k, FieldContext::from_env()?)?.0),
        _ => None,
    };
    let solver = TensorSolverConfig::new(config.k, config.seed);
    let instances: Vec<TripartitionInstance> = config
        .sizes
        .iter()
        .map(|&n| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (n as u64) << 32);
            random_tripartition(n, config.family_size, true, &mut rng)
        })
        .collect::<Result<_>>()?;
    let solve = |inst: &TripartitionInstance| -> Result<bool> {
        Ok(match config.suite {
            Suite::Brute => solve_brute(inst).answer,
            Suite::Wht => solve_wht(inst)?.answer,
            Suite::Tensor => {
                let d = decomposition.as_ref().expect("built above");
                solve_tensor(inst, d, &solver)?.answer
            }
        })
    };
    let answers: Vec<bool> = instances.iter().map(&solve).collect::<Result<_>>()?;
    let mut samples = vec![Vec::with_capacity(config.repetitions); instances.len()];
    for _ in 0..config.repetitions.max(1) {
        for (inst, out) in instances.iter().zip(samples.iter_mut()) {
            out.push(time_sample(|| drop(solve(inst)), config.min_sample));
        }
    }
    let mut rows: Vec<BenchRow> = Vec::new();
    for ((inst, answer), times) in instances.iter().zip(answers).zip(samples) {
        let median_secs = median(times);
        let ratio = rows.last().map(|prev| median_secs / prev.median_secs);
        rows.push(BenchRow {
            solver: config.suite,
            n: inst.n(),
            family_sizes: [0, 1, 2].map(|i| inst.family(i).len()),
            answer,
            median_secs,
            ratio,
        });
    }
    Ok(BenchReport {
        seed: config.seed,
        repetitions: config.repetitions,
        rows,
    })
}

pub fn render_bench(report: &BenchReport) -> String {
    let mut out = format!(
        "{:>7}  {:>3}  {:>14}  {:>6}  {:>12}  {:>7}\n",
        "solver", "n", "|F1|,|F2|,|F3|", "answer", "median (s)", "ratio"
    );
    for r in &report.rows {
        let sizes = format!(
            "{},{},{}",
            r.family_sizes[0], r.family_sizes[1], r.family_sizes[2]
        );
        let ratio = r
            .ratio
            .map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
        out.push_str(&format!(
            "{:>7}  {:>3}  {:>14}  {:>6}  {:>12.4e}  {:>7}\n",
            format!("{:?}", r.solver).to_lowercase(),
            r.n,
            sizes,
            r.answer,
            r.median_secs,
            ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(suite: Suite, sizes: Vec<usize>) -> BenchConfig {
        BenchConfig {
            repetitions: 1,
            min_sample: Duration::ZERO,
            ..BenchConfig::new(suite, sizes)
        }
    }

    #[test]
    fn answers_are_reproducible() {
        for suite in [Suite::Brute, Suite::Wht, Suite::Tensor] {
            let a = run_bench(&quick(suite, vec![2, 3])).unwrap();
            let b = run_bench(&quick(suite, vec![2, 3])).unwrap();
            let key = |r: &BenchReport| {
                r.rows
                    .iter()
                    .map(|x| (x.n, x.family_sizes, x.answer))
                    .collect::<Vec<_>>()
            };
            assert_eq!(key(&a), key(&b));
            // planted instances are yes-instances; the tensor solver may miss
            if suite != Suite::Tensor {
                assert!(a.rows.iter().all(|r| r.answer));
            }
            assert!(a.rows[0].ratio.is_none() && a.rows[1].ratio.is_some());
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(
            run_bench(&quick(Suite::Wht, vec![9])),
            Err(Error::Guard(_))
        ));
        assert!(matches!(
            run_bench(&quick(Suite::Brute, vec![0])),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn renders_one_line_per_size() {
        let report = run_bench(&quick(Suite::Wht, vec![1, 2, 3])).unwrap();
        assert_eq!(render_bench(&report).lines().count(), 4);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["rows"][0]["solver"], "wht");
    }
}
