//! Oracle-agreement corpus: every fast routine checked against an exact
//! counterpart on seeded instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    first_beating_k, limiting_base_per_element, runtime_base_row, runtime_base_table,
};
use crate::combinatorics::{binomial, Permutation};
use crate::error::Result;
use crate::field::FieldContext;
use crate::generate::{random_setcover, random_tripartition};
use crate::setcover::{reduce_and_solve, solve_brute_setcover};
use crate::tensor::Decomposition;
use crate::tk::{
    bounds_report, build_tk, dimension, group_decomposition, support_size, verify_tightness,
};
use crate::tripartition::{
    solve_brute, solve_tensor, solve_wht, survives_filter, TensorSolverConfig,
};

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionCertificate {
    pub k: usize,
    pub rank: usize,
    pub valid: bool,
}

pub fn decomposition_certificates(
    ks: &[usize],
    field: FieldContext,
) -> Result<Vec<DecompositionCertificate>> {
    ks.iter()
        .map(|&k| {
            let d = group_decomposition(k, field)?;
            Ok(DecompositionCertificate {
                k,
                rank: d.rank(),
                valid: d.verify(&build_tk(k, field)?)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct StructuralCertificate {
    pub k: usize,
    pub tight: bool,
    pub dimension: usize,
    pub flattening_ranks: [usize; 3],
}

pub fn structural_certificates(
    ks: &[usize],
    field: FieldContext,
) -> Result<Vec<StructuralCertificate>> {
    ks.iter()
        .map(|&k| {
            let t = build_tk(k, field)?;
            Ok(StructuralCertificate {
                k,
                tight: verify_tightness(k)?,
                dimension: dimension(k),
                flattening_ranks: [
                    t.flattening_rank(1)?,
                    t.flattening_rank(2)?,
                    t.flattening_rank(3)?,
                ],
            })
        })
        .collect()
}

/// `(k, enumerated support, C(3k,k) C(2k,k))` per `k`.
pub fn support_sizes(k_max: usize, field: FieldContext) -> Result<Vec<(usize, usize, usize)>> {
    (1..=k_max)
        .map(|k| Ok((k, build_tk(k, field)?.support_len(), support_size(k))))
        .collect()
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TripartitionCorpus {
    pub instances: usize,
    pub yes_instances: usize,
    pub answer_mismatches: usize,
    pub count_mismatches: usize,
    pub tensor_runs_on_no: usize,
    pub false_positives: usize,
    pub tensor_runs_on_yes: usize,
    pub detections: usize,
}

impl TripartitionCorpus {
    pub fn detection_rate(&self) -> f64 {
        self.detections as f64 / self.tensor_runs_on_yes.max(1) as f64
    }
}

/// Random instances with `n` in `1..=max_n`, half of them planted; the
/// tensor solver runs once per instance for each `k`.
pub fn tripartition_corpus(
    instances: usize,
    max_n: usize,
    ks: &[usize],
    lambda: f64,
    seed: u64,
    field: FieldContext,
) -> Result<TripartitionCorpus> {
    let decompositions: Vec<(usize, Decomposition)> = ks
        .iter()
        .map(|&k| Ok((k, group_decomposition(k, field)?)))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = TripartitionCorpus::default();
    for i in 0..instances {
        let n = rng.gen_range(1..=max_n);
        let size = rng.gen_range(0..=6);
        let inst = random_tripartition(n, size, i % 2 == 0, &mut rng)?;
        let brute = solve_brute(&inst);
        let wht = solve_wht(&inst)?;
        stats.instances += 1;
        stats.answer_mismatches += usize::from(brute.answer != wht.answer);
        stats.count_mismatches += usize::from(brute.count as i128 != wht.count);
        stats.yes_instances += usize::from(brute.answer);
        for (k, d) in &decompositions {
            let config = TensorSolverConfig {
                lambda,
                ..TensorSolverConfig::new(*k, rng.gen())
            };
            let answer = solve_tensor(&inst, d, &config)?.answer;
            if brute.answer {
                stats.tensor_runs_on_yes += 1;
                stats.detections += usize::from(answer);
            } else {
                stats.tensor_runs_on_no += 1;
                stats.false_positives += usize::from(answer);
            }
        }
    }
    Ok(stats)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SetCoverCorpus {
    pub instances: usize,
    pub yes_instances: usize,
    pub mismatches: usize,
    pub fallbacks: usize,
    pub solver_calls: usize,
}

/// Random set cover instances with `n <= max_n`, `s <= max_s`, `t <= max_t`,
/// decided by the reduction with the Walsh–Hadamard solver and by the exact
/// solver.
pub fn setcover_corpus(
    instances: usize,
    max_n: usize,
    max_s: usize,
    max_t: usize,
    seed: u64,
) -> Result<SetCoverCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SetCoverCorpus::default();
    while stats.instances < instances {
        let n = rng.gen_range(1..=max_n);
        let s = rng.gen_range(1..=max_s);
        let t = rng.gen_range(1..=max_t);
        let plant = rng.gen_bool(0.5) && n.div_ceil(s) <= t;
        let inst = random_setcover(n, s, t, rng.gen_range(1..=2 * n), plant, &mut rng)?;
        let exact = solve_brute_setcover(&inst)?;
        let outcome = reduce_and_solve(&inst, |tri| Ok(solve_wht(tri)?.answer))?;
        stats.instances += 1;
        stats.yes_instances += usize::from(exact);
        stats.mismatches += usize::from(exact != outcome.answer);
        stats.fallbacks += usize::from(outcome.fell_back);
        stats.solver_calls += outcome.calls;
    }
    Ok(stats)
}

/// Fraction of uniform permutations under which a fixed ordered partition
/// of `[3n]` survives into the balanced code.
pub fn survival_frequency(n: usize, k: usize, draws: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = random_tripartition(n, 0, true, &mut rng)?;
    let triple = [0, 1, 2].map(|i| inst.family(i)[0]);
    let hits = (0..draws)
        .filter(|_| survives_filter(&triple, &Permutation::random(3 * n, &mut rng), k))
        .count();
    Ok(hits as f64 / draws as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{:<4}  {:<28}  {}\n",
                    if c.passed { "ok" } else { "FAIL" },
                    c.name,
                    c.detail
                )
            })
            .collect()
    }
}

/// Runs the corpus; `quick` trims the sizes to a few seconds' work.
pub fn run_selftest(quick: bool, seed: u64, field: FieldContext) -> Result<SelftestReport> {
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        })
    };
    let ks: &[usize] = if quick { &[1, 2] } else { &[1, 2, 3] };

    let certs = decomposition_certificates(ks, field)?;
    push(
        "decomposition certificates",
        certs
            .iter()
            .all(|c| c.valid && c.rank == 1 << (3 * c.k - 1)),
        certs
            .iter()
            .map(|c| {
                format!(
                    "k={}: rank {} {}",
                    c.k,
                    c.rank,
                    if c.valid { "valid" } else { "invalid" }
                )
            })
            .collect::<Vec<_>>()
            .join(", "),
    );

    let structure = structural_certificates(ks, field)?;
    push(
        "tightness and conciseness",
        structure
            .iter()
            .all(|c| c.tight && c.flattening_ranks.iter().all(|&r| r == c.dimension)),
        structure
            .iter()
            .map(|c| format!("k={}: {:?}/{}", c.k, c.flattening_ranks, c.dimension))
            .collect::<Vec<_>>()
            .join(", "),
    );

    let supports = support_sizes(if quick { 3 } else { 4 }, field)?;
    push(
        "support sizes",
        supports.iter().all(|(_, a, b)| a == b),
        supports
            .iter()
            .map(|(k, a, _)| format!("k={k}: {a}"))
            .collect::<Vec<_>>()
            .join(", "),
    );

    let tri = tripartition_corpus(if quick { 100 } else { 500 }, 4, &[1, 2], 5.0, seed, field)?;
    push(
        "tripartition oracles",
        tri.answer_mismatches == 0
            && tri.count_mismatches == 0
            && tri.false_positives == 0
            && tri.detection_rate() >= 0.95,
        format!(
            "{} instances ({} yes), {} count mismatches, {} false positives, detection {:.3}",
            tri.instances,
            tri.yes_instances,
            tri.count_mismatches,
            tri.false_positives,
            tri.detection_rate()
        ),
    );

    let sc = setcover_corpus(
        if quick { 40 } else { 200 },
        if quick { 9 } else { 12 },
        3,
        5,
        seed,
    )?;
    push(
        "set cover reduction",
        sc.mismatches == 0,
        format!(
            "{} instances ({} yes), {} mismatches, {} solver calls",
            sc.instances, sc.yes_instances, sc.mismatches, sc.solver_calls
        ),
    );

    let freq = survival_frequency(2, 1, 10_000, seed)?;
    push(
        "survival frequency",
        (freq - 0.4).abs() <= 0.02,
        format!("{freq:.4} vs 2/5"),
    );

    let crossover = first_beating_k(&runtime_base_table(20)?);
    let per_element = runtime_base_row(50)?.base_per_element;
    let b1 = bounds_report(1, None)?;
    push(
        "constants",
        crossover == Some(11)
            && (per_element - limiting_base_per_element()).abs() <= 0.05
            && b1.rank_threshold.to_string() == "16/9"
            && b1.simplified_threshold.to_string() == "16/9"
            && binomial(33, 11) > 100_000_000u64.into(),
        format!(
            "crossover k={crossover:?}, base(50)={per_element:.4}, thresholds(1)={}",
            b1.rank_threshold
        ),
    );

    Ok(SelftestReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_selftest_passes() {
        let report = run_selftest(true, 5, FieldContext::mersenne31()).unwrap();
        assert!(report.passed(), "{}", report.render());
        assert_eq!(report.render().lines().count(), report.checks.len());
    }

    #[test]
    fn corpora_are_seeded() {
        let f = FieldContext::mersenne31();
        let a = tripartition_corpus(20, 3, &[1], 5.0, 9, f).unwrap();
        let b = tripartition_corpus(20, 3, &[1], 5.0, 9, f).unwrap();
        assert_eq!(
            (a.yes_instances, a.detections),
            (b.yes_instances, b.detections)
        );
        assert!(a.yes_instances >= 10);
    }
}
