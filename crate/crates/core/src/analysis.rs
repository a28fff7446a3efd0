//! Runtime bases and rank thresholds as functions of the block parameter `k`.
//!
//! If `T_k` had asymptotic rank `C(3k, k)` (its dimension), the tensor
//! solver would run in `(27^k / C(2k, k))^(n/k)` per tripartition block. The
//! tables below tabulate that base exactly, against `8`, and alongside the
//! base obtained from the proven rank bound `2^(3k-1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::tk::{big, bounds_report, pow_big, BoundsReport, ExactRational};

pub const MAX_TABLE_K: u64 = 200;

#[derive(Debug, Clone, Serialize)]
pub struct RuntimeBaseRow {
    pub k: u64,
    /// `C(3k,k) * 27^k / (C(3k,k) C(2k,k))`, i.e. `27^k / C(2k,k)`.
    pub base_per_block: ExactRational,
    /// `base_per_block^(1/(3k))`.
    pub base_per_element: f64,
    /// `base_per_block^(1/k) < 8`, decided exactly as `27^k < 8^k C(2k,k)`.
    pub beats_fourier: bool,
    /// Same base with the proven rank `2^(3k-1)` in place of `C(3k,k)`.
    pub unconditional_base_per_block: ExactRational,
    pub unconditional_beats_fourier: bool,
}

/// `(27 / 2^(2/3))^(1/3) = 3 / 2^(2/3)`, the limit of `base_per_element`.
pub fn limiting_base_per_element() -> f64 {
    3.0 / 2f64.powf(2.0 / 3.0)
}

fn base_exact(k: u64, rank: BigInt) -> BigRational {
    BigRational::new(
        rank * pow_big(27, k),
        big(binomial(3 * k, k)) * big(binomial(2 * k, k)),
    )
}

/// `ln(27^k / C(2k,k))` accumulated term by term in floating point.
pub fn ln_base_per_block_float(k: u64) -> f64 {
    let mut ln = k as f64 * 27f64.ln();
    for i in 1..=k {
        ln -= ((k + i) as f64 / i as f64).ln();
    }
    ln
}

pub fn runtime_base_row(k: u64) -> Result<RuntimeBaseRow> {
    if k == 0 || k > MAX_TABLE_K {
        return Err(Error::Parameter(format!(
            "k must be in 1..={MAX_TABLE_K}, got {k}"
        )));
    }
    let conditional = base_exact(k, big(binomial(3 * k, k)));
    let unconditional = base_exact(k, pow_big(2, 3 * k - 1));
    let eight_k = BigRational::from_integer(pow_big(8, k));
    let base_per_element = (ln_base_per_block_float(k) / (3 * k) as f64).exp();
    Ok(RuntimeBaseRow {
        k,
        beats_fourier: conditional < eight_k,
        unconditional_beats_fourier: unconditional < eight_k,
        base_per_block: (&conditional).into(),
        base_per_element,
        unconditional_base_per_block: (&unconditional).into(),
    })
}

pub fn runtime_base_table(k_max: u64) -> Result<Vec<RuntimeBaseRow>> {
    (1..=k_max).map(runtime_base_row).collect()
}

/// Smallest `k` whose conditional base beats the `8^n` Fourier algorithm.
pub fn first_beating_k(rows: &[RuntimeBaseRow]) -> Option<u64> {
    rows.iter().find(|r| r.beats_fourier).map(|r| r.k)
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdRow {
    pub report: BoundsReport,
    /// `rank_threshold / 8^k = C(3k,k) C(2k,k) / 27^k`.
    pub threshold_over_8k: ExactRational,
}

pub fn rank_threshold_table(k_max: u64) -> Result<Vec<ThresholdRow>> {
    if k_max > MAX_TABLE_K {
        return Err(Error::Parameter(format!(
            "k_max must be at most {MAX_TABLE_K}"
        )));
    }
    (1..=k_max)
        .map(|k| {
            let ratio = BigRational::new(
                big(binomial(3 * k, k)) * big(binomial(2 * k, k)),
                pow_big(27, k),
            );
            Ok(ThresholdRow {
                report: bounds_report(k, None)?,
                threshold_over_8k: (&ratio).into(),
            })
        })
        .collect()
}

pub fn render_runtime_table(rows: &[RuntimeBaseRow]) -> String {
    let mut out = format!(
        "{:>4}  {:>14}  {:>10}  {:>8}  {:>6}  {:>16}\n",
        "k", "base/block", "(..)^(1/k)", "per elt", "< 8", "proven base^(1/k)"
    );
    for r in rows {
        let k = r.k as f64;
        let per_block = r.base_per_block.approx;
        let proven = r.unconditional_base_per_block.approx;
        out.push_str(&format!(
            "{:>4}  {:>14.6e}  {:>10.5}  {:>8.5}  {:>6}  {:>16.5}\n",
            r.k,
            per_block,
            per_block.powf(1.0 / k),
            r.base_per_element,
            if r.beats_fourier { "yes" } else { "no" },
            proven.powf(1.0 / k),
        ));
    }
    out
}

pub fn render_threshold_table(rows: &[ThresholdRow]) -> String {
    let mut out = format!(
        "{:>4}  {:>14}  {:>14}  {:>14}  {:>12}\n",
        "k", "rank threshold", "(2/9)8^k/k", "8^k/2", "thr / 8^k"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>4}  {:>14.6e}  {:>14.6e}  {:>14.6e}  {:>12.6e}\n",
            r.report.k,
            r.report.rank_threshold.approx,
            r.report.simplified_threshold.approx,
            r.report.known_upper_bound.approx,
            r.threshold_over_8k.approx,
        ));
    }
    out
}

/// Parses an [`ExactRational`] back into a `BigRational`.
pub fn to_rational(q: &ExactRational) -> Result<BigRational> {
    let parse = |s: &str| {
        s.parse::<BigInt>()
            .map_err(|_| Error::Input(format!("{s:?} is not an integer")))
    };
    Ok(BigRational::new(
        parse(&q.numerator)?,
        parse(&q.denominator)?,
    ))
}

pub fn approx(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tk::{rank_threshold, simplified_threshold};

    #[test]
    fn k1_row() {
        let row = runtime_base_row(1).unwrap();
        assert_eq!(row.base_per_block.to_string(), "27/2");
        assert!(!row.beats_fourier);
        assert!(!row.unconditional_beats_fourier);
    }

    #[test]
    fn crossover_at_eleven() {
        let rows = runtime_base_table(30).unwrap();
        assert_eq!(first_beating_k(&rows), Some(11));
        let root = |k: usize| rows[k - 1].base_per_block.approx.powf(1.0 / k as f64);
        assert!((root(11) - 7.94).abs() < 0.01, "{}", root(11));
        assert!((root(10) - 8.03).abs() < 0.01, "{}", root(10));
        // once below 8 it stays below
        assert!(rows[10..].iter().all(|r| r.beats_fourier));
        assert!(rows.iter().all(|r| !r.unconditional_beats_fourier));
    }

    #[test]
    fn per_element_base_approaches_limit() {
        let row = runtime_base_row(50).unwrap();
        assert!((row.base_per_element - limiting_base_per_element()).abs() < 0.05);
        assert!((limiting_base_per_element() - 1.8899).abs() < 1e-4);
        let far = runtime_base_row(200).unwrap();
        assert!(far.base_per_element < row.base_per_element);
    }

    #[test]
    fn exact_and_float_routes_agree() {
        for row in runtime_base_table(MAX_TABLE_K).unwrap() {
            let exact = to_rational(&row.base_per_block).unwrap();
            let via_float = ln_base_per_block_float(row.k).exp();
            let rel = (approx(&exact) - via_float).abs() / via_float;
            assert!(rel < 1e-10, "k={} rel={rel}", row.k);
        }
    }

    #[test]
    fn threshold_table_properties() {
        let rows = rank_threshold_table(50).unwrap();
        assert_eq!(rows[0].report, bounds_report(1, None).unwrap());
        let ratios: Vec<BigRational> = rows
            .iter()
            .map(|r| to_rational(&r.threshold_over_8k).unwrap())
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
        for k in 1..=50u64 {
            assert!(simplified_threshold(k) <= rank_threshold(k), "k={k}");
            assert_eq!(
                ratios[k as usize - 1].clone() * BigRational::from_integer(pow_big(8, k)),
                rank_threshold(k)
            );
        }
    }

    #[test]
    fn renders() {
        let text = render_runtime_table(&runtime_base_table(12).unwrap());
        assert_eq!(text.lines().count(), 13);
        assert!(render_threshold_table(&rank_threshold_table(3).unwrap()).contains("8^k/2"));
        assert!(runtime_base_row(0).is_err());
    }
}
