//! The partition tensors `T_k`.
//!
//! `T_k` has one axis position per `k`-subset of `[3k]` (colex order) and a
//! coefficient one at `(S, T, U)` exactly when the three subsets partition
//! `[3k]`. This module builds it, checks that it is tight and concise, and
//! writes down rank decompositions from characters of `Z_2^m`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, choose, enumerate_ksubsets, low_bits, rank_bits, SubsetMask};
use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};
use crate::tensor::{Decomposition, RankOneTerm, SparseTensor};

/// Largest `k` for which `T_k` is materialised.
pub const MAX_BUILD_K: usize = 4;
/// Largest `k` for the exhaustive triple checks.
pub const MAX_EXHAUSTIVE_K: usize = 3;

pub fn dimension(k: usize) -> usize {
    choose(3 * k, k)
}

/// `C(3k, k) * C(2k, k)`, the number of ordered partitions of `[3k]` into
/// three `k`-subsets.
pub fn support_size(k: usize) -> usize {
    choose(3 * k, k) * choose(2 * k, k)
}

pub fn build_tk(k: usize, field: FieldContext) -> Result<SparseTensor> {
    if k == 0 || k > MAX_BUILD_K {
        return Err(Error::Guard(format!(
            "T_k is built for 1 <= k <= {MAX_BUILD_K}, got {k}"
        )));
    }
    let n = dimension(k);
    let full = low_bits(3 * k);
    let subsets = enumerate_ksubsets(3 * k, k);
    let mut entries = Vec::with_capacity(support_size(k));
    for (i, s) in subsets.iter().enumerate() {
        for (j, t) in subsets.iter().enumerate() {
            if !s.is_disjoint(*t) {
                continue;
            }
            let u = full & !(s.bits() | t.bits());
            entries.push(([i, j, rank_bits(u)], FieldElement::ONE));
        }
    }
    SparseTensor::from_entries(field, [n, n, n], entries)
}

/// `f(S) = sum_{i in S} 4^i` and the target `sum_{i=1}^{3k} 4^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightnessWitness {
    pub labels: Vec<u64>,
    pub target: u64,
}

impl TightnessWitness {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_EXHAUSTIVE_K {
            return Err(Error::Guard(format!(
                "tightness is checked for 1 <= k <= {MAX_EXHAUSTIVE_K}"
            )));
        }
        let label = |s: &SubsetMask| s.iter().map(|i| 4u64.pow(i as u32)).sum::<u64>();
        let labels = enumerate_ksubsets(3 * k, k).iter().map(label).collect();
        let target = (1..=3 * k as u32).map(|i| 4u64.pow(i)).sum();
        Ok(TightnessWitness { labels, target })
    }

    pub fn is_injective(&self) -> bool {
        let mut sorted = self.labels.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }
}

/// Exhaustively checks `f(S) + f(T) + f(U) = target` iff `(S, T, U)` lies
/// in the support of `T_k`, plus injectivity of `f`.
pub fn verify_tightness(k: usize) -> Result<bool> {
    let witness = TightnessWitness::new(k)?;
    let tk = build_tk(k, FieldContext::mersenne31())?;
    if !witness.is_injective() {
        return Ok(false);
    }
    let n = witness.labels.len();
    for i in 0..n {
        for j in 0..n {
            let partial = witness.labels[i] + witness.labels[j];
            for l in 0..n {
                let hits = partial + witness.labels[l] == witness.target;
                if hits != tk.contains([i, j, l]) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// An element of `Z_2^(3k-1)`; element `e` of `{2, ..., 3k}` sits at bit `e - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupLabel {
    pub bits: u64,
    pub len: usize,
}

impl std::ops::Add for GroupLabel {
    type Output = GroupLabel;

    fn add(self, other: GroupLabel) -> GroupLabel {
        debug_assert_eq!(self.len, other.len);
        GroupLabel {
            bits: self.bits ^ other.bits,
            len: self.len,
        }
    }
}

impl GroupLabel {
    pub fn all_ones(len: usize) -> GroupLabel {
        GroupLabel {
            bits: low_bits(len),
            len,
        }
    }
}

impl std::fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.bits >> i & 1)?;
        }
        Ok(())
    }
}

/// Labels `k`-subsets of `[3k]` in `Z_2^(3k-1)` by the indicator of
/// `S \ {1}` on coordinates `2..=3k`.
///
/// Three labels sum to all-ones iff the subsets are pairwise disjoint: the
/// weights sum to `3k - c` where `c` counts subsets containing 1, and every
/// coordinate must be hit an odd number of times, which forces `c = 1` and
/// multiplicity one everywhere.
pub fn group_map_f(s: SubsetMask, k: usize) -> Result<GroupLabel> {
    if s.len() != k {
        return Err(Error::Cardinality {
            expected: k,
            actual: s.len(),
        });
    }
    if s.ground() != 3 * k {
        return Err(Error::Parameter(format!(
            "subset of [{}] where [{}] was expected",
            s.ground(),
            3 * k
        )));
    }
    Ok(GroupLabel {
        bits: s.bits() >> 1,
        len: 3 * k - 1,
    })
}

/// The variant that adds the all-ones vector to labels of subsets avoiding 1.
/// It satisfies the disjointness property only for odd `k`.
pub fn shifted_group_map_f(s: SubsetMask, k: usize) -> Result<GroupLabel> {
    let plain = group_map_f(s, k)?;
    if s.contains(1) {
        Ok(plain)
    } else {
        Ok(plain + GroupLabel::all_ones(plain.len))
    }
}

fn check_disjointness_labels(k: usize, labels: &[u64], x: u64) -> bool {
    let subsets = enumerate_ksubsets(3 * k, k);
    let n = subsets.len();
    for i in 0..n {
        for j in 0..n {
            let ij_disjoint = subsets[i].is_disjoint(subsets[j]);
            let partial = labels[i] ^ labels[j];
            for l in 0..n {
                let disjoint = ij_disjoint
                    && subsets[i].is_disjoint(subsets[l])
                    && subsets[j].is_disjoint(subsets[l]);
                if (partial ^ labels[l] == x) != disjoint {
                    return false;
                }
            }
        }
    }
    true
}

/// Exhaustive check that `f(S) + f(T) + f(U)` is all-ones exactly for
/// pairwise disjoint triples.
pub fn verify_group_map(k: usize) -> Result<bool> {
    if k == 0 || k > MAX_EXHAUSTIVE_K {
        return Err(Error::Guard(format!(
            "group map is checked for 1 <= k <= {MAX_EXHAUSTIVE_K}"
        )));
    }
    let labels: Vec<u64> = enumerate_ksubsets(3 * k, k)
        .into_iter()
        .map(|s| group_map_f(s, k).map(|g| g.bits))
        .collect::<Result<_>>()?;
    Ok(check_disjointness_labels(k, &labels, low_bits(3 * k - 1)))
}

/// Character decomposition of `sum_{a+b+c=x} X_a Y_b Z_c` over `Z_2^m`,
/// restricted to the axis positions named by `labels`.
fn character_decomposition(
    field: FieldContext,
    labels: &[u64],
    group_bits: usize,
    x: u64,
) -> Result<Decomposition> {
    let n = labels.len();
    let order = 1u64 << group_bits;
    let inv_order = field.inv(field.elem(order)).ok_or_else(|| {
        Error::Parameter(format!("|G| = {order} vanishes mod {}", field.modulus()))
    })?;
    let terms = (0..order)
        .map(|chi| {
            let vector: Vec<FieldElement> = labels
                .iter()
                .map(|&a| field.sign((chi & a).count_ones() % 2 == 1))
                .collect();
            let scale = field.mul(field.sign((chi & x).count_ones() % 2 == 1), inv_order);
            RankOneTerm {
                u: vector.clone(),
                v: vector.clone(),
                w: vector,
                scale,
            }
        })
        .collect();
    Decomposition::new(field, [n, n, n], terms)
}

/// `2^(3k-1)`-term decomposition of `T_k` from the group `Z_2^(3k-1)`.
pub fn group_decomposition(k: usize, field: FieldContext) -> Result<Decomposition> {
    if k == 0 || 3 * k - 1 > 30 {
        return Err(Error::Guard(format!("group decomposition for k = {k}")));
    }
    let labels: Vec<u64> = enumerate_ksubsets(3 * k, k)
        .into_iter()
        .map(|s| group_map_f(s, k).map(|g| g.bits))
        .collect::<Result<_>>()?;
    character_decomposition(field, &labels, 3 * k - 1, low_bits(3 * k - 1))
}

/// `2^(3k)`-term decomposition of `T_k` from `Z_2^(3k)` with plain indicator labels.
pub fn naive_group_decomposition(k: usize, field: FieldContext) -> Result<Decomposition> {
    if k == 0 || 3 * k > 30 {
        return Err(Error::Guard(format!("group decomposition for k = {k}")));
    }
    let labels: Vec<u64> = enumerate_ksubsets(3 * k, k)
        .iter()
        .map(|s| s.bits())
        .collect();
    character_decomposition(field, &labels, 3 * k, low_bits(3 * k))
}

/// Decomposition for `T_k` together with whether the smaller group had to
/// be abandoned because its labelling failed the exhaustive check.
pub fn best_group_decomposition(k: usize, field: FieldContext) -> Result<(Decomposition, bool)> {
    if k <= MAX_EXHAUSTIVE_K && !verify_group_map(k)? {
        return Ok((naive_group_decomposition(k, field)?, true));
    }
    Ok((group_decomposition(k, field)?, false))
}

/// Probabilistic certificate: the decomposition and the tensor agree at
/// `points` uniformly random evaluation points.
pub fn certify_at_random_points<R: Rng + ?Sized>(
    d: &Decomposition,
    t: &SparseTensor,
    points: usize,
    rng: &mut R,
) -> Result<bool> {
    let f = d.field();
    let [n1, n2, n3] = t.dims();
    for _ in 0..points {
        let x: Vec<_> = (0..n1).map(|_| f.sample_uniform(rng)).collect();
        let y: Vec<_> = (0..n2).map(|_| f.sample_uniform(rng)).collect();
        let z: Vec<_> = (0..n3).map(|_| f.sample_uniform(rng)).collect();
        if d.eval(&x, &y, &z)? != t.eval_naive(&x, &y, &z)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An exact rational, serialised with decimal numerator and denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRational {
    pub numerator: String,
    pub denominator: String,
    pub approx: f64,
}

impl From<&BigRational> for ExactRational {
    fn from(q: &BigRational) -> Self {
        ExactRational {
            numerator: q.numer().to_string(),
            denominator: q.denom().to_string(),
            approx: q.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl std::fmt::Display for ExactRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.denominator == "1" {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

pub(crate) fn big(n: BigUint) -> BigInt {
    BigInt::from(n)
}

pub(crate) fn pow_big(base: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

/// `8^k * C(3k,k) * C(2k,k) / 27^k`: a rank for `T_k` below this would
/// contradict the set cover conjecture.
pub fn rank_threshold(k: u64) -> BigRational {
    BigRational::new(
        pow_big(8, k) * big(binomial(3 * k, k)) * big(binomial(2 * k, k)),
        pow_big(27, k),
    )
}

/// The weaker closed form `(2/9) * 8^k / k`.
pub fn simplified_threshold(k: u64) -> BigRational {
    BigRational::new(BigInt::from(2) * pow_big(8, k), BigInt::from(9 * k))
}

/// `8^k / 2`, the size of the group decomposition.
pub fn known_upper_bound(k: u64) -> BigRational {
    BigRational::new(pow_big(8, k), BigInt::from(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub k: u64,
    pub rank_threshold: ExactRational,
    pub simplified_threshold: ExactRational,
    pub known_upper_bound: ExactRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_rank: Option<u64>,
    /// Whether the candidate rank falls strictly below `rank_threshold`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutes_set_cover_conjecture: Option<bool>,
}

pub fn bounds_report(k: u64, candidate_rank: Option<u64>) -> Result<BoundsReport> {
    if k == 0 {
        return Err(Error::Parameter("bounds need k >= 1".into()));
    }
    let threshold = rank_threshold(k);
    let below = candidate_rank.map(|r| BigRational::from_integer(BigInt::from(r)) < threshold);
    Ok(BoundsReport {
        k,
        rank_threshold: (&threshold).into(),
        simplified_threshold: (&simplified_threshold(k)).into(),
        known_upper_bound: (&known_upper_bound(k)).into(),
        candidate_rank,
        refutes_set_cover_conjecture: below,
    })
}

impl std::fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "k                      {}", self.k)?;
        writeln!(
            f,
            "rank threshold         {} (~{:.4})",
            self.rank_threshold, self.rank_threshold.approx
        )?;
        writeln!(
            f,
            "(2/9) 8^k / k          {} (~{:.4})",
            self.simplified_threshold, self.simplified_threshold.approx
        )?;
        write!(f, "known upper bound      {}", self.known_upper_bound)?;
        if let (Some(r), Some(below)) = (self.candidate_rank, self.refutes_set_cover_conjecture) {
            write!(
                f,
                "\ncandidate rank         {r} ({})",
                if below {
                    "below threshold"
                } else {
                    "not below threshold"
                }
            )?;
        }
        Ok(())
    }
}
