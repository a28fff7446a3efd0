//! Balanced tripartitioning: given three families of `n`-subsets of `[3n]`,
//! is there one member of each that together partition `[3n]`?
//!
//! Three deciders share one instance type:
//! * [`solve_brute`] enumerates disjoint pairs and looks the complement up.
//! * [`solve_wht`] counts solutions exactly with Walsh–Hadamard transforms
//!   over `Z_2^(3n)` in `8^n poly(n)` time.
//! * [`solve_tensor`] permutes the universe at random, keeps the members
//!   that land in the balanced code and tests the restricted Kronecker power
//!   of `T_k` for being nonzero at a random point. One-sided error: it never
//!   reports a solution that does not exist.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{balanced_encode, binomial, choose, low_bits, Permutation, SubsetMask};
use crate::error::{Error, Result};
use crate::field::{FieldElement, WideInt};
use crate::tensor::Decomposition;

/// Largest block size accepted by [`solve_wht`] (`2^24` cells per table).
pub const MAX_WHT_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripartitionInstance {
    n: usize,
    families: [Vec<SubsetMask>; 3],
}

impl TripartitionInstance {
    /// Validates sizes and ground sets, then sorts and deduplicates each family.
    pub fn new(n: usize, families: [Vec<SubsetMask>; 3]) -> Result<Self> {
        if 3 * n > crate::combinatorics::MAX_GROUND {
            return Err(Error::Guard(format!(
                "universe [{}] exceeds 63 elements",
                3 * n
            )));
        }
        let mut families = families;
        for (i, family) in families.iter_mut().enumerate() {
            for s in family.iter_mut() {
                if s.len() != n {
                    return Err(Error::Parameter(format!(
                        "family {} has member {s} of size {}, expected {n}",
                        i + 1,
                        s.len()
                    )));
                }
                if s.bits() & !low_bits(3 * n) != 0 {
                    return Err(Error::Parameter(format!(
                        "family {} has member {s} outside [{}]",
                        i + 1,
                        3 * n
                    )));
                }
                *s = SubsetMask::from_bits(s.bits(), 3 * n)?;
            }
            family.sort_unstable();
            family.dedup();
        }
        Ok(TripartitionInstance { n, families })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe(&self) -> usize {
        3 * self.n
    }

    pub fn families(&self) -> &[Vec<SubsetMask>; 3] {
        &self.families
    }

    pub fn family(&self, i: usize) -> &[SubsetMask] {
        &self.families[i]
    }
}

/// Outcome of the exhaustive decider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteResult {
    pub answer: bool,
    pub witness: Option<[SubsetMask; 3]>,
    /// Number of ordered triples `(S1, S2, S3)` in `F1 x F2 x F3` that partition the universe.
    pub count: u64,
}

pub fn solve_brute(inst: &TripartitionInstance) -> BruteResult {
    let full = low_bits(inst.universe());
    let third: HashSet<u64> = inst.families[2].iter().map(|s| s.bits()).collect();
    let mut witness = None;
    let mut count = 0;
    for &a in &inst.families[0] {
        for &b in &inst.families[1] {
            if !a.is_disjoint(b) {
                continue;
            }
            let rest = full & !(a.bits() | b.bits());
            if third.contains(&rest) {
                count += 1;
                if witness.is_none() {
                    let c = SubsetMask::from_bits(rest, inst.universe()).expect("inside universe");
                    witness = Some([a, b, c]);
                }
            }
        }
    }
    BruteResult {
        answer: count > 0,
        witness,
        count,
    }
}

/// Butterfly levels below this span run chunk by chunk while the chunk is in cache.
const WHT_BLOCK: usize = 1 << 12;

/// In-place unnormalised Walsh–Hadamard transform; `data.len()` must be a power of two.
pub fn walsh_hadamard<T>(data: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let len = data.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    // the levels commute, so the low ones can be finished per chunk first
    for chunk in data.chunks_mut(WHT_BLOCK) {
        butterfly_levels(chunk, 1, chunk.len());
    }
    butterfly_levels(data, WHT_BLOCK.min(len), len);
}

/// Applies the levels `half, 2 half, ...` below `end`, two at a time where possible.
fn butterfly_levels<T>(data: &mut [T], mut half: usize, end: usize)
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    while 4 * half <= end {
        for chunk in data.chunks_exact_mut(4 * half) {
            let (ab, cd) = chunk.split_at_mut(2 * half);
            let (a, b) = ab.split_at_mut(half);
            let (c, d) = cd.split_at_mut(half);
            for i in 0..half {
                let (s0, s1) = (a[i] + b[i], a[i] - b[i]);
                let (s2, s3) = (c[i] + d[i], c[i] - d[i]);
                a[i] = s0 + s2;
                b[i] = s1 + s3;
                c[i] = s0 - s2;
                d[i] = s1 - s3;
            }
        }
        half *= 4;
    }
    if half < end {
        for chunk in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WhtResult {
    pub answer: bool,
    /// `(f1 * f2 * f3)(1^(3n))`, the number of ordered solution triples.
    pub count: WideInt,
}

thread_local! {
    /// Reused across calls so repeated solves do not fault in fresh pages.
    static WHT_SCRATCH: std::cell::RefCell<Vec<i32>> = const { std::cell::RefCell::new(Vec::new()) };
}

/// Runs the butterfly levels at or above `row` down the columns of the
/// `rows x row` layout of each table and returns `sum_w h1 h2 h3 (-1)^|w|`.
/// A group of adjacent columns from all three tables is transformed in a
/// buffer and summed straight away, so no table is rewritten.
fn sum_column_products(
    tables: &[i32],
    bufs: &mut [i32],
    size: usize,
    row: usize,
    group: usize,
) -> WideInt {
    const SIGNS: [i64; 16] = [1, -1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1, -1, 1];
    let rows = size / row;
    let mut total: WideInt = 0;
    for col in (0..row).step_by(group) {
        for (buf, table) in bufs.chunks_mut(rows * group).zip(tables.chunks(size)) {
            for r in 0..rows {
                buf[r * group..(r + 1) * group]
                    .copy_from_slice(&table[r * row + col..r * row + col + group]);
            }
            butterfly_levels(buf, group, rows * group);
        }
        let (b0, rest) = bufs.split_at(rows * group);
        let (b1, b2) = rest.split_at(rows * group);
        // |term| <= C(24, 8)^3 < 2^59, so a group of 16 fits in an i64
        for r in 0..rows {
            let mut partial: i64 = 0;
            let span = r * group..(r + 1) * group;
            for (sign, ((&x, &y), &z)) in SIGNS.iter().zip(
                b0[span.clone()]
                    .iter()
                    .zip(&b1[span.clone()])
                    .zip(&b2[span]),
            ) {
                partial += sign * (x as i64 * y as i64 * z as i64);
            }
            if ((r * row + col) as u64).count_ones() % 2 == 1 {
                total -= partial as WideInt;
            } else {
                total += partial as WideInt;
            }
        }
    }
    total
}

/// Same sum as [`sum_column_products`] for families with at most `row`
/// members. Row `u` of the transform (the high frequency bits fixed to `u`)
/// is `H_row` applied to `x_lo -> sum over members (x_hi, x_lo) of
/// (-1)^(u . x_hi)`, which is scattered from the member list and
/// transformed in cache, one row at a time.
fn sum_row_products(
    inst: &TripartitionInstance,
    rows_buf: &mut [i32],
    size: usize,
    row: usize,
) -> WideInt {
    const SIGNS: [i64; 16] = [1, -1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1, -1, 1];
    let shift = row.trailing_zeros();
    let split: Vec<Vec<(u64, usize)>> = inst
        .families
        .iter()
        .map(|f| {
            f.iter()
                .map(|s| (s.bits() >> shift, s.bits() as usize & (row - 1)))
                .collect()
        })
        .collect();
    let mut total: WideInt = 0;
    for u in 0..(size / row) as u64 {
        for (buf, members) in rows_buf.chunks_mut(row).zip(&split) {
            buf.fill(0);
            for &(hi, lo) in members {
                buf[lo] += if (u & hi).count_ones() % 2 == 1 {
                    -1
                } else {
                    1
                };
            }
            butterfly_levels(buf, 1, row);
        }
        let (b0, rest) = rows_buf.split_at(row);
        let (b1, b2) = rest.split_at(row);
        let mut row_total: WideInt = 0;
        for (lo, ((c0, c1), c2)) in b0
            .chunks(16)
            .zip(b1.chunks(16))
            .zip(b2.chunks(16))
            .enumerate()
        {
            let mut partial: i64 = 0;
            for (sign, ((&x, &y), &z)) in SIGNS.iter().zip(c0.iter().zip(c1).zip(c2)) {
                partial += sign * (x as i64 * y as i64 * z as i64);
            }
            if (lo as u64).count_ones() % 2 == 1 {
                row_total -= partial as WideInt;
            } else {
                row_total += partial as WideInt;
            }
        }
        if u.count_ones() % 2 == 1 {
            total -= row_total;
        } else {
            total += row_total;
        }
    }
    total
}

/// Counts solutions as `2^(-3n) sum_w f1^(w) f2^(w) f3^(w) (-1)^|w|`.
///
/// Three `n`-subsets whose symmetric difference is `[3n]` cover every
/// element an odd number of times with total weight `3n`, so they partition
/// it; the convolution at the all-ones point is therefore the solution count.
pub fn solve_wht(inst: &TripartitionInstance) -> Result<WhtResult> {
    if inst.n > MAX_WHT_N {
        return Err(Error::Guard(format!(
            "Walsh–Hadamard solver takes n <= {MAX_WHT_N}, got {}",
            inst.n
        )));
    }
    let m = inst.universe();
    let size = 1usize << m;
    // |f^(w)| <= |F| <= C(24, 8) < 2^31 for n <= 8
    let row = size.min(WHT_BLOCK);
    let rows = size / row;
    let group = row.min(16);
    let sparse = inst.families.iter().all(|f| f.len() <= row);
    let total = WHT_SCRATCH.with(|cell| {
        let mut scratch = cell.borrow_mut();
        if sparse {
            scratch.clear();
            scratch.resize(3 * row, 0);
            return sum_row_products(inst, &mut scratch, size, row);
        }
        scratch.clear();
        scratch.resize(3 * size + 3 * rows * group, 0);
        let (tables, bufs) = scratch.split_at_mut(3 * size);
        for (family, table) in inst.families.iter().zip(tables.chunks_mut(size)) {
            for s in family {
                table[s.bits() as usize] = 1;
            }
            for chunk in table.chunks_mut(row) {
                butterfly_levels(chunk, 1, row);
            }
        }
        sum_column_products(tables, bufs, size, row, group)
    });
    debug_assert_eq!(total % size as WideInt, 0);
    let count = total / size as WideInt;
    Ok(WhtResult {
        answer: count > 0,
        count,
    })
}

/// Extends the universe so that `k` divides the block size: the new
/// elements are split into three runs of equal length appended to every
/// member of family 1, 2 and 3 respectively.
pub fn pad_instance(inst: &TripartitionInstance, k: usize) -> Result<TripartitionInstance> {
    if k == 0 {
        return Err(Error::Parameter(
            "block parameter k must be positive".into(),
        ));
    }
    let n0 = inst.n;
    let n = n0.div_ceil(k) * k;
    if n == n0 {
        return Ok(inst.clone());
    }
    let extra = n - n0;
    let base = 3 * n0;
    let run = |i: usize| low_bits(extra) << (base + i * extra);
    let mut families: [Vec<SubsetMask>; 3] = Default::default();
    for (i, family) in inst.families.iter().enumerate() {
        families[i] = family
            .iter()
            .map(|s| SubsetMask::from_bits(s.bits() | run(i), 3 * n))
            .collect::<Result<_>>()?;
    }
    TripartitionInstance::new(n, families)
}

/// `(C(3k,k) C(2k,k))^r / (C(3n,n) C(2n,n))` with `r = n / k`: the chance
/// that a fixed solution survives a uniformly random relabelling into the
/// balanced code.
pub fn success_probability(n: usize, k: usize) -> Result<BigRational> {
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::Parameter(format!("k = {k} does not divide n = {n}")));
    }
    let (n, k) = (n as u64, k as u64);
    let r = n / k;
    let block = BigInt::from(binomial(3 * k, k) * binomial(2 * k, k));
    let numer = num_traits::pow(block, r as usize);
    let denom = BigInt::from(binomial(3 * n, n) * binomial(2 * n, n));
    Ok(BigRational::new(numer, denom))
}

/// Whether all three members of `triple` land in the balanced code after `sigma`.
pub fn survives_filter(triple: &[SubsetMask; 3], sigma: &Permutation, k: usize) -> bool {
    let r = triple[0].ground() / (3 * k);
    triple
        .iter()
        .all(|&s| balanced_encode(sigma.apply(s), k, r).is_ok())
}

/// Trial schedule of the randomized decider.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialPlan {
    pub k: usize,
    pub r: usize,
    pub p: BigRational,
    pub trials: u64,
    pub lambda: f64,
}

impl TrialPlan {
    /// `trials = ceil(lambda / p)`.
    pub fn new(n: usize, k: usize, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Parameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        let p = success_probability(n, k)?;
        let lambda_q = BigRational::from_float(lambda).expect("finite");
        let ratio = lambda_q / &p;
        let trials = ratio.ceil().to_integer().to_u64().ok_or_else(|| {
            Error::Guard(format!(
                "trial count for n = {n}, k = {k} does not fit in u64"
            ))
        })?;
        Ok(TrialPlan {
            k,
            r: n / k,
            p,
            trials: trials.max(1),
            lambda,
        })
    }

    pub fn p_string(&self) -> String {
        format!("{}/{}", self.p.numer(), self.p.denom())
    }
}

/// Where the random evaluation values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SampleSet {
    /// Uniform over all of `Z_p`.
    #[default]
    FullField,
    /// Uniform over `{1, 2, 3, 4}`.
    Four,
}

#[derive(Debug, Clone)]
pub struct TensorSolverConfig {
    pub k: usize,
    pub lambda: f64,
    pub seed: u64,
    pub threads: usize,
    pub sample_set: SampleSet,
}

impl TensorSolverConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        TensorSolverConfig {
            k,
            lambda: 5.0,
            seed,
            threads: 1,
            sample_set: SampleSet::FullField,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorResult {
    pub answer: bool,
    /// Index of the first successful trial plus one, or the full count.
    pub trials_used: u64,
    pub plan: TrialPlan,
}

/// Randomized decider built on evaluating `T_k^{⊗r}` through `decomposition`.
///
/// Trial `i` draws from its own ChaCha stream `i` under `config.seed`, so
/// the answer and `trials_used` do not depend on `config.threads`.
pub fn solve_tensor(
    inst: &TripartitionInstance,
    decomposition: &Decomposition,
    config: &TensorSolverConfig,
) -> Result<TensorResult> {
    let k = config.k;
    let dim = choose(3 * k, k);
    if decomposition.dims() != [dim; 3] {
        return Err(Error::Dimension(format!(
            "decomposition dims {:?} do not match T_{k} ({dim})",
            decomposition.dims()
        )));
    }
    let padded = pad_instance(inst, k)?;
    let plan = TrialPlan::new(padded.n, k, config.lambda)?;
    if padded.families.iter().any(Vec::is_empty) {
        return Ok(TensorResult {
            answer: false,
            trials_used: plan.trials,
            plan,
        });
    }

    let first_success = AtomicU64::new(u64::MAX);
    let next = AtomicU64::new(0);
    let error = std::sync::Mutex::new(None);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= plan.trials || i >= first_success.load(Ordering::Relaxed) {
            break;
        }
        match run_trial(&padded, decomposition, &plan, config, i) {
            Ok(true) => {
                first_success.fetch_min(i, Ordering::Relaxed);
            }
            Ok(false) => {}
            Err(e) => {
                *error.lock().expect("poisoned") = Some(e);
                break;
            }
        }
    };
    let threads = config.threads.max(1);
    if threads == 1 {
        worker();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(worker);
            }
        });
    }
    if let Some(e) = error.into_inner().expect("poisoned") {
        return Err(e);
    }
    let hit = first_success.into_inner();
    Ok(TensorResult {
        answer: hit != u64::MAX,
        trials_used: if hit == u64::MAX {
            plan.trials
        } else {
            hit + 1
        },
        plan,
    })
}

fn run_trial(
    inst: &TripartitionInstance,
    decomposition: &Decomposition,
    plan: &TrialPlan,
    config: &TensorSolverConfig,
    index: u64,
) -> Result<bool> {
    let field = decomposition.field();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);
    let sigma = Permutation::random(inst.universe(), &mut rng);
    let sample = |rng: &mut ChaCha8Rng| match config.sample_set {
        SampleSet::FullField => field.sample_uniform(rng),
        SampleSet::Four => field.elem(rng.gen_range(1..=4)),
    };
    let mut vectors: [Vec<(usize, FieldElement)>; 3] = Default::default();
    for (family, vector) in inst.families.iter().zip(vectors.iter_mut()) {
        for &s in family {
            if let Ok(idx) = balanced_encode(sigma.apply(s), plan.k, plan.r) {
                vector.push((idx.flat(), sample(&mut rng)));
            }
        }
        if vector.is_empty() {
            return Ok(false);
        }
    }
    let value = decomposition.eval_kron_sparse(plan.r, &vectors[0], &vectors[1], &vectors[2])?;
    Ok(!value.is_zero())
}

/// `1 - e^(-lambda (1 - 3/q))`: lower bound on the detection probability of
/// [`solve_tensor`] on a yes-instance when values are drawn from `q` elements.
pub fn detection_lower_bound(lambda: f64, sample_space: f64) -> f64 {
    1.0 - (-lambda * (1.0 - 3.0 / sample_space)).exp()
}
