//! Set cover with sets of bounded size, decided exactly or by reduction to
//! balanced tripartitioning.
//!
//! The reduction: a family covers `[n]` with at most `t` sets iff its
//! downward closure partitions `[n]` with at most `t` sets. Any such
//! partition into blocks of size at most `s` can be grouped into three parts
//! whose unions have sizes in `[n/3 - s, n/3 + s]`. Unions of disjoint
//! members are tabulated per member count, and for every `3s`-subset `S`
//! split as `S1 ⊔ S2 ⊔ S3` the three parts are trimmed to exactly
//! `n/3 - s` elements outside `S`, leaving a balanced tripartition problem
//! on `[n] \ S`.

use std::collections::{BTreeMap, HashSet};

use crate::combinatorics::{enumerate_ksubsets, low_bits, SubsetMask};
use crate::error::{Error, Result};
use crate::tripartition::TripartitionInstance;

/// Largest universe for the exact dynamic program.
pub const MAX_BRUTE_N: usize = 15;
/// Largest set size for the downward closure (`2^s` subsets per member).
pub const MAX_CLOSURE_S: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    n: usize,
    t: usize,
    s: usize,
    sets: Vec<SubsetMask>,
}

impl SetCoverInstance {
    pub fn new(n: usize, t: usize, s: usize, sets: Vec<SubsetMask>) -> Result<Self> {
        if n > crate::combinatorics::MAX_GROUND {
            return Err(Error::Guard(format!("universe [{n}] exceeds 63 elements")));
        }
        let mut sets = sets;
        for x in sets.iter_mut() {
            if x.bits() & !low_bits(n) != 0 {
                return Err(Error::Parameter(format!("set {x} is not inside [{n}]")));
            }
            if x.len() > s {
                return Err(Error::Parameter(format!("set {x} is larger than s = {s}")));
            }
            *x = SubsetMask::from_bits(x.bits(), n)?;
        }
        sets.sort_unstable();
        sets.dedup();
        Ok(SetCoverInstance { n, t, s, sets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn sets(&self) -> &[SubsetMask] {
        &self.sets
    }

    /// Makes `3 | n` by adding fresh elements as singleton sets and raising
    /// `t` by the same amount; any cover must spend one set per fresh element.
    pub fn pad_to_multiple_of_three(&self) -> Result<SetCoverInstance> {
        let d = (3 - self.n % 3) % 3;
        if d == 0 {
            return Ok(self.clone());
        }
        let n = self.n + d;
        let mut sets: Vec<SubsetMask> = self.sets.iter().map(|x| x.widen(n)).collect();
        for e in self.n + 1..=n {
            sets.push(SubsetMask::from_elements(&[e], n)?);
        }
        SetCoverInstance::new(n, self.t + d, self.s.max(1), sets)
    }
}

/// Exact answer from the minimum number of sets needed for every subset of `[n]`.
pub fn solve_brute_setcover(inst: &SetCoverInstance) -> Result<bool> {
    Ok(min_cover_size(inst)?.is_some_and(|m| m <= inst.t))
}

/// Fewest sets whose union is `[n]`, or `None` if the family does not cover it.
pub fn min_cover_size(inst: &SetCoverInstance) -> Result<Option<usize>> {
    if inst.n > MAX_BRUTE_N {
        return Err(Error::Guard(format!(
            "exact set cover takes n <= {MAX_BRUTE_N}, got {}",
            inst.n
        )));
    }
    let size = 1usize << inst.n;
    let mut best = vec![usize::MAX; size];
    best[0] = 0;
    // OR only adds bits, so processing masks in increasing order is a valid topological order
    for mask in 0..size {
        let here = best[mask];
        if here == usize::MAX {
            continue;
        }
        for x in &inst.sets {
            let next = mask | x.bits() as usize;
            if best[next] > here + 1 {
                best[next] = here + 1;
            }
        }
    }
    let full = best[size - 1];
    Ok((full != usize::MAX).then_some(full))
}

/// All subsets of all members, sorted and deduplicated.
pub fn downward_closure(family: &[SubsetMask]) -> Result<Vec<SubsetMask>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &x in family {
        if x.len() > MAX_CLOSURE_S {
            return Err(Error::Guard(format!(
                "downward closure of a set of size {} (limit {MAX_CLOSURE_S})",
                x.len()
            )));
        }
        let top = x.bits();
        let mut sub = top;
        loop {
            if seen.insert(sub) {
                out.push(SubsetMask::from_bits(sub, x.ground())?);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & top;
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Levels `U_1..U_t` of unions of pairwise disjoint members of `closure`.
///
/// `U_1` holds the members of size at most `cap`, and `U_m` the unions `A ∪ B`
/// with `A ∈ U_(m-1)`, `B ∈ closure`, `A ∩ B = ∅` and `|A ∪ B| <= cap`. After
/// all levels are built each is filtered to sizes at least `min_size`.
pub fn disjoint_union_dp(
    closure: &[SubsetMask],
    t: usize,
    cap: usize,
    min_size: usize,
) -> Vec<Vec<SubsetMask>> {
    union_levels(closure, t, cap)
        .into_iter()
        .map(|level| filter_level(&level, min_size))
        .collect()
}

fn union_levels(closure: &[SubsetMask], t: usize, cap: usize) -> Vec<HashSet<SubsetMask>> {
    let mut levels: Vec<HashSet<SubsetMask>> = Vec::with_capacity(t);
    if t == 0 {
        return levels;
    }
    levels.push(closure.iter().copied().filter(|x| x.len() <= cap).collect());
    for m in 1..t {
        let mut next = HashSet::new();
        for &a in &levels[m - 1] {
            for &b in closure {
                if a.is_disjoint(b) && a.len() + b.len() <= cap {
                    next.insert(a.union(b));
                }
            }
        }
        levels.push(next);
    }
    levels
}

fn filter_level(level: &HashSet<SubsetMask>, min_size: usize) -> Vec<SubsetMask> {
    let mut v: Vec<_> = level
        .iter()
        .copied()
        .filter(|x| x.len() >= min_size)
        .collect();
    v.sort_unstable();
    v
}

/// Bookkeeping from one run of [`reduce_and_solve`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub answer: bool,
    /// Number of tripartition instances handed to the solver.
    pub calls: usize,
    /// The split was vacuous (`3s > n`) and the exact solver answered instead.
    pub fell_back: bool,
    /// Largest level of the union table, as a size indicator.
    pub max_level_size: usize,
}

/// Keeps the bits of `bits` at the positions set in `keep`, packed downwards
/// in order.
fn compress(bits: u64, keep: u64) -> u64 {
    let mut out = 0;
    let mut rest = keep;
    let mut j = 0;
    while rest != 0 {
        let pos = rest.trailing_zeros();
        out |= ((bits >> pos) & 1) << j;
        j += 1;
        rest &= rest - 1;
    }
    out
}

/// Decides `inst` by reduction to balanced tripartitioning, calling
/// `solver` on each generated instance until one answers yes.
///
/// Level `0` is `{∅}`. The closure contains `∅` whenever the family is
/// nonempty, so levels only grow with `m`; it is enough to try budget
/// triples summing to exactly `t`, with levels past the point where the
/// table stops growing identified. Splits `(S1, S2, S3)` for which some
/// trimmed family would be empty are skipped, since they cannot succeed.
pub fn reduce_and_solve<F>(inst: &SetCoverInstance, mut solver: F) -> Result<ReductionOutcome>
where
    F: FnMut(&TripartitionInstance) -> Result<bool>,
{
    let padded = inst.pad_to_multiple_of_three()?;
    let (n, t, s) = (padded.n, padded.t, padded.s);
    if n == 0 {
        return Ok(ReductionOutcome {
            answer: true,
            ..Default::default()
        });
    }
    if padded.sets.is_empty() {
        return Ok(ReductionOutcome::default());
    }
    if 3 * s > n {
        return Ok(ReductionOutcome {
            answer: solve_brute_setcover(&padded)?,
            fell_back: true,
            ..Default::default()
        });
    }
    let third = n / 3;
    let block = third - s;
    let cap = third + s;

    let closure = downward_closure(&padded.sets)?;
    let mut raw = vec![HashSet::from([SubsetMask::empty(n)])];
    raw.extend(union_levels(&closure, t, cap));
    // raw levels only grow; once one repeats, all later ones do too
    let stable = (1..raw.len())
        .find(|&m| raw[m] == raw[m - 1])
        .map_or(raw.len() - 1, |m| m - 1);
    let levels: Vec<Vec<SubsetMask>> = raw[..=stable]
        .iter()
        .map(|level| filter_level(level, block))
        .collect();
    let max_level_size = raw.iter().map(HashSet::len).max().unwrap_or(0);

    let mut budgets = Vec::new();
    for t1 in 0..=t {
        for t2 in 0..=t - t1 {
            let key = [t1.min(stable), t2.min(stable), (t - t1 - t2).min(stable)];
            if !budgets.contains(&key) {
                budgets.push(key);
            }
        }
    }

    let mut calls = 0;
    let splits = enumerate_ksubsets(n, 3 * s);
    for budget in budgets {
        let families = budget.map(|m| &levels[m]);
        if families.iter().any(|f| f.is_empty()) {
            continue;
        }
        for &split in &splits {
            let keep = low_bits(n) & !split.bits();
            // trimmed members grouped by their intersection with the split
            let trimmed: Vec<BTreeMap<u64, Vec<SubsetMask>>> = families
                .iter()
                .map(|family| {
                    let mut by_part: BTreeMap<u64, Vec<SubsetMask>> = BTreeMap::new();
                    for &x in family.iter() {
                        let part = x.bits() & split.bits();
                        if x.len() == block + part.count_ones() as usize {
                            let rest = compress(x.bits() & keep, keep);
                            let member = SubsetMask::from_bits(rest, 3 * block)
                                .expect("packed into [n - 3s]");
                            assert_eq!(member.len(), block);
                            by_part.entry(part).or_default().push(member);
                        }
                    }
                    by_part
                })
                .collect();
            for (&p1, f1) in &trimmed[0] {
                for (&p2, f2) in &trimmed[1] {
                    if p1 & p2 != 0 {
                        continue;
                    }
                    let p3 = split.bits() & !(p1 | p2);
                    let Some(f3) = trimmed[2].get(&p3) else {
                        continue;
                    };
                    let sub =
                        TripartitionInstance::new(block, [f1.clone(), f2.clone(), f3.clone()])?;
                    calls += 1;
                    if solver(&sub)? {
                        return Ok(ReductionOutcome {
                            answer: true,
                            calls,
                            fell_back: false,
                            max_level_size,
                        });
                    }
                }
            }
        }
    }
    Ok(ReductionOutcome {
        answer: false,
        calls,
        fell_back: false,
        max_level_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldContext;
    use crate::generate::random_setcover;
    use crate::tk::group_decomposition;
    use crate::tripartition::{solve_brute, solve_tensor, solve_wht, TensorSolverConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(elements: &[usize], n: usize) -> SubsetMask {
        SubsetMask::from_elements(elements, n).unwrap()
    }

    fn instance(n: usize, t: usize, s: usize, sets: &[&[usize]]) -> SetCoverInstance {
        SetCoverInstance::new(n, t, s, sets.iter().map(|e| set(e, n)).collect()).unwrap()
    }

    /// Cover by trying every subfamily of at most `t` sets.
    fn cover_by_subfamilies(inst: &SetCoverInstance) -> bool {
        let sets = inst.sets();
        let full = low_bits(inst.n());
        (0u64..1 << sets.len()).any(|choice| {
            choice.count_ones() as usize <= inst.t()
                && sets
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| choice >> i & 1 == 1)
                    .fold(0, |acc, (_, x)| acc | x.bits())
                    == full
        })
    }

    /// Partition by pairwise disjoint members of the closure, at most `t` of them.
    fn partition_by_subfamilies(closure: &[SubsetMask], n: usize, t: usize) -> bool {
        fn go(closure: &[SubsetMask], from: usize, covered: u64, full: u64, left: usize) -> bool {
            if covered == full {
                return true;
            }
            if left == 0 {
                return false;
            }
            (from..closure.len()).any(|i| {
                let x = closure[i].bits();
                x != 0 && x & covered == 0 && go(closure, i + 1, covered | x, full, left - 1)
            })
        }
        go(closure, 0, 0, low_bits(n), t)
    }

    fn wht(inst: &TripartitionInstance) -> Result<bool> {
        Ok(solve_wht(inst)?.answer)
    }

    #[test]
    fn brute_examples() {
        assert!(solve_brute_setcover(&instance(3, 3, 1, &[&[1], &[2], &[3]])).unwrap());
        assert!(!solve_brute_setcover(&instance(3, 2, 1, &[&[1], &[2], &[3]])).unwrap());
        assert!(solve_brute_setcover(&instance(4, 2, 2, &[&[1, 2], &[3, 4], &[1, 3]])).unwrap());
        assert!(solve_brute_setcover(&instance(0, 0, 1, &[])).unwrap());
        assert!(SetCoverInstance::new(3, 1, 1, vec![set(&[1, 2], 3)]).is_err());
        let big = SetCoverInstance::new(16, 1, 1, vec![]).unwrap();
        assert!(matches!(solve_brute_setcover(&big), Err(Error::Guard(_))));
    }

    #[test]
    fn brute_matches_subfamily_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let s = rng.gen_range(1..=3);
            let t = rng.gen_range(1..=4);
            let inst = random_setcover(n, s, t, rng.gen_range(0..=8), false, &mut rng).unwrap();
            assert_eq!(
                solve_brute_setcover(&inst).unwrap(),
                cover_by_subfamilies(&inst)
            );
        }
    }

    #[test]
    fn closure_examples() {
        let closure = downward_closure(&[set(&[1, 2], 2)]).unwrap();
        assert_eq!(
            closure,
            vec![
                SubsetMask::empty(2),
                set(&[1], 2),
                set(&[2], 2),
                set(&[1, 2], 2)
            ]
        );
        assert_eq!(downward_closure(&closure).unwrap(), closure);
        assert!(downward_closure(&[]).unwrap().is_empty());
    }

    #[test]
    fn cover_iff_closure_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = rng.gen_range(1..=8);
            let s = rng.gen_range(1..=3);
            let t = rng.gen_range(1..=4);
            let inst = random_setcover(n, s, t, rng.gen_range(0..=7), false, &mut rng).unwrap();
            let closure = downward_closure(inst.sets()).unwrap();
            assert_eq!(
                cover_by_subfamilies(&inst),
                partition_by_subfamilies(&closure, n, t)
            );
        }
    }

    #[test]
    fn union_levels_small() {
        let closure = vec![set(&[1], 2), set(&[2], 2)];
        let levels = disjoint_union_dp(&closure, 2, 2, 0);
        assert_eq!(levels.len(), 2);
        assert!(levels[1].contains(&set(&[1, 2], 2)));
        let with_empty = vec![SubsetMask::empty(2), set(&[1], 2), set(&[2], 2)];
        let levels = disjoint_union_dp(&with_empty, 3, 2, 0);
        assert!(levels[0].contains(&SubsetMask::empty(2)));
        assert_eq!(levels[1], levels[2]);
        assert!(disjoint_union_dp(&closure, 0, 2, 0).is_empty());
    }

    #[test]
    fn union_levels_match_tuple_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..30 {
            let n = rng.gen_range(3..=7);
            let inst = random_setcover(n, 2, 3, rng.gen_range(1..=4), false, &mut rng).unwrap();
            let closure = downward_closure(inst.sets()).unwrap();
            let (t, cap, min) = (3, rng.gen_range(1..=n), rng.gen_range(0..=2));
            let levels = disjoint_union_dp(&closure, t, cap, min);
            // unions of ordered m-tuples of pairwise disjoint closure members
            let mut expected: Vec<HashSet<u64>> = vec![HashSet::new(); t];
            let c = closure.len();
            for a in 0..c {
                let x = closure[a].bits();
                expected[0].insert(x);
                for b in 0..c {
                    let y = closure[b].bits();
                    if x & y != 0 {
                        continue;
                    }
                    expected[1].insert(x | y);
                    for z in closure.iter().map(|z| z.bits()) {
                        if (x | y) & z == 0 {
                            expected[2].insert(x | y | z);
                        }
                    }
                }
            }
            for m in 0..t {
                let mut want: Vec<u64> = expected[m]
                    .iter()
                    .copied()
                    .filter(|u| (u.count_ones() as usize) <= cap && u.count_ones() as usize >= min)
                    .collect();
                want.sort_unstable();
                let got: Vec<u64> = levels[m].iter().map(|x| x.bits()).collect();
                assert_eq!(got, want, "level {}", m + 1);
            }
        }
    }

    #[test]
    fn compress_packs_in_order() {
        assert_eq!(compress(0b1010_0110, 0b1111_0000), 0b1010);
        assert_eq!(compress(0b101, 0b101), 0b11);
        assert_eq!(compress(0b010, 0b101), 0);
    }

    #[test]
    fn padding_preserves_answers() {
        let inst = instance(4, 2, 2, &[&[1, 2], &[3, 4]]);
        let padded = inst.pad_to_multiple_of_three().unwrap();
        assert_eq!((padded.n(), padded.t()), (6, 4));
        assert!(solve_brute_setcover(&padded).unwrap());
        let no = instance(4, 1, 2, &[&[1, 2], &[3, 4]]);
        assert!(!solve_brute_setcover(&no.pad_to_multiple_of_three().unwrap()).unwrap());
    }

    #[test]
    fn reduction_examples() {
        let a = instance(3, 3, 1, &[&[1], &[2], &[3]]);
        assert!(reduce_and_solve(&a, wht).unwrap().answer);
        let b = instance(6, 3, 2, &[&[1, 2], &[3, 4], &[5, 6], &[1, 3]]);
        assert!(solve_brute_setcover(&b).unwrap());
        let out = reduce_and_solve(&b, wht).unwrap();
        assert!(out.answer && !out.fell_back);
        let c = instance(6, 2, 2, &[&[1, 2], &[3, 4], &[5, 6], &[1, 3]]);
        assert!(!reduce_and_solve(&c, wht).unwrap().answer);
        let vacuous = instance(4, 2, 3, &[&[1, 2, 3], &[4]]);
        let out = reduce_and_solve(&vacuous, wht).unwrap();
        assert!(out.answer && out.fell_back);
        assert!(
            !reduce_and_solve(&instance(3, 3, 1, &[]), wht)
                .unwrap()
                .answer
        );
    }

    #[test]
    fn reduction_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for i in 0..120 {
            let n: usize = rng.gen_range(1..=9);
            let s = rng.gen_range(1..=3);
            let t = rng.gen_range(1..=5);
            let plant = n.div_ceil(s) <= t && rng.gen_bool(0.5);
            let inst = random_setcover(n, s, t, rng.gen_range(0..=6), plant, &mut rng).unwrap();
            let expected = solve_brute_setcover(&inst).unwrap();
            let via_wht = reduce_and_solve(&inst, wht).unwrap().answer;
            let via_brute = reduce_and_solve(&inst, |x| Ok(solve_brute(x).answer))
                .unwrap()
                .answer;
            assert_eq!(via_wht, expected, "instance {i}: {inst:?}");
            assert_eq!(via_brute, expected, "instance {i}");
        }
    }

    #[test]
    fn reduction_with_tensor_solver_is_one_sided() {
        let field = FieldContext::mersenne31();
        let d1 = group_decomposition(1, field).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..30 {
            let n = rng.gen_range(3..=6);
            let inst = random_setcover(n, 2, 3, rng.gen_range(1..=5), false, &mut rng).unwrap();
            let expected = solve_brute_setcover(&inst).unwrap();
            let seed: u64 = rng.gen();
            let out = reduce_and_solve(&inst, |x| {
                Ok(solve_tensor(x, &d1, &TensorSolverConfig::new(1, seed))?.answer)
            })
            .unwrap();
            if !expected {
                assert!(!out.answer);
            }
        }
    }

    #[test]
    fn adding_sets_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        for _ in 0..50 {
            let n = rng.gen_range(3..=9);
            let inst = random_setcover(n, 3, 4, rng.gen_range(1..=6), false, &mut rng).unwrap();
            let extra = random_setcover(n, 3, 4, 1, false, &mut rng).unwrap();
            let mut sets = inst.sets().to_vec();
            sets.extend_from_slice(extra.sets());
            let bigger = SetCoverInstance::new(n, inst.t(), inst.s(), sets).unwrap();
            if reduce_and_solve(&inst, wht).unwrap().answer {
                assert!(reduce_and_solve(&bigger, wht).unwrap().answer);
            }
        }
    }
}
