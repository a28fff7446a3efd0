//! Seeded random instances, optionally with a planted solution.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::combinatorics::{choose, unrank_ksubset, SubsetMask};
use crate::error::{Error, Result};
use crate::setcover::SetCoverInstance;
use crate::tripartition::TripartitionInstance;

/// Three families of `family_size` uniform `n`-subsets of `[3n]` each
/// (before deduplication). With `plant`, a random ordered partition of
/// `[3n]` is added, one part per family.
pub fn random_tripartition<R: Rng + ?Sized>(
    n: usize,
    family_size: usize,
    plant: bool,
    rng: &mut R,
) -> Result<TripartitionInstance> {
    if n == 0 || 3 * n > 63 {
        return Err(Error::Parameter(format!("block size n = {n} out of range")));
    }
    let m = 3 * n;
    let total = choose(m, n);
    let mut families: [Vec<SubsetMask>; 3] = Default::default();
    for family in families.iter_mut() {
        for _ in 0..family_size {
            family.push(unrank_ksubset(rng.gen_range(0..total), m, n)?);
        }
    }
    if plant {
        let mut elements: Vec<usize> = (1..=m).collect();
        elements.shuffle(rng);
        for (family, part) in families.iter_mut().zip(elements.chunks(n)) {
            family.push(SubsetMask::from_elements(part, m)?);
        }
    }
    TripartitionInstance::new(n, families)
}

/// `num_sets` random sets with sizes uniform in `1..=s` over `[n]`. With
/// `plant`, a random partition of `[n]` into at most `t` blocks of size at
/// most `s` is added, which requires `ceil(n / s) <= t`.
pub fn random_setcover<R: Rng + ?Sized>(
    n: usize,
    s: usize,
    t: usize,
    num_sets: usize,
    plant: bool,
    rng: &mut R,
) -> Result<SetCoverInstance> {
    if n > 63 || s == 0 {
        return Err(Error::Parameter(format!(
            "need n <= 63 and s >= 1, got n = {n}, s = {s}"
        )));
    }
    let mut sets = Vec::with_capacity(num_sets + t);
    let mut elements: Vec<usize> = (1..=n).collect();
    for _ in 0..num_sets {
        let size = rng.gen_range(1..=s.min(n.max(1)));
        elements.shuffle(rng);
        sets.push(SubsetMask::from_elements(&elements[..size.min(n)], n)?);
    }
    if plant && n > 0 {
        let min_blocks = n.div_ceil(s);
        if min_blocks > t {
            return Err(Error::Parameter(format!(
                "cannot plant a cover of [{n}] with at most {t} sets of size <= {s}"
            )));
        }
        let blocks = rng.gen_range(min_blocks..=t.min(n));
        let mut sizes = vec![1usize; blocks];
        for _ in blocks..n {
            let open: Vec<usize> = (0..blocks).filter(|&b| sizes[b] < s).collect();
            sizes[*open.choose(rng).expect("capacity remains")] += 1;
        }
        elements.shuffle(rng);
        let mut start = 0;
        for size in sizes {
            sets.push(SubsetMask::from_elements(
                &elements[start..start + size],
                n,
            )?);
            start += size;
        }
    }
    SetCoverInstance::new(n, t, s, sets)
}
