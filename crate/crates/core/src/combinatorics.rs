//! Subsets of small ground sets, binomials, colex ranking and the balanced
//! block code that indexes the axes of Kronecker powers of `T_k`.
//!
//! Ground sets are 1-indexed: element `i` of `[m]` lives in bit `i - 1`.

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_GROUND: usize = 63;

/// A subset of `[m]`, `m <= 63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    bits: u64,
    ground: u8,
}

impl SubsetMask {
    pub fn empty(ground: usize) -> Self {
        assert!(ground <= MAX_GROUND, "ground set too large: {ground}");
        SubsetMask {
            bits: 0,
            ground: ground as u8,
        }
    }

    pub fn full(ground: usize) -> Self {
        assert!(ground <= MAX_GROUND, "ground set too large: {ground}");
        SubsetMask {
            bits: low_bits(ground),
            ground: ground as u8,
        }
    }

    pub fn from_bits(bits: u64, ground: usize) -> Result<Self> {
        if ground > MAX_GROUND {
            return Err(Error::Parameter(format!("ground set of size {ground}")));
        }
        if bits & !low_bits(ground) != 0 {
            return Err(Error::Parameter(format!(
                "bits {bits:#x} outside ground set [{ground}]"
            )));
        }
        Ok(SubsetMask {
            bits,
            ground: ground as u8,
        })
    }

    /// Builds a subset from 1-indexed elements; duplicates are rejected.
    pub fn from_elements(elements: &[usize], ground: usize) -> Result<Self> {
        let mut s = SubsetMask::empty(ground.min(MAX_GROUND));
        if ground > MAX_GROUND {
            return Err(Error::Parameter(format!("ground set of size {ground}")));
        }
        for &e in elements {
            if e == 0 || e > ground {
                return Err(Error::Parameter(format!(
                    "element {e} outside ground set [{ground}]"
                )));
            }
            if s.contains(e) {
                return Err(Error::Parameter(format!("duplicate element {e}")));
            }
            s.bits |= 1 << (e - 1);
        }
        Ok(s)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn ground(self) -> usize {
        self.ground as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(self, element: usize) -> bool {
        element >= 1 && element <= self.ground() && self.bits >> (element - 1) & 1 == 1
    }

    /// Sorted 1-indexed elements.
    pub fn elements(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i + 1)
            }
        })
    }

    #[inline]
    pub fn is_disjoint(self, other: SubsetMask) -> bool {
        self.bits & other.bits == 0
    }

    #[inline]
    pub fn is_subset(self, other: SubsetMask) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn union(self, other: SubsetMask) -> SubsetMask {
        SubsetMask {
            bits: self.bits | other.bits,
            ground: self.ground.max(other.ground),
        }
    }

    #[inline]
    pub fn intersection(self, other: SubsetMask) -> SubsetMask {
        SubsetMask {
            bits: self.bits & other.bits,
            ground: self.ground,
        }
    }

    #[inline]
    pub fn difference(self, other: SubsetMask) -> SubsetMask {
        SubsetMask {
            bits: self.bits & !other.bits,
            ground: self.ground,
        }
    }

    pub fn complement(self) -> SubsetMask {
        SubsetMask {
            bits: !self.bits & low_bits(self.ground()),
            ground: self.ground,
        }
    }

    /// Same elements viewed inside a larger ground set.
    pub fn widen(self, ground: usize) -> SubsetMask {
        assert!(ground >= self.ground() && ground <= MAX_GROUND);
        SubsetMask {
            bits: self.bits,
            ground: ground as u8,
        }
    }
}

impl std::fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[inline]
pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Exact `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// `C(n, k)` for the small arguments used in indexing. Panics on overflow.
pub fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 - k as u128 + i) / i;
    }
    usize::try_from(acc).expect("binomial overflows usize")
}

/// Colexicographic rank of a `k`-subset: `sum_i C(s_i - 1, i)` over the
/// sorted elements `s_1 < ... < s_k`.
pub fn rank_ksubset(s: SubsetMask, k: usize) -> Result<usize> {
    if s.len() != k {
        return Err(Error::Cardinality {
            expected: k,
            actual: s.len(),
        });
    }
    Ok(rank_bits(s.bits))
}

#[inline]
pub(crate) fn rank_bits(mut bits: u64) -> usize {
    let mut rank = 0;
    let mut i = 1;
    while bits != 0 {
        let pos = bits.trailing_zeros() as usize;
        rank += choose(pos, i);
        bits &= bits - 1;
        i += 1;
    }
    rank
}

pub fn unrank_ksubset(index: usize, m: usize, k: usize) -> Result<SubsetMask> {
    let total = choose(m, k);
    if index >= total {
        return Err(Error::Parameter(format!(
            "rank {index} out of range for C({m},{k}) = {total}"
        )));
    }
    let mut rest = index;
    let mut bits = 0u64;
    let mut top = m;
    for i in (1..=k).rev() {
        // largest position c < top with C(c, i) <= rest
        let mut c = i - 1;
        while c + 1 < top && choose(c + 1, i) <= rest {
            c += 1;
        }
        rest -= choose(c, i);
        bits |= 1 << c;
        top = c;
    }
    SubsetMask::from_bits(bits, m)
}

/// All `k`-subsets of `[m]` in colex order (Gosper's hack).
pub fn enumerate_ksubsets(m: usize, k: usize) -> Vec<SubsetMask> {
    assert!(m <= MAX_GROUND);
    if k > m {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(choose(m, k));
    if k == 0 {
        out.push(SubsetMask::empty(m));
        return out;
    }
    let limit = 1u64 << m;
    let mut x = low_bits(k);
    while x < limit {
        out.push(SubsetMask {
            bits: x,
            ground: m as u8,
        });
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

/// A permutation of `[m]`; `image[i]` is the 0-based image of bit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u8>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            image: (0..m as u8).collect(),
        }
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut p = Permutation::identity(m);
        p.image.shuffle(rng);
        p
    }

    /// From 1-indexed images of `1..=m`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &e in images {
            if e == 0 || e > m || std::mem::replace(&mut seen[e - 1], true) {
                return Err(Error::Parameter(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation {
            image: images.iter().map(|&e| (e - 1) as u8).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// 1-indexed image of a 1-indexed element.
    pub fn map(&self, element: usize) -> usize {
        self.image[element - 1] as usize + 1
    }

    pub fn apply(&self, s: SubsetMask) -> SubsetMask {
        debug_assert_eq!(s.ground(), self.len());
        let mut bits = 0u64;
        let mut rest = s.bits;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            bits |= 1 << self.image[i];
            rest &= rest - 1;
        }
        SubsetMask {
            bits,
            ground: s.ground,
        }
    }

    pub fn apply_family(&self, family: &[SubsetMask]) -> Vec<SubsetMask> {
        family.iter().map(|&s| self.apply(s)).collect()
    }
}

/// Position of a member of the balanced code: one colex rank per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BalancedIndex {
    pub k: usize,
    pub ranks: Vec<usize>,
}

impl BalancedIndex {
    pub fn r(&self) -> usize {
        self.ranks.len()
    }

    /// Outer-major mixed-radix flattening, block 1 most significant.
    pub fn flat(&self) -> usize {
        let radix = choose(3 * self.k, self.k);
        self.ranks.iter().fold(0, |acc, &x| acc * radix + x)
    }

    pub fn from_flat(mut flat: usize, k: usize, r: usize) -> Self {
        let radix = choose(3 * k, k);
        let mut ranks = vec![0; r];
        for slot in ranks.iter_mut().rev() {
            *slot = flat % radix;
            flat /= radix;
        }
        BalancedIndex { k, ranks }
    }
}

/// Outcome of [`balanced_encode`] on a string outside the code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotBalanced {
    pub block: usize,
    pub weight: usize,
}

/// Encodes `x` over `[3rk]` if each of its `r` consecutive blocks of length
/// `3k` has exactly `k` elements.
pub fn balanced_encode(
    x: SubsetMask,
    k: usize,
    r: usize,
) -> std::result::Result<BalancedIndex, NotBalanced> {
    assert!(
        k >= 1 && x.ground() == 3 * r * k,
        "ground set must be [3rk]"
    );
    let width = 3 * k;
    let mask = low_bits(width);
    let mut ranks = Vec::with_capacity(r);
    for block in 0..r {
        let chunk = (x.bits >> (block * width)) & mask;
        let weight = chunk.count_ones() as usize;
        if weight != k {
            return Err(NotBalanced { block, weight });
        }
        ranks.push(rank_bits(chunk));
    }
    Ok(BalancedIndex { k, ranks })
}

pub fn balanced_decode(b: &BalancedIndex) -> SubsetMask {
    let width = 3 * b.k;
    let mut bits = 0u64;
    for (block, &rank) in b.ranks.iter().enumerate() {
        let chunk = unrank_ksubset(rank, width, b.k).expect("rank in range");
        bits |= chunk.bits << (block * width);
    }
    SubsetMask {
        bits,
        ground: (width * b.r()) as u8,
    }
}
