//! Sparse trilinear forms over `Z_p`, their Kronecker products, rank-one
//! decompositions and evaluation of Kronecker powers through a decomposition.
//!
//! Paired indices are flattened outer-major: `(i, i')` becomes `i * n' + i'`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::field::{FieldContext, FieldElement};

/// Upper limit on explicitly stored entries (sparse or dense) for any
/// construction that materialises a tensor.
pub const MAX_ENTRIES: usize = 10_000_000;

pub type Index3 = [usize; 3];

/// A trilinear form stored as its support with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTensor {
    field: FieldContext,
    dims: Index3,
    entries: BTreeMap<Index3, FieldElement>,
}

impl SparseTensor {
    pub fn zero(field: FieldContext, dims: Index3) -> Self {
        SparseTensor {
            field,
            dims,
            entries: BTreeMap::new(),
        }
    }

    /// The `1 x 1 x 1` tensor with coefficient one.
    pub fn unit(field: FieldContext) -> Self {
        let mut t = SparseTensor::zero(field, [1, 1, 1]);
        t.entries.insert([0, 0, 0], FieldElement::ONE);
        t
    }

    pub fn from_entries<I>(field: FieldContext, dims: Index3, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Index3, FieldElement)>,
    {
        let mut t = SparseTensor::zero(field, dims);
        for (idx, c) in entries {
            t.add_to(idx, c)?;
        }
        Ok(t)
    }

    /// Adds `c` to the coefficient at `idx`, dropping the entry if it cancels.
    pub fn add_to(&mut self, idx: Index3, c: FieldElement) -> Result<()> {
        if (0..3).any(|a| idx[a] >= self.dims[a]) {
            return Err(Error::Dimension(format!(
                "index {idx:?} outside dims {:?}",
                self.dims
            )));
        }
        let f = self.field;
        let slot = self.entries.entry(idx).or_insert(FieldElement::ZERO);
        *slot = f.add(*slot, c);
        if slot.is_zero() {
            self.entries.remove(&idx);
        }
        Ok(())
    }

    pub fn field(&self) -> FieldContext {
        self.field
    }

    pub fn dims(&self) -> Index3 {
        self.dims
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, idx: Index3) -> FieldElement {
        self.entries.get(&idx).copied().unwrap_or_default()
    }

    pub fn contains(&self, idx: Index3) -> bool {
        self.entries.contains_key(&idx)
    }

    /// Entries in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (Index3, FieldElement)> + '_ {
        self.entries.iter().map(|(&i, &c)| (i, c))
    }

    fn check_vectors(
        &self,
        x: &[FieldElement],
        y: &[FieldElement],
        z: &[FieldElement],
    ) -> Result<()> {
        let lens = [x.len(), y.len(), z.len()];
        if lens != self.dims {
            return Err(Error::Dimension(format!(
                "vector lengths {lens:?} for tensor of dims {:?}",
                self.dims
            )));
        }
        Ok(())
    }

    /// `sum coeff * x_i * y_j * z_k` over the support.
    pub fn eval_naive(
        &self,
        x: &[FieldElement],
        y: &[FieldElement],
        z: &[FieldElement],
    ) -> Result<FieldElement> {
        self.check_vectors(x, y, z)?;
        let f = self.field;
        Ok(self
            .entries
            .iter()
            .fold(FieldElement::ZERO, |acc, (&[i, j, k], &c)| {
                f.add(acc, f.mul(f.mul(c, x[i]), f.mul(y[j], z[k])))
            }))
    }

    pub fn kron_product(&self, other: &SparseTensor) -> Result<SparseTensor> {
        if self.field != other.field {
            return Err(Error::Parameter(
                "Kronecker product of tensors over different fields".into(),
            ));
        }
        let size = self.support_len().saturating_mul(other.support_len());
        if size > MAX_ENTRIES {
            return Err(Error::Guard(format!(
                "Kronecker product would store {size} entries"
            )));
        }
        let f = self.field;
        let [m1, m2, m3] = other.dims;
        let dims = [self.dims[0] * m1, self.dims[1] * m2, self.dims[2] * m3];
        let mut entries = BTreeMap::new();
        for (&[i, j, k], &a) in &self.entries {
            for (&[i2, j2, k2], &b) in &other.entries {
                // coefficients are nonzero and p is prime, so the product is too
                entries.insert([i * m1 + i2, j * m2 + j2, k * m3 + k2], f.mul(a, b));
            }
        }
        Ok(SparseTensor {
            field: f,
            dims,
            entries,
        })
    }

    /// `r`-fold Kronecker power, `r >= 1`.
    pub fn kron_power(&self, r: usize) -> Result<SparseTensor> {
        if r == 0 {
            return Err(Error::Parameter("Kronecker power needs r >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..r {
            acc = acc.kron_product(self)?;
        }
        Ok(acc)
    }

    /// Rank over `Z_p` of the unfolding that keeps `leg` (1, 2 or 3) as rows.
    ///
    /// Columns outside the support are identically zero and are dropped
    /// before elimination.
    pub fn flattening_rank(&self, leg: usize) -> Result<usize> {
        if !(1..=3).contains(&leg) {
            return Err(Error::Parameter(format!(
                "leg must be 1, 2 or 3, got {leg}"
            )));
        }
        let row_axis = leg - 1;
        let (a, b) = match row_axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut columns: HashMap<(usize, usize), usize> = HashMap::new();
        for idx in self.entries.keys() {
            let next = columns.len();
            columns.entry((idx[a], idx[b])).or_insert(next);
        }
        let rows = self.dims[row_axis];
        let cols = columns.len();
        if rows.saturating_mul(cols) > MAX_ENTRIES {
            return Err(Error::Guard(format!(
                "unfolding of size {rows} x {cols} is too large"
            )));
        }
        let mut matrix = vec![vec![FieldElement::ZERO; cols]; rows];
        for (idx, &c) in &self.entries {
            matrix[idx[row_axis]][columns[&(idx[a], idx[b])]] = c;
        }
        Ok(rank_mod_p(&self.field, matrix))
    }
}

/// Row-echelon rank by Gaussian elimination over `Z_p`.
pub fn rank_mod_p(f: &FieldContext, mut m: Vec<Vec<FieldElement>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = f.inv(m[rank][col]).expect("pivot is nonzero");
        for x in &mut m[rank][col..cols] {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for c in col..cols {
                row[c] = f.sub(row[c], f.mul(factor, pivot_row[c]));
            }
        }
        rank += 1;
    }
    rank
}

/// `scale * (u ⊗ v ⊗ w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneTerm {
    pub u: Vec<FieldElement>,
    pub v: Vec<FieldElement>,
    pub w: Vec<FieldElement>,
    pub scale: FieldElement,
}

/// A rank upper-bound certificate: a list of rank-one terms over one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    field: FieldContext,
    dims: Index3,
    terms: Vec<RankOneTerm>,
}

impl Decomposition {
    pub fn new(field: FieldContext, dims: Index3, terms: Vec<RankOneTerm>) -> Result<Self> {
        for (t, term) in terms.iter().enumerate() {
            let lens = [term.u.len(), term.v.len(), term.w.len()];
            if lens != dims {
                return Err(Error::Dimension(format!(
                    "term {t} has vector lengths {lens:?}, expected {dims:?}"
                )));
            }
            let p = field.modulus();
            let bad = term
                .u
                .iter()
                .chain(&term.v)
                .chain(&term.w)
                .chain(std::iter::once(&term.scale))
                .any(|c| c.value() >= p);
            if bad {
                return Err(Error::Parameter(format!(
                    "term {t} holds a value that is not a residue modulo {p}"
                )));
            }
        }
        Ok(Decomposition { field, dims, terms })
    }

    pub fn field(&self) -> FieldContext {
        self.field
    }

    pub fn dims(&self) -> Index3 {
        self.dims
    }

    pub fn terms(&self) -> &[RankOneTerm] {
        &self.terms
    }

    pub fn terms_mut(&mut self) -> &mut [RankOneTerm] {
        &mut self.terms
    }

    /// Number of terms, i.e. the rank upper bound this decomposition certifies.
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// The explicit tensor `sum_t scale_t * u_t ⊗ v_t ⊗ w_t`.
    pub fn expand(&self) -> Result<SparseTensor> {
        let [n1, n2, n3] = self.dims;
        let cells = n1.saturating_mul(n2).saturating_mul(n3);
        if cells > MAX_ENTRIES {
            return Err(Error::Guard(format!(
                "dense expansion of dims {:?} needs {cells} cells",
                self.dims
            )));
        }
        let f = self.field;
        let mut dense = vec![FieldElement::ZERO; cells];
        for term in &self.terms {
            for (i, &ui) in term.u.iter().enumerate() {
                if ui.is_zero() {
                    continue;
                }
                let a = f.mul(term.scale, ui);
                for (j, &vj) in term.v.iter().enumerate() {
                    if vj.is_zero() {
                        continue;
                    }
                    let b = f.mul(a, vj);
                    let row = &mut dense[(i * n2 + j) * n3..(i * n2 + j + 1) * n3];
                    for (cell, &wk) in row.iter_mut().zip(&term.w) {
                        *cell = f.add(*cell, f.mul(b, wk));
                    }
                }
            }
        }
        let entries = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(flat, c)| ([flat / (n2 * n3), flat / n3 % n2, flat % n3], c))
            .collect();
        Ok(SparseTensor {
            field: f,
            dims: self.dims,
            entries,
        })
    }

    /// True iff the decomposition expands to `target` exactly.
    pub fn verify(&self, target: &SparseTensor) -> Result<bool> {
        if self.dims != target.dims {
            return Err(Error::Dimension(format!(
                "decomposition dims {:?} vs tensor dims {:?}",
                self.dims, target.dims
            )));
        }
        if self.field != target.field {
            return Ok(false);
        }
        Ok(self.expand()? == *target)
    }

    /// `sum_t scale_t (u_t . x)(v_t . y)(w_t . z)`.
    pub fn eval(
        &self,
        x: &[FieldElement],
        y: &[FieldElement],
        z: &[FieldElement],
    ) -> Result<FieldElement> {
        let lens = [x.len(), y.len(), z.len()];
        if lens != self.dims {
            return Err(Error::Dimension(format!(
                "vector lengths {lens:?} for dims {:?}",
                self.dims
            )));
        }
        let f = self.field;
        Ok(self.terms.iter().fold(FieldElement::ZERO, |acc, t| {
            let prod = f.mul(f.mul(f.dot(&t.u, x), f.dot(&t.v, y)), f.dot(&t.w, z));
            f.add(acc, f.mul(t.scale, prod))
        }))
    }

    fn power_lengths(&self, r: usize) -> Result<Index3> {
        let mut lens = [1usize; 3];
        for (axis, len) in lens.iter_mut().enumerate() {
            for _ in 0..r {
                *len = len.checked_mul(self.dims[axis]).ok_or_else(|| {
                    Error::Guard(format!("dimension {}^{r} overflows", self.dims[axis]))
                })?;
            }
        }
        Ok(lens)
    }

    /// Evaluates the `r`-th Kronecker power of the decomposed tensor at
    /// `(x, y, z)` without materialising it.
    ///
    /// Each level views a vector as an `N x N^(r-1)` array, contracts the
    /// outer axis against the term vectors and recurses, for
    /// `O(R^r + r R N^r)` field operations with `R` terms.
    pub fn eval_kron(
        &self,
        r: usize,
        x: &[FieldElement],
        y: &[FieldElement],
        z: &[FieldElement],
    ) -> Result<FieldElement> {
        let lens = self.power_lengths(r)?;
        if [x.len(), y.len(), z.len()] != lens {
            return Err(Error::Dimension(format!(
                "vector lengths {:?} for power {r} of dims {:?}",
                [x.len(), y.len(), z.len()],
                self.dims
            )));
        }
        Ok(self.eval_kron_dense(r, lens, x, y, z))
    }

    /// As [`eval_kron`](Self::eval_kron) with vectors given as
    /// `(index, value)` lists; the first contraction works on the sparse
    /// form and deeper levels are dense.
    pub fn eval_kron_sparse(
        &self,
        r: usize,
        x: &[(usize, FieldElement)],
        y: &[(usize, FieldElement)],
        z: &[(usize, FieldElement)],
    ) -> Result<FieldElement> {
        let lens = self.power_lengths(r)?;
        for (axis, vec) in [x, y, z].into_iter().enumerate() {
            if let Some(&(i, _)) = vec.iter().find(|(i, _)| *i >= lens[axis]) {
                return Err(Error::Dimension(format!(
                    "sparse index {i} outside length {}",
                    lens[axis]
                )));
            }
        }
        let f = self.field;
        if r == 0 {
            let at0 = |v: &[(usize, FieldElement)]| {
                v.iter()
                    .fold(FieldElement::ZERO, |acc, &(_, c)| f.add(acc, c))
            };
            return Ok(f.mul(f.mul(at0(x), at0(y)), at0(z)));
        }
        if x.is_empty() || y.is_empty() || z.is_empty() {
            return Ok(FieldElement::ZERO);
        }
        let inner = [
            lens[0] / self.dims[0],
            lens[1] / self.dims[1],
            lens[2] / self.dims[2],
        ];
        let contract = |coeffs: &[FieldElement], vec: &[(usize, FieldElement)], stride: usize| {
            let mut out = vec![FieldElement::ZERO; stride];
            for &(idx, val) in vec {
                let c = coeffs[idx / stride];
                if !c.is_zero() {
                    let slot = &mut out[idx % stride];
                    *slot = f.add(*slot, f.mul(c, val));
                }
            }
            out
        };
        let mut total = FieldElement::ZERO;
        for t in &self.terms {
            let cz = contract(&t.w, z, inner[2]);
            if cz.iter().all(|c| c.is_zero()) {
                continue;
            }
            let cx = contract(&t.u, x, inner[0]);
            let cy = contract(&t.v, y, inner[1]);
            let sub = self.eval_kron_dense(r - 1, inner, &cx, &cy, &cz);
            total = f.add(total, f.mul(t.scale, sub));
        }
        Ok(total)
    }

    fn eval_kron_dense(
        &self,
        r: usize,
        lens: Index3,
        x: &[FieldElement],
        y: &[FieldElement],
        z: &[FieldElement],
    ) -> FieldElement {
        let f = self.field;
        if r == 0 {
            return f.mul(f.mul(x[0], y[0]), z[0]);
        }
        if r == 1 {
            return self.eval(x, y, z).expect("lengths checked by caller");
        }
        let inner = [
            lens[0] / self.dims[0],
            lens[1] / self.dims[1],
            lens[2] / self.dims[2],
        ];
        let contract = |coeffs: &[FieldElement], vec: &[FieldElement], stride: usize| {
            let mut out = vec![FieldElement::ZERO; stride];
            for (i, &c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (slot, &val) in out.iter_mut().zip(&vec[i * stride..(i + 1) * stride]) {
                    *slot = f.add(*slot, f.mul(c, val));
                }
            }
            out
        };
        let mut total = FieldElement::ZERO;
        for t in &self.terms {
            let cz = contract(&t.w, z, inner[2]);
            if cz.iter().all(|c| c.is_zero()) {
                continue;
            }
            let cx = contract(&t.u, x, inner[0]);
            let cy = contract(&t.v, y, inner[1]);
            let sub = self.eval_kron_dense(r - 1, inner, &cx, &cy, &cz);
            total = f.add(total, f.mul(t.scale, sub));
        }
        total
    }
}
