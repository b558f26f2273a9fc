use std::collections::btree_map;
use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Field, Scalar};
use crate::error::{Error, Result};

/// A finitely supported vector indexed by an ordered key. Zero coefficients
/// are never stored, so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec<K: Ord, F = Scalar> {
    entries: BTreeMap<K, F>,
}

impl<K: Ord, F> Default for SparseVec<K, F> {
    fn default() -> Self {
        SparseVec { entries: BTreeMap::new() }
    }
}

impl<K: Ord + Clone, F: Field> SparseVec<K, F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(key: K) -> Self {
        let mut v = Self::new();
        v.entries.insert(key, F::one());
        v
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (K, F)>) -> Self {
        let mut v = Self::new();
        for (k, c) in pairs {
            v.add_term(k, c);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &K) -> Option<&F> {
        self.entries.get(key)
    }

    pub fn coeff(&self, key: &K) -> F {
        self.entries.get(key).cloned().unwrap_or_else(F::zero)
    }

    /// Smallest key with a nonzero coefficient.
    pub fn leading(&self) -> Option<(&K, &F)> {
        self.entries.iter().next()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, F> {
        self.entries.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, F> {
        self.entries.keys()
    }

    pub fn add_term(&mut self, key: K, c: F) {
        if c.is_zero() {
            return;
        }
        match self.entries.entry(key) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Self, c: &F) {
        if c.is_zero() {
            return;
        }
        for (k, x) in other.entries.iter() {
            self.add_term(k.clone(), x.clone() * c.clone());
        }
    }

    pub fn scaled(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(k, x)| (k.clone(), x.clone() * c.clone())).collect(),
        }
    }

    /// Drops every entry whose key fails the predicate.
    pub fn retain(&mut self, mut keep: impl FnMut(&K) -> bool) {
        self.entries.retain(|k, _| keep(k));
    }

    pub fn map_keys<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> L) -> SparseVec<L, F> {
        SparseVec::from_pairs(self.entries.iter().map(|(k, x)| (f(k), x.clone())))
    }

    pub(crate) fn range_after(&self, key: &K) -> Option<K> {
        use std::ops::Bound::{Excluded, Unbounded};
        self.entries.range((Excluded(key), Unbounded)).next().map(|(k, _)| k.clone())
    }
}

impl<K: Ord, F> IntoIterator for SparseVec<K, F> {
    type Item = (K, F);
    type IntoIter = btree_map::IntoIter<K, F>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

impl<'a, K: Ord, F> IntoIterator for &'a SparseVec<K, F> {
    type Item = (&'a K, &'a F);
    type IntoIter = btree_map::Iter<'a, K, F>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

impl<K: Ord + Clone, F: Field> FromIterator<(K, F)> for SparseVec<K, F> {
    fn from_iter<I: IntoIterator<Item = (K, F)>>(iter: I) -> Self {
        Self::from_pairs(iter)
    }
}

/// Row-major sparse matrix over the rationals. Row `i` is stored as a sparse
/// vector of column indices; iteration order is always canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<SparseVec<usize>>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            rows: vec![SparseVec::new(); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            rows: (0..n).map(SparseVec::unit).collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets. Duplicate positions and
    /// out-of-range indices are rejected; zero values are dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, entries: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Result<Self> {
        let mut m = Self::zeros(n_rows, n_cols);
        for (r, c, x) in entries {
            if r >= n_rows || c >= n_cols {
                return Err(Error::DimensionMismatch(format!("entry ({r},{c}) outside {n_rows}x{n_cols}")));
            }
            if m.rows[r].get(&c).is_some() {
                return Err(Error::InvariantViolation(format!("duplicate entry at ({r},{c})")));
            }
            m.rows[r].add_term(c, x);
        }
        Ok(m)
    }

    pub fn from_rows(n_cols: usize, rows: Vec<SparseVec<usize>>) -> Result<Self> {
        if let Some(bad) = rows.iter().flat_map(|r| r.keys()).find(|&&c| c >= n_cols) {
            return Err(Error::DimensionMismatch(format!("column {bad} outside width {n_cols}")));
        }
        Ok(SparseMatrix {
            n_rows: rows.len(),
            n_cols,
            rows,
        })
    }

    pub fn from_dense(n_cols: usize, dense: &[Vec<i64>]) -> Result<Self> {
        let rows = dense
            .iter()
            .map(|row| {
                if row.len() != n_cols {
                    return Err(Error::DimensionMismatch(format!("row of length {} in width {n_cols}", row.len())));
                }
                Ok(row.iter().enumerate().map(|(c, &x)| (c, super::int(x))).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix {
            n_rows: dense.len(),
            n_cols,
            rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &SparseVec<usize> {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseVec<usize>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<SparseVec<usize>> {
        self.rows
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, x)| (r, c, x)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &SparseVec<usize>) -> SparseVec<usize> {
        let mut out = SparseVec::new();
        for (&i, c) in v.iter() {
            out.add_scaled(&self.rows[i], c);
        }
        out
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let rows = self.rows.iter().map(|r| other.apply(r)).collect();
        Ok(SparseMatrix {
            n_rows: self.n_rows,
            n_cols: other.n_cols,
            rows,
        })
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "stacking widths {} and {}",
                self.n_cols, other.n_cols
            )));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(SparseMatrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            rows,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }
}

impl std::fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = (0..self.n_cols)
                .map(|c| super::format_scalar(&row.get(&c).cloned().unwrap_or_else(Scalar::zero)))
                .collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}
