use std::collections::BTreeMap;

use num_traits::One;

use super::{Field, Scalar, SparseMatrix, SparseVec};
use crate::error::{Error, Result};

/// Incrementally built row-echelon basis. Each row has leading coefficient one
/// at its pivot, which is its smallest key; pivots are pairwise distinct.
#[derive(Clone, Debug)]
pub struct EchelonBasis<K: Ord, F = Scalar> {
    rows: Vec<SparseVec<K, F>>,
    pivots: BTreeMap<K, usize>,
}

impl<K: Ord, F> Default for EchelonBasis<K, F> {
    fn default() -> Self {
        EchelonBasis {
            rows: Vec::new(),
            pivots: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone, F: Field> EchelonBasis<K, F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Rows in insertion order.
    pub fn rows(&self) -> &[SparseVec<K, F>] {
        &self.rows
    }

    /// Rows ordered by pivot.
    pub fn sorted_rows(&self) -> Vec<&SparseVec<K, F>> {
        self.pivots.values().map(|&i| &self.rows[i]).collect()
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> + '_ {
        self.pivots.keys()
    }

    pub fn is_pivot(&self, key: &K) -> bool {
        self.pivots.contains_key(key)
    }

    /// Full reduction: the result has no key that is a pivot of this basis.
    /// Two vectors are congruent modulo the span iff their reductions agree.
    pub fn reduce(&self, v: &SparseVec<K, F>) -> SparseVec<K, F> {
        let mut out = v.clone();
        let mut cursor = match out.leading() {
            Some((k, _)) => k.clone(),
            None => return out,
        };
        loop {
            if let Some(&row) = self.pivots.get(&cursor) {
                let c = out.coeff(&cursor);
                out.add_scaled(&self.rows[row], &-c);
            }
            match out.range_after(&cursor) {
                Some(next) => cursor = next,
                None => break,
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec<K, F>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec<K, F>) -> bool {
        let r = self.reduce(v);
        self.push_reduced(r)
    }

    fn push_reduced(&mut self, r: SparseVec<K, F>) -> bool {
        let (pivot, lead) = match r.leading() {
            Some((k, c)) => (k.clone(), c.clone()),
            None => return false,
        };
        let normalized = if lead.is_one() { r } else { r.scaled(&(F::one() / lead)) };
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(normalized);
        true
    }
}

/// Rank and row-echelon basis of the row space; basis rows are ordered by
/// strictly increasing pivot column.
pub fn echelonize(m: &SparseMatrix) -> (usize, SparseMatrix) {
    let mut basis = EchelonBasis::new();
    for row in m.rows() {
        basis.insert(row);
    }
    let rows: Vec<SparseVec<usize>> = basis.sorted_rows().into_iter().cloned().collect();
    let rank = rows.len();
    let out = SparseMatrix::from_rows(m.n_cols(), rows).expect("echelon rows stay within width");
    (rank, out)
}

/// Key for augmented vectors: the main part orders before the bookkeeping tags,
/// so a row whose pivot is a tag has vanishing main part.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Aug<K> {
    Main(K),
    Tag(usize),
}

fn augment<K: Ord + Clone>(v: &SparseVec<K>, tag: Option<usize>) -> SparseVec<Aug<K>> {
    let mut out: SparseVec<Aug<K>> = v.map_keys(|k| Aug::Main(k.clone()));
    if let Some(t) = tag {
        out.add_term(Aug::Tag(t), Scalar::one());
    }
    out
}

/// Basis of `{y : y * m = 0}`, as rows indexed by the rows of `m`.
pub fn left_kernel(m: &SparseMatrix) -> SparseMatrix {
    let mut basis = EchelonBasis::new();
    for (i, row) in m.rows().iter().enumerate() {
        basis.insert(&augment(row, Some(i)));
    }
    let kernel: Vec<SparseVec<usize>> = basis
        .sorted_rows()
        .into_iter()
        .filter(|r| matches!(r.leading(), Some((Aug::Tag(_), _))))
        .map(|r| {
            r.iter()
                .filter_map(|(k, c)| match k {
                    Aug::Tag(t) => Some((*t, c.clone())),
                    Aug::Main(_) => None,
                })
                .collect()
        })
        .collect();
    SparseMatrix::from_rows(m.n_rows(), kernel).expect("kernel rows index rows of m")
}

/// Basis of `rowspace(a) ∩ rowspace(b)` by the Zassenhaus construction: echelonize
/// `[a | a]` stacked on `[b | 0]`; rows whose left half vanishes carry the
/// intersection in their right half.
pub fn subspace_intersection(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.n_cols() != b.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces of ambient dimensions {} and {}",
            a.n_cols(),
            b.n_cols()
        )));
    }
    let n = a.n_cols();
    let mut basis: EchelonBasis<(u8, usize)> = EchelonBasis::new();
    for row in a.rows() {
        let mut v: SparseVec<(u8, usize)> = row.map_keys(|&c| (0, c));
        v.add_scaled(&row.map_keys(|&c| (1, c)), &Scalar::one());
        basis.insert(&v);
    }
    for row in b.rows() {
        basis.insert(&row.map_keys(|&c| (0, c)));
    }
    let rows = basis
        .sorted_rows()
        .into_iter()
        .filter(|r| matches!(r.leading(), Some(((1, _), _))))
        .map(|r| r.iter().map(|(&(_, c), x)| (c, x.clone())).collect())
        .collect();
    SparseMatrix::from_rows(n, rows)
}

pub fn subspace_intersection_dim(a: &SparseMatrix, b: &SparseMatrix) -> Result<usize> {
    Ok(subspace_intersection(a, b)?.n_rows())
}

/// Writes vectors as combinations of a fixed generating list.
#[derive(Clone, Debug)]
pub struct Expresser<K: Ord> {
    basis: EchelonBasis<Aug<K>>,
}

impl<K: Ord + Clone> Expresser<K> {
    pub fn new<'a>(generators: impl IntoIterator<Item = &'a SparseVec<K>>) -> Self
    where
        K: 'a,
    {
        let mut basis = EchelonBasis::new();
        for (i, g) in generators.into_iter().enumerate() {
            basis.insert(&augment(g, Some(i)));
        }
        Expresser { basis }
    }

    /// Coefficients `c` with `v = Σ c_i g_i`, or `None` if `v` is outside the span.
    pub fn express(&self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let r = self.basis.reduce(&augment(v, None));
        let mut out = SparseVec::new();
        for (k, c) in r.iter() {
            match k {
                Aug::Main(_) => return None,
                Aug::Tag(t) => out.add_term(*t, -c.clone()),
            }
        }
        Some(out)
    }
}
