use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::ideal::{ideal_basis_up_to, IdealTruncation};
use super::presentation::{max_len, multiply, Path, PathPoly, Presentation, Quiver, SigmaSet};
use crate::error::{Error, Result};
use crate::exactlin::{EchelonBasis, SparseVec};

/// A linear category in which word growth can be measured: vectors are finite
/// combinations of keys, every key lives in a single hom space, and products
/// can be brought to a normal form.
pub trait Composer {
    type Key: Ord + Clone + std::fmt::Debug;

    /// Diagrammatic product `a` then `b`, already in normal form.
    fn compose(&self, a: &SparseVec<Self::Key>, b: &SparseVec<Self::Key>) -> SparseVec<Self::Key>;

    fn normal_form(&self, v: &SparseVec<Self::Key>) -> SparseVec<Self::Key>;

    /// (source, target) objects of the hom space containing `key`.
    fn block(&self, key: &Self::Key) -> (u32, u32);
}

/// Cumulative span data after each word length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanLayers {
    /// `per_block[n-1][(K, L)]` = dim of `W_Σ(n) ∩ hom(K, L)`.
    pub per_block: Vec<BTreeMap<(u32, u32), usize>>,
    /// Indices of Σ elements that vanish in the category.
    pub zero_elements: Vec<usize>,
}

impl SpanLayers {
    pub fn totals(&self) -> Vec<usize> {
        self.per_block.iter().map(|m| m.values().sum()).collect()
    }

    pub fn at_object(&self, object: u32) -> Vec<usize> {
        self.per_block
            .iter()
            .map(|m| m.get(&(object, object)).copied().unwrap_or(0))
            .collect()
    }
}

/// Dimensions of `W_Σ(n)` for n = 1..=n_max, broken down by hom space.
///
/// Uses `W(n) = W(n-1) + Δ_{n-1}·Σ`, where `Δ_{n-1}` spans a complement of
/// `W(n-2)` in `W(n-1)`; each basis vector is supported in one hom space.
pub fn span_growth<C: Composer>(c: &C, sigma: &[SparseVec<C::Key>], n_max: usize) -> Result<SpanLayers> {
    if sigma.is_empty() {
        return Err(Error::validation("Σ is empty"));
    }
    let normalized: Vec<SparseVec<C::Key>> = sigma.iter().map(|s| c.normal_form(s)).collect();
    for (i, s) in normalized.iter().enumerate() {
        let blocks: BTreeSet<(u32, u32)> = s.keys().map(|k| c.block(k)).collect();
        if blocks.len() > 1 {
            return Err(Error::validation(format!("Σ element {i} spans several hom spaces")));
        }
    }
    let zero_elements = normalized.iter().enumerate().filter(|(_, s)| s.is_zero()).map(|(i, _)| i).collect();

    let mut basis: EchelonBasis<C::Key> = EchelonBasis::new();
    let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut per_block = Vec::with_capacity(n_max);
    let mut delta: Vec<SparseVec<C::Key>> = Vec::new();

    let push = |v: &SparseVec<C::Key>,
                basis: &mut EchelonBasis<C::Key>,
                counts: &mut BTreeMap<(u32, u32), usize>,
                out: &mut Vec<SparseVec<C::Key>>| {
        if basis.insert(v) {
            let row = basis.rows().last().unwrap();
            *counts.entry(c.block(row.leading().unwrap().0)).or_default() += 1;
            out.push(row.clone());
        }
    };

    for n in 1..=n_max {
        let mut fresh = Vec::new();
        if n == 1 {
            for s in &normalized {
                push(s, &mut basis, &mut counts, &mut fresh);
            }
        } else {
            for b in &delta {
                for s in &normalized {
                    let p = c.compose(b, s);
                    if !p.is_zero() {
                        push(&p, &mut basis, &mut counts, &mut fresh);
                    }
                }
            }
        }
        per_block.push(counts.clone());
        delta = fresh;
        if delta.is_empty() {
            per_block.resize(n_max, counts.clone());
            break;
        }
    }
    Ok(SpanLayers { per_block, zero_elements })
}

/// `n ↦ dim W_Σ(n)` (or `dim W_Σ(n; L)`) with provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthTable {
    /// `dims[n-1] = d_n`.
    pub dims: Vec<usize>,
    /// `exact[n-1]` is false when `d_n` is only an upper bound.
    pub exact: Vec<bool>,
    pub sigma_size: usize,
    pub object: Option<String>,
    pub warnings: Vec<String>,
}

impl GrowthTable {
    pub fn from_dims(dims: Vec<usize>, sigma_size: usize) -> Self {
        let exact = vec![true; dims.len()];
        GrowthTable {
            dims,
            exact,
            sigma_size,
            object: None,
            warnings: Vec::new(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.dims.len()
    }

    pub fn d(&self, n: usize) -> usize {
        self.dims[n - 1]
    }

    /// TSV with header `n, dim, exact_flag`; `exact_flag` is `exact` or `bound`.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("n\tdim\texact_flag\n");
        for (i, (d, e)) in self.dims.iter().zip(&self.exact).enumerate() {
            let _ = writeln!(s, "{}\t{}\t{}", i + 1, d, if *e { "exact" } else { "bound" });
        }
        s
    }

    pub fn is_monotone(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] <= w[1])
    }

    /// `Σ_{l=1}^n |Σ|^l`, the count of all words of length ≤ n.
    pub fn trivial_bound(&self, n: usize) -> BigUint {
        let s = BigUint::from(self.sigma_size);
        let mut total = BigUint::from(0u32);
        let mut p = BigUint::one();
        for _ in 0..n {
            p *= &s;
            total += &p;
        }
        total
    }
}

/// The quotient of the path category by a truncated relation ideal.
pub struct QuotientComposer {
    ideal: IdealTruncation,
}

impl QuotientComposer {
    pub fn new(quiver: &Quiver, bound: usize, slack: usize) -> Self {
        QuotientComposer {
            ideal: ideal_basis_up_to(quiver, bound, slack),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.ideal.is_exact()
    }
}

impl Composer for QuotientComposer {
    type Key = Path;

    fn compose(&self, a: &PathPoly, b: &PathPoly) -> PathPoly {
        self.ideal.normal_form(&multiply(a, b))
    }

    fn normal_form(&self, v: &PathPoly) -> PathPoly {
        self.ideal.normal_form(v)
    }

    fn block(&self, key: &Path) -> (u32, u32) {
        (key.source, key.target)
    }
}

/// Options for growth computations over presentations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthOptions {
    /// Extra relator length used when relations are length-inhomogeneous.
    pub slack: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { slack: 2 }
    }
}

pub(crate) struct PresentationRun {
    pub quiver: Quiver,
    pub layers: SpanLayers,
    pub exact: bool,
    pub sigma_size: usize,
}

pub(crate) fn run_presentation(p: &Presentation, sigma: &SigmaSet, n_max: usize, opts: GrowthOptions) -> Result<PresentationRun> {
    let quiver = p.compile()?;
    let polys = quiver.resolve_sigma(p, sigma)?;
    let longest = polys.iter().map(max_len).max().unwrap_or(1).max(1);
    let composer = QuotientComposer::new(&quiver, n_max * longest, opts.slack);
    let layers = span_growth(&composer, &polys, n_max)?;
    Ok(PresentationRun {
        exact: composer.is_exact(),
        quiver,
        layers,
        sigma_size: polys.len(),
    })
}

fn zero_warnings(layers: &SpanLayers) -> Vec<String> {
    layers
        .zero_elements
        .iter()
        .map(|i| format!("Σ element {i} is zero in the quotient and contributes nothing"))
        .collect()
}

/// `d_n = dim W_Σ(n)` for n = 1..=n_max.
pub fn word_growth(p: &Presentation, sigma: &SigmaSet, n_max: usize) -> Result<GrowthTable> {
    word_growth_with(p, sigma, n_max, GrowthOptions::default())
}

pub fn word_growth_with(p: &Presentation, sigma: &SigmaSet, n_max: usize, opts: GrowthOptions) -> Result<GrowthTable> {
    let run = run_presentation(p, sigma, n_max, opts)?;
    let dims = run.layers.totals();
    Ok(GrowthTable {
        exact: vec![run.exact; dims.len()],
        dims,
        sigma_size: run.sigma_size,
        object: None,
        warnings: zero_warnings(&run.layers),
    })
}

/// `d_n = dim W_Σ(n; L)`: only words that are endomorphisms of `object`.
pub fn word_growth_at_object(p: &Presentation, sigma: &SigmaSet, object: &str, n_max: usize) -> Result<GrowthTable> {
    word_growth_at_object_with(p, sigma, object, n_max, GrowthOptions::default())
}

pub fn word_growth_at_object_with(
    p: &Presentation,
    sigma: &SigmaSet,
    object: &str,
    n_max: usize,
    opts: GrowthOptions,
) -> Result<GrowthTable> {
    if !p.objects.iter().any(|o| o == object) {
        return Err(Error::validation(format!("unknown object {object:?}")));
    }
    let run = run_presentation(p, sigma, n_max, opts)?;
    let l = run.quiver.object(object)?;
    let dims = run.layers.at_object(l);
    Ok(GrowthTable {
        exact: vec![run.exact; dims.len()],
        dims,
        sigma_size: run.sigma_size,
        object: Some(object.to_string()),
        warnings: zero_warnings(&run.layers),
    })
}

/// One row of the category-to-object decomposition check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionRow {
    pub n: usize,
    pub total: usize,
    pub per_object: Vec<usize>,
    /// `(Π_i (d_n(L_i) + 1))^m · |Σ|^{m-1}`.
    pub bound: BigUint,
    pub holds: bool,
}

/// With Σ augmented by the identities of the objects it touches, checks
/// `dim W_Σ(n) ≤ (Π_i (dim W_Σ(n; L_i) + 1))^m · |Σ|^{m-1}`, the exponentiated
/// form of the logarithmic decomposition bound, exactly for every n.
pub fn category_to_object_bound<C: Composer>(
    c: &C,
    sigma: &[SparseVec<C::Key>],
    identities: &BTreeMap<u32, SparseVec<C::Key>>,
    n_max: usize,
) -> Result<Vec<DecompositionRow>> {
    let mut objects: BTreeSet<u32> = BTreeSet::new();
    for s in sigma {
        for k in s.keys() {
            let (a, b) = c.block(k);
            objects.insert(a);
            objects.insert(b);
        }
    }
    let mut augmented = sigma.to_vec();
    for o in &objects {
        let id = identities
            .get(o)
            .ok_or_else(|| Error::Precondition(format!("no identity supplied for object {o}")))?;
        if !augmented.contains(id) {
            augmented.push(id.clone());
        }
    }
    let layers = span_growth(c, &augmented, n_max)?;
    let m = objects.len() as u32;
    let sigma_size = BigUint::from(augmented.len());
    let totals = layers.totals();
    let rows = (1..=n_max)
        .map(|n| {
            let per_object: Vec<usize> = objects.iter().map(|&o| layers.at_object(o)[n - 1]).collect();
            let product: BigUint = per_object.iter().map(|&d| BigUint::from(d + 1)).product();
            let bound = product.pow(m) * sigma_size.pow(m.saturating_sub(1));
            let total = totals[n - 1];
            DecompositionRow {
                n,
                total,
                holds: BigUint::from(total) <= bound,
                per_object,
                bound,
            }
        })
        .collect();
    Ok(rows)
}

/// Identities of every object of a quiver, as paths of length zero.
pub fn path_identities(q: &Quiver) -> BTreeMap<u32, PathPoly> {
    (0..q.objects.len() as u32)
        .map(|o| (o, PathPoly::unit(Path::identity(o))))
        .collect()
}
