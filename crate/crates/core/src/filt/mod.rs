//! Filtered A∞ categories in adapted-basis form: every basis vector carries a
//! rational level, and the level-≤-x spans form the filtration.

mod report;
mod verify;

use std::collections::BTreeMap;

use serde::Serialize;

pub use report::{ReportRow, VerificationReport};
pub use verify::{tw_pipeline, verify_growth_to_filtration, verify_tw_generator_bound, GeneratorBoundInstance, TwSigma};

use crate::ainf::{for_each_tuple, hom_complex, AInfStructure, Element, HomComplex, TwCategory, TwistedComplex};
use crate::error::{Error, Result};
use crate::exactlin::{format_scalar, image_in_cohomology_dim, int, Scalar, SparseMatrix};
use crate::fpcat::least_squares;

/// A level for every basis id of a category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationAssignment {
    #[serde(serialize_with = "serialize_levels")]
    levels: Vec<Scalar>,
}

fn serialize_levels<S: serde::Serializer>(levels: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(levels.iter().map(format_scalar))
}

impl FiltrationAssignment {
    pub fn new(levels: Vec<Scalar>) -> Self {
        FiltrationAssignment { levels }
    }

    /// Every basis vector at level 0.
    pub fn trivial(len: usize) -> Self {
        FiltrationAssignment { levels: vec![int(0); len] }
    }

    pub fn levels(&self) -> &[Scalar] {
        &self.levels
    }

    pub fn level(&self, b: usize) -> &Scalar {
        &self.levels[b]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Largest level among the components of `v`; `None` for zero.
    pub fn element_level(&self, v: &Element) -> Option<Scalar> {
        v.keys().map(|&k| &self.levels[k]).max().cloned()
    }

    pub fn matches<C: AInfStructure + ?Sized>(&self, c: &C) -> Result<()> {
        if self.levels.len() != c.basis_len() {
            return Err(Error::DimensionMismatch(format!(
                "{} levels for {} basis elements",
                self.levels.len(),
                c.basis_len()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationViolation {
    pub inputs: Vec<String>,
    pub output: String,
    pub level: String,
    pub bound: String,
    pub excess: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationReport {
    pub arity_bound: usize,
    pub checked: usize,
    /// Tuples whose product left a truncated window.
    pub skipped: usize,
    pub violations: Vec<FiltrationViolation>,
}

impl FiltrationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `level(μ^k(x_1..x_k)) ≤ level(x_1) + ... + level(x_k)` componentwise
/// on every composable basis tuple of arity ≤ `arity_bound`.
pub fn check_filtration_axiom<C: AInfStructure + ?Sized>(c: &C, f: &FiltrationAssignment, arity_bound: usize) -> Result<FiltrationReport> {
    f.matches(c)?;
    let mut report = FiltrationReport {
        arity_bound,
        checked: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    for k in 1..=arity_bound.min(c.max_arity()) {
        for_each_tuple(c, k, &mut |x| {
            let Some(out) = c.mu(x) else {
                report.skipped += 1;
                return true;
            };
            report.checked += 1;
            let bound: Scalar = x.iter().map(|&b| f.level(b)).sum();
            for &o in out.keys() {
                let level = f.level(o);
                if *level > bound {
                    report.violations.push(FiltrationViolation {
                        inputs: x.iter().map(|&b| c.basis_label(b)).collect(),
                        output: c.basis_label(o),
                        level: format_scalar(level),
                        bound: format_scalar(&bound),
                        excess: format_scalar(&(level - &bound)),
                    });
                }
            }
            true
        });
    }
    Ok(report)
}

/// Every differential entry of `t` must lie at level ≤ `c_val`.
pub fn check_admissible<C: AInfStructure + ?Sized>(c: &C, f: &FiltrationAssignment, t: &TwistedComplex, c_val: &Scalar) -> Result<()> {
    f.matches(c)?;
    for (&(a, b), v) in &t.delta {
        for &k in v.keys() {
            if f.level(k) > c_val {
                return Err(Error::validation(format!(
                    "differential entry ({a},{b}) has component {} at level {} > {}",
                    c.basis_label(k),
                    format_scalar(f.level(k)),
                    format_scalar(c_val)
                )));
            }
        }
    }
    Ok(())
}

/// Levels on a pool of admissible twisted complexes: a base element in block
/// `(i, j)` at level `a` sits at level `a - (j - i)·c`.
pub fn tw_filtration<C: AInfStructure + ?Sized>(
    tw: &TwCategory<'_, C>,
    f: &FiltrationAssignment,
    c_val: &Scalar,
) -> Result<FiltrationAssignment> {
    if *c_val <= int(0) {
        return Err(Error::Precondition(format!("threshold {} must be positive", format_scalar(c_val))));
    }
    for (p, t) in tw.complexes().iter().enumerate() {
        check_admissible(tw.base(), f, t, c_val).map_err(|e| match e {
            Error::Validation(m) => Error::Validation(m.into_iter().map(|s| format!("complex {p}: {s}")).collect()),
            other => other,
        })?;
    }
    let levels = tw
        .tw_basis()
        .iter()
        .map(|t| f.level(t.b) - Scalar::from_integer((t.j as i64 - t.i as i64).into()) * c_val)
        .collect();
    Ok(FiltrationAssignment::new(levels))
}

/// `x ↦ i_{K,L,Φ}(x)` for a fixed pair of objects, with the hom complex built once.
pub struct Persistence {
    hom: HomComplex,
    levels: Vec<Scalar>,
    zero_differential: bool,
}

impl Persistence {
    pub fn new<C: AInfStructure + ?Sized>(c: &C, f: &FiltrationAssignment, source: usize, target: usize) -> Result<Self> {
        f.matches(c)?;
        let hom = hom_complex(c, source, target)?;
        let levels = hom.ids.iter().map(|&b| f.level(b).clone()).collect();
        let zero_differential = hom.complex.differential().is_zero();
        Ok(Persistence {
            hom,
            levels,
            zero_differential,
        })
    }

    /// Dimension of the image of `H(level ≤ x)` in `H(hom(K, L))`.
    pub fn dim_at(&self, x: &Scalar) -> Result<usize> {
        if self.zero_differential {
            return Ok(self.levels.iter().filter(|l| *l <= x).count());
        }
        let n = self.hom.ids.len();
        let selected: Vec<(usize, usize, Scalar)> = (0..n)
            .filter(|&i| self.levels[i] <= *x)
            .enumerate()
            .map(|(r, i)| (r, i, int(1)))
            .collect();
        let sub = SparseMatrix::from_triplets(selected.len(), n, selected)?;
        image_in_cohomology_dim(&sub, &self.hom.complex)
    }

    pub fn total(&self) -> usize {
        self.hom.complex.cohomology_dim()
    }
}

pub fn persistence_dim<C: AInfStructure + ?Sized>(
    c: &C,
    f: &FiltrationAssignment,
    source: usize,
    target: usize,
    x: &Scalar,
) -> Result<usize> {
    Persistence::new(c, f, source, target)?.dim_at(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilteredGrowthProfile {
    pub source: String,
    pub target: String,
    #[serde(serialize_with = "serialize_levels")]
    pub grid: Vec<Scalar>,
    pub values: Vec<usize>,
    /// Least-squares slope of `ln i(x)` against `x` on the upper half of the
    /// grid; absent when fewer than two points there are nonzero.
    pub rate_estimate: Option<f64>,
}

impl FilteredGrowthProfile {
    pub fn from_values(source: &str, target: &str, grid: Vec<Scalar>, values: Vec<usize>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} grid points for {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("grid must be strictly increasing".into()));
        }
        let upper: Vec<(f64, f64)> = grid
            .iter()
            .zip(&values)
            .skip(grid.len() / 2)
            .filter(|(_, &v)| v > 0)
            .map(|(x, &v)| (scalar_to_f64(x), (v as f64).ln()))
            .collect();
        let rate_estimate = least_squares(&upper).map(|(slope, _, _)| slope);
        Ok(FilteredGrowthProfile {
            source: source.into(),
            target: target.into(),
            grid,
            values,
            rate_estimate,
        })
    }

    /// TSV with header `x, i`.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("x\ti\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            s.push_str(&format!("{}\t{}\n", format_scalar(x), v));
        }
        s
    }
}

pub(crate) fn scalar_to_f64(x: &Scalar) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn filtered_growth_profile<C: AInfStructure + ?Sized>(
    c: &C,
    f: &FiltrationAssignment,
    source: usize,
    target: usize,
    grid: &[Scalar],
) -> Result<FilteredGrowthProfile> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("grid must be strictly increasing".into()));
    }
    let p = Persistence::new(c, f, source, target)?;
    let values = grid.iter().map(|x| p.dim_at(x)).collect::<Result<Vec<_>>>()?;
    FilteredGrowthProfile::from_values(&c.object_label(source), &c.object_label(target), grid.to_vec(), values)
}

/// The integer grid `1..=n`.
pub fn integer_grid(n: usize) -> Vec<Scalar> {
    (1..=n as i64).map(int).collect()
}

/// `i_{K,L,Φ}` for every ordered pair of objects, sharing hom complexes
/// across repeated queries.
pub(crate) struct PersistenceCache<'a, C: AInfStructure + ?Sized> {
    c: &'a C,
    f: &'a FiltrationAssignment,
    built: BTreeMap<(usize, usize), Persistence>,
}

impl<'a, C: AInfStructure + ?Sized> PersistenceCache<'a, C> {
    pub(crate) fn new(c: &'a C, f: &'a FiltrationAssignment) -> Self {
        PersistenceCache {
            c,
            f,
            built: BTreeMap::new(),
        }
    }

    pub(crate) fn dim_at(&mut self, source: usize, target: usize, x: &Scalar) -> Result<usize> {
        if !self.built.contains_key(&(source, target)) {
            let p = Persistence::new(self.c, self.f, source, target)?;
            self.built.insert((source, target), p);
        }
        self.built[&(source, target)].dim_at(x)
    }
}
