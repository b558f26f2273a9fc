use std::cell::Cell;
use std::collections::BTreeMap;

use super::category::{mu_linear, reduce_degree, AInfStructure, Element};
use super::check::degree_sign;
use crate::error::{Error, Result};
use crate::exactlin::{left_kernel, EchelonBasis, Expresser, SparseMatrix, SparseVec};
use crate::fpcat::{BasisMorphism, Composer, LinCat, Morphism};

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyClass {
    pub source: usize,
    pub target: usize,
    pub degree: i64,
    /// Echelon-normalized cocycle representing the class.
    pub representative: Element,
}

#[derive(Clone, Debug)]
enum Block {
    /// μ¹ vanishes: classes are the basis vectors themselves.
    Free { ids: BTreeMap<usize, usize> },
    General {
        first_class: usize,
        boundaries: usize,
        expresser: Expresser<usize>,
    },
}

/// `H(C, μ¹)` with chosen representatives and the composition induced by μ².
///
/// Products are `[a]·[b] = (-1)^{|a|} [μ²(a, b)]`, the diagrammatic composition
/// matching the strict-unit convention.
pub struct Cohomology<'a, C: AInfStructure + ?Sized> {
    c: &'a C,
    classes: Vec<CohomologyClass>,
    blocks: BTreeMap<(usize, usize, i64), Block>,
    overflow: Cell<bool>,
}

impl<'a, C: AInfStructure + ?Sized> Cohomology<'a, C> {
    pub fn new(c: &'a C) -> Result<Self> {
        let mut groups: BTreeMap<(usize, usize, i64), Vec<usize>> = BTreeMap::new();
        for b in 0..c.basis_len() {
            groups.entry((c.source(b), c.target(b), c.degree(b))).or_default().push(b);
        }
        let mut classes = Vec::new();
        let mut blocks = BTreeMap::new();
        for (&(s, t, deg), ids) in &groups {
            let images: Vec<Element> = ids
                .iter()
                .map(|&b| {
                    c.mu(&[b])
                        .ok_or_else(|| Error::Precondition(format!("μ¹ undefined on {}", c.basis_label(b))))
                })
                .collect::<Result<_>>()?;
            let first_class = classes.len();
            // Local coordinates: position in `ids`.
            let local: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
            // Boundaries landing in this block come from the block one degree lower.
            let lower = groups
                .get(&(s, t, reduce_degree(c.grading_modulus(), deg - 1)))
                .cloned()
                .unwrap_or_default();
            let mut boundary = EchelonBasis::new();
            for &b in &lower {
                if let Some(v) = c.mu(&[b]) {
                    boundary.insert(&v.map_keys(|k| local.get(k).copied().unwrap_or(usize::MAX)));
                }
            }
            if boundary.rank() == 0 && images.iter().all(|v| v.is_zero()) {
                let mut map = BTreeMap::new();
                for &b in ids {
                    map.insert(b, classes.len());
                    classes.push(CohomologyClass {
                        source: s,
                        target: t,
                        degree: deg,
                        representative: Element::unit(b),
                    });
                }
                blocks.insert((s, t, deg), Block::Free { ids: map });
                continue;
            }
            let cocycles = left_kernel(&SparseMatrix::from_rows(c.basis_len(), images)?);
            let boundary_rows: Vec<SparseVec<usize>> = boundary.sorted_rows().into_iter().cloned().collect();
            let mut span = boundary.clone();
            let mut reps: Vec<SparseVec<usize>> = Vec::new();
            for z in cocycles.rows() {
                if span.insert(z) {
                    reps.push(span.rows().last().unwrap().clone());
                }
            }
            let generators: Vec<SparseVec<usize>> = boundary_rows.iter().chain(&reps).cloned().collect();
            for r in &reps {
                classes.push(CohomologyClass {
                    source: s,
                    target: t,
                    degree: deg,
                    representative: r.map_keys(|&i| ids[i]),
                });
            }
            blocks.insert(
                (s, t, deg),
                Block::General {
                    first_class,
                    boundaries: boundary_rows.len(),
                    expresser: Expresser::new(generators.iter()),
                },
            );
        }
        Ok(Cohomology {
            c,
            classes,
            blocks,
            overflow: Cell::new(false),
        })
    }

    pub fn classes(&self) -> &[CohomologyClass] {
        &self.classes
    }

    pub fn dim(&self, source: usize, target: usize) -> usize {
        self.classes.iter().filter(|k| k.source == source && k.target == target).count()
    }

    /// True once some product fell outside a truncated window.
    pub fn overflowed(&self) -> bool {
        self.overflow.get()
    }

    /// Class of a cocycle, as a combination of class ids.
    pub fn class_of(&self, v: &Element) -> Result<SparseVec<usize>> {
        let mut parts: BTreeMap<(usize, usize, i64), Element> = BTreeMap::new();
        for (&k, x) in v.iter() {
            parts
                .entry((self.c.source(k), self.c.target(k), self.c.degree(k)))
                .or_default()
                .add_term(k, x.clone());
        }
        let mut out = SparseVec::new();
        for (key, part) in parts {
            let not_closed = || Error::Precondition("element is not a cocycle".into());
            match &self.blocks[&key] {
                Block::Free { ids, .. } => {
                    for (k, x) in part.iter() {
                        out.add_term(ids[k], x.clone());
                    }
                }
                Block::General {
                    first_class,
                    boundaries,
                    expresser,
                    ..
                } => {
                    let ids = self.block_ids(key);
                    let local: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
                    let coeffs = expresser.express(&part.map_keys(|k| local[k])).ok_or_else(not_closed)?;
                    for (&g, x) in coeffs.iter() {
                        if g >= *boundaries {
                            out.add_term(first_class + g - boundaries, x.clone());
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn block_ids(&self, (s, t, deg): (usize, usize, i64)) -> Vec<usize> {
        self.c.hom_basis(s, t).into_iter().filter(|&b| self.c.degree(b) == deg).collect()
    }

    /// A cocycle representing a combination of classes.
    pub fn lift(&self, v: &SparseVec<usize>) -> Element {
        let mut out = Element::new();
        for (&k, x) in v.iter() {
            out.add_scaled(&self.classes[k].representative, x);
        }
        out
    }

    fn product(&self, a: usize, b: usize) -> Result<SparseVec<usize>> {
        let (ra, rb) = (&self.classes[a].representative, &self.classes[b].representative);
        let Some(p) = mu_linear(self.c, &[ra, rb]) else {
            self.overflow.set(true);
            return Ok(SparseVec::new());
        };
        let s = match ra.keys().next() {
            Some(&k) => degree_sign(self.c, k)?,
            None => return Ok(SparseVec::new()),
        };
        self.class_of(&p.scaled(&s))
    }

    /// Explicit table for every composable pair of classes.
    pub fn to_lincat(&self) -> Result<LinCat> {
        let basis: Vec<BasisMorphism> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, k)| BasisMorphism {
                name: format!("h{i}"),
                source: k.source,
                target: k.target,
                degree: k.degree,
            })
            .collect();
        let mut table = BTreeMap::new();
        for a in 0..self.classes.len() {
            for b in 0..self.classes.len() {
                if self.classes[a].target == self.classes[b].source {
                    let v = self.product(a, b)?;
                    if !v.is_zero() {
                        table.insert((a, b), v);
                    }
                }
            }
        }
        let units = (0..self.c.object_count())
            .map(|o| self.c.unit(o).map(|u| self.class_of(&u)).transpose())
            .collect::<Result<Vec<Option<Morphism>>>>()?;
        let objects = (0..self.c.object_count()).map(|o| self.c.object_label(o)).collect();
        LinCat::new(self.c.grading_modulus(), objects, basis, table, units)
    }
}

impl<C: AInfStructure + ?Sized> Composer for Cohomology<'_, C> {
    type Key = usize;

    fn compose(&self, a: &SparseVec<usize>, b: &SparseVec<usize>) -> SparseVec<usize> {
        let mut out = SparseVec::new();
        for (&i, x) in a.iter() {
            for (&j, y) in b.iter() {
                if self.classes[i].target != self.classes[j].source {
                    continue;
                }
                match self.product(i, j) {
                    Ok(v) => out.add_scaled(&v, &(x.clone() * y.clone())),
                    Err(_) => self.overflow.set(true),
                }
            }
        }
        out
    }

    fn normal_form(&self, v: &SparseVec<usize>) -> SparseVec<usize> {
        v.clone()
    }

    fn block(&self, key: &usize) -> (u32, u32) {
        let k = &self.classes[*key];
        (k.source as u32, k.target as u32)
    }
}

/// The cohomology category as an explicit linear category, with associativity
/// and unitality verified.
pub fn cohomology_category<C: AInfStructure + ?Sized>(c: &C) -> Result<LinCat> {
    let h = Cohomology::new(c)?;
    let cat = h.to_lincat()?;
    cat.check_associative()?;
    if cat.is_unital() {
        cat.check_unital()?;
    }
    Ok(cat)
}
