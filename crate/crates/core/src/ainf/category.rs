use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Scalar, SparseVec};

/// Element of a hom space, as a combination of global basis ids.
pub type Element = SparseVec<usize>;

/// Read-only access to a finite A∞ category presented on a global basis.
///
/// Inputs to `mu` are in path order: `x_1: X_0 → X_1, ..., x_k: X_{k-1} → X_k`,
/// so `mu(&[a, b])` is the product "a then b" up to the sign convention.
pub trait AInfStructure {
    fn grading_modulus(&self) -> u32;
    fn object_count(&self) -> usize;
    fn object_label(&self, object: usize) -> String;
    fn basis_len(&self) -> usize;
    fn source(&self, b: usize) -> usize;
    fn target(&self, b: usize) -> usize;
    fn degree(&self, b: usize) -> i64;
    fn basis_label(&self, b: usize) -> String;
    /// Largest arity with a possibly nonzero operation.
    fn max_arity(&self) -> usize;
    /// `μ^k` on basis inputs; `None` when the value lies outside a truncated window.
    fn mu(&self, inputs: &[usize]) -> Option<Element>;
    fn unit(&self, object: usize) -> Option<Element>;

    /// True when some products are undefined (truncated models).
    fn is_partial(&self) -> bool {
        false
    }

    fn hom_basis(&self, source: usize, target: usize) -> Vec<usize> {
        (0..self.basis_len())
            .filter(|&b| self.source(b) == source && self.target(b) == target)
            .collect()
    }

    /// Basis elements starting at `source`, in id order.
    fn basis_from(&self, source: usize) -> Vec<usize> {
        (0..self.basis_len()).filter(|&b| self.source(b) == source).collect()
    }
}

/// Caches operations of arity ≤ 2 on basis tuples; exhaustive checks
/// evaluate the same low-arity products many times.
pub struct Memo<'a, C: AInfStructure + ?Sized> {
    inner: &'a C,
    cache: RefCell<HashMap<Vec<usize>, Option<Element>>>,
}

impl<'a, C: AInfStructure + ?Sized> Memo<'a, C> {
    pub fn new(inner: &'a C) -> Self {
        Memo {
            inner,
            cache: RefCell::new(HashMap::new()),
        }
    }
}

impl<C: AInfStructure + ?Sized> AInfStructure for Memo<'_, C> {
    fn grading_modulus(&self) -> u32 {
        self.inner.grading_modulus()
    }
    fn object_count(&self) -> usize {
        self.inner.object_count()
    }
    fn object_label(&self, object: usize) -> String {
        self.inner.object_label(object)
    }
    fn basis_len(&self) -> usize {
        self.inner.basis_len()
    }
    fn source(&self, b: usize) -> usize {
        self.inner.source(b)
    }
    fn target(&self, b: usize) -> usize {
        self.inner.target(b)
    }
    fn degree(&self, b: usize) -> i64 {
        self.inner.degree(b)
    }
    fn basis_label(&self, b: usize) -> String {
        self.inner.basis_label(b)
    }
    fn max_arity(&self) -> usize {
        self.inner.max_arity()
    }
    fn mu(&self, inputs: &[usize]) -> Option<Element> {
        if inputs.len() > 2 {
            return self.inner.mu(inputs);
        }
        if let Some(v) = self.cache.borrow().get(inputs) {
            return v.clone();
        }
        let v = self.inner.mu(inputs);
        self.cache.borrow_mut().insert(inputs.to_vec(), v.clone());
        v
    }
    fn unit(&self, object: usize) -> Option<Element> {
        self.inner.unit(object)
    }
    fn is_partial(&self) -> bool {
        self.inner.is_partial()
    }
    fn hom_basis(&self, source: usize, target: usize) -> Vec<usize> {
        self.inner.hom_basis(source, target)
    }
    fn basis_from(&self, source: usize) -> Vec<usize> {
        self.inner.basis_from(source)
    }
}

/// `μ^k` extended multilinearly to arbitrary elements.
pub fn mu_linear<C: AInfStructure + ?Sized>(c: &C, inputs: &[&Element]) -> Option<Element> {
    let k = inputs.len();
    if k == 0 || k > c.max_arity() || inputs.iter().any(|x| x.is_zero()) {
        return Some(Element::new());
    }
    let mut out = Element::new();
    let mut ids = Vec::with_capacity(k);
    fn rec<C: AInfStructure + ?Sized>(c: &C, inputs: &[&Element], ids: &mut Vec<usize>, coeff: Scalar, out: &mut Element) -> Option<()> {
        if ids.len() == inputs.len() {
            let v = c.mu(ids)?;
            out.add_scaled(&v, &coeff);
            return Some(());
        }
        let pos = ids.len();
        for (&b, x) in inputs[pos].iter() {
            if pos > 0 && c.target(ids[pos - 1]) != c.source(b) {
                continue;
            }
            ids.push(b);
            rec(c, inputs, ids, coeff.clone() * x.clone(), out)?;
            ids.pop();
        }
        Some(())
    }
    rec(c, inputs, &mut ids, Scalar::from_integer(1.into()), &mut out)?;
    Some(out)
}

/// Degree reduced into `0..N` (or left alone for integer gradings).
pub fn reduce_degree(modulus: u32, d: i64) -> i64 {
    if modulus == 0 {
        d
    } else {
        d.rem_euclid(modulus as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
}

/// Explicit finite A∞ category: `μ^k` tables on basis tuples, strict units.
#[derive(Clone, Debug, PartialEq)]
pub struct AInfCategory {
    grading_modulus: u32,
    objects: Vec<String>,
    basis: Vec<BasisElement>,
    mu: BTreeMap<Vec<usize>, Element>,
    k_max: usize,
    units: Vec<Option<Element>>,
    by_source: Vec<Vec<usize>>,
}

impl AInfCategory {
    /// Checks composability, degrees (`|μ^k| = 2 - k`) and hom-space membership
    /// of every table entry. The A∞ relations themselves are left to
    /// [`check_ainf`](super::check_ainf).
    pub fn new(
        grading_modulus: u32,
        objects: Vec<String>,
        mut basis: Vec<BasisElement>,
        mu: BTreeMap<Vec<usize>, Element>,
        k_max: usize,
        units: Vec<Option<Element>>,
    ) -> Result<Self> {
        let mut errors = Vec::new();
        let n = objects.len();
        if units.len() != n {
            errors.push(format!("{} units for {} objects", units.len(), n));
        }
        for b in basis.iter_mut() {
            if b.source >= n || b.target >= n {
                errors.push(format!("basis element {} references a missing object", b.name));
            }
            b.degree = reduce_degree(grading_modulus, b.degree);
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let deg = |d: i64| reduce_degree(grading_modulus, d);
        for (inputs, out) in &mu {
            let label = || {
                inputs
                    .iter()
                    .map(|&i| basis.get(i).map_or("?", |b| b.name.as_str()))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            if inputs.is_empty() || inputs.len() > k_max {
                errors.push(format!("μ entry of arity {} outside 1..={k_max}", inputs.len()));
                continue;
            }
            if inputs.iter().chain(out.keys()).any(|&i| i >= basis.len()) {
                errors.push(format!("μ entry ({}) references a missing basis element", label()));
                continue;
            }
            if inputs.windows(2).any(|w| basis[w[0]].target != basis[w[1]].source) {
                errors.push(format!("μ entry ({}) is not composable", label()));
                continue;
            }
            let (s, t) = (basis[inputs[0]].source, basis[*inputs.last().unwrap()].target);
            let expected = deg(inputs.iter().map(|&i| basis[i].degree).sum::<i64>() + 2 - inputs.len() as i64);
            for &o in out.keys() {
                if basis[o].source != s || basis[o].target != t {
                    errors.push(format!("μ({}) has a term outside its hom space", label()));
                } else if basis[o].degree != expected {
                    errors.push(format!(
                        "μ({}) has a term of degree {} instead of {expected}",
                        label(),
                        basis[o].degree
                    ));
                }
            }
        }
        for (o, u) in units.iter().enumerate() {
            if let Some(u) = u {
                if u.keys()
                    .any(|&k| k >= basis.len() || basis[k].source != o || basis[k].target != o || basis[k].degree != 0)
                {
                    errors.push(format!("unit of {} is not a degree-0 endomorphism", objects[o]));
                }
            }
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let mut by_source = vec![Vec::new(); n];
        for (i, b) in basis.iter().enumerate() {
            by_source[b.source].push(i);
        }
        let mu = mu.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(AInfCategory {
            grading_modulus,
            objects,
            basis,
            mu,
            k_max,
            units,
            by_source,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn table(&self) -> &BTreeMap<Vec<usize>, Element> {
        &self.mu
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| Error::validation(format!("unknown object {name:?}")))
    }

    pub fn basis_index(&self, name: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| Error::validation(format!("unknown basis element {name:?}")))
    }

    /// Copy with one table entry replaced (used to build perturbed instances).
    pub fn with_entry(&self, inputs: Vec<usize>, value: Element) -> Result<Self> {
        let mut mu = self.mu.clone();
        mu.insert(inputs, value);
        AInfCategory::new(
            self.grading_modulus,
            self.objects.clone(),
            self.basis.clone(),
            mu,
            self.k_max,
            self.units.clone(),
        )
    }

    pub fn to_file(&self, levels: Option<&[Scalar]>) -> AInfFile {
        let mut blocks: BTreeMap<(usize, usize), Vec<BasisEntry>> = BTreeMap::new();
        for (i, b) in self.basis.iter().enumerate() {
            blocks.entry((b.source, b.target)).or_default().push(BasisEntry {
                id: b.name.clone(),
                degree: b.degree,
                level: levels.map(|l| l[i].clone()),
            });
        }
        let terms = |v: &Element| {
            v.iter()
                .map(|(&k, c)| OutTerm {
                    coeff: c.clone(),
                    id: self.basis[k].name.clone(),
                })
                .collect()
        };
        AInfFile {
            grading_modulus: self.grading_modulus,
            objects: self.objects.clone(),
            k_max: Some(self.k_max),
            basis: blocks
                .into_iter()
                .map(|((s, t), elements)| HomBlock {
                    source: self.objects[s].clone(),
                    target: self.objects[t].clone(),
                    elements,
                })
                .collect(),
            mu: self
                .mu
                .iter()
                .map(|(inputs, out)| MuEntry {
                    arity: inputs.len(),
                    inputs: inputs.iter().map(|&i| self.basis[i].name.clone()).collect(),
                    output: terms(out),
                })
                .collect(),
            units: self
                .units
                .iter()
                .enumerate()
                .filter_map(|(o, u)| u.as_ref().map(|u| (self.objects[o].clone(), terms(u))))
                .collect(),
        }
    }
}

impl AInfStructure for AInfCategory {
    fn grading_modulus(&self) -> u32 {
        self.grading_modulus
    }

    fn object_count(&self) -> usize {
        self.objects.len()
    }

    fn object_label(&self, object: usize) -> String {
        self.objects[object].clone()
    }

    fn basis_len(&self) -> usize {
        self.basis.len()
    }

    fn source(&self, b: usize) -> usize {
        self.basis[b].source
    }

    fn target(&self, b: usize) -> usize {
        self.basis[b].target
    }

    fn degree(&self, b: usize) -> i64 {
        self.basis[b].degree
    }

    fn basis_label(&self, b: usize) -> String {
        self.basis[b].name.clone()
    }

    fn max_arity(&self) -> usize {
        self.k_max
    }

    fn mu(&self, inputs: &[usize]) -> Option<Element> {
        Some(self.mu.get(inputs).cloned().unwrap_or_default())
    }

    fn unit(&self, object: usize) -> Option<Element> {
        self.units[object].clone()
    }

    fn basis_from(&self, source: usize) -> Vec<usize> {
        self.by_source[source].clone()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub id: String,
    pub degree: i64,
    #[serde(default, with = "crate::serde_scalar::option", skip_serializing_if = "Option::is_none")]
    pub level: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomBlock {
    pub source: String,
    pub target: String,
    pub elements: Vec<BasisEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutTerm {
    #[serde(with = "crate::serde_scalar")]
    pub coeff: Scalar,
    pub id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuEntry {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub output: Vec<OutTerm>,
}

/// On-disk form of an A∞ category, optionally carrying filtration levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AInfFile {
    pub grading_modulus: u32,
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    pub basis: Vec<HomBlock>,
    #[serde(default)]
    pub mu: Vec<MuEntry>,
    #[serde(default)]
    pub units: BTreeMap<String, Vec<OutTerm>>,
}

impl AInfFile {
    /// Builds the category and, when every basis element carries a level, the
    /// level vector. Partially specified levels are rejected.
    pub fn build(&self) -> Result<(AInfCategory, Option<Vec<Scalar>>)> {
        let mut errors = Vec::new();
        let obj: BTreeMap<&str, usize> = self.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        if obj.len() != self.objects.len() {
            errors.push("object names are not unique".to_string());
        }
        let mut basis = Vec::new();
        let mut levels = Vec::new();
        let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
        let mut seen_blocks = BTreeSet::new();
        for block in &self.basis {
            let (Some(&s), Some(&t)) = (obj.get(block.source.as_str()), obj.get(block.target.as_str())) else {
                errors.push(format!(
                    "hom block {} → {} references an unknown object",
                    block.source, block.target
                ));
                continue;
            };
            if !seen_blocks.insert((s, t)) {
                errors.push(format!("hom block {} → {} listed twice", block.source, block.target));
            }
            for e in &block.elements {
                if ids.insert(e.id.as_str(), basis.len()).is_some() {
                    errors.push(format!("basis id {:?} is not unique", e.id));
                }
                basis.push(BasisElement {
                    name: e.id.clone(),
                    source: s,
                    target: t,
                    degree: e.degree,
                });
                levels.push(e.level.clone());
            }
        }
        let lookup = |id: &str, errors: &mut Vec<String>| -> Option<usize> {
            let r = ids.get(id).copied();
            if r.is_none() {
                errors.push(format!("unknown basis id {id:?}"));
            }
            r
        };
        let mut mu = BTreeMap::new();
        let mut k_max = 0;
        for (i, entry) in self.mu.iter().enumerate() {
            if entry.arity != entry.inputs.len() {
                errors.push(format!(
                    "μ entry {i} declares arity {} but lists {} inputs",
                    entry.arity,
                    entry.inputs.len()
                ));
                continue;
            }
            let inputs: Option<Vec<usize>> = entry.inputs.iter().map(|id| lookup(id, &mut errors)).collect();
            let mut out = Element::new();
            for term in &entry.output {
                if let Some(k) = lookup(&term.id, &mut errors) {
                    out.add_term(k, term.coeff.clone());
                }
            }
            if let Some(inputs) = inputs {
                k_max = k_max.max(inputs.len());
                if mu.insert(inputs, out).is_some() {
                    errors.push(format!("μ entry {i} duplicates an earlier entry"));
                }
            }
        }
        if let Some(declared) = self.k_max {
            if declared < k_max {
                errors.push(format!("k_max = {declared} but an operation of arity {k_max} is given"));
            }
            k_max = declared;
        }
        let mut units = vec![None; self.objects.len()];
        for (name, terms) in &self.units {
            let Some(&o) = obj.get(name.as_str()) else {
                errors.push(format!("unit for unknown object {name:?}"));
                continue;
            };
            let mut u = Element::new();
            for term in terms {
                if let Some(k) = lookup(&term.id, &mut errors) {
                    u.add_term(k, term.coeff.clone());
                }
            }
            units[o] = Some(u);
        }
        let given = levels.iter().filter(|l| l.is_some()).count();
        if given != 0 && given != levels.len() {
            errors.push(format!("levels given for {given} of {} basis elements", levels.len()));
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let cat = AInfCategory::new(self.grading_modulus, self.objects.clone(), basis, mu, k_max.max(1), units)?;
        let levels = (given > 0).then(|| levels.into_iter().map(Option::unwrap).collect());
        Ok((cat, levels))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    fn point() -> AInfCategory {
        let basis = vec![BasisElement {
            name: "e".into(),
            source: 0,
            target: 0,
            degree: 0,
        }];
        let mu = BTreeMap::from([(vec![0, 0], Element::unit(0))]);
        AInfCategory::new(0, vec!["K".into()], basis, mu, 2, vec![Some(Element::unit(0))]).unwrap()
    }

    #[test]
    fn rejects_wrong_degree() {
        let basis = vec![
            BasisElement {
                name: "e".into(),
                source: 0,
                target: 0,
                degree: 0,
            },
            BasisElement {
                name: "a".into(),
                source: 0,
                target: 0,
                degree: 1,
            },
        ];
        let mu = BTreeMap::from([(vec![1], Element::unit(0))]);
        let err = AInfCategory::new(0, vec!["K".into()], basis, mu, 2, vec![None]).unwrap_err();
        assert!(matches!(err, Error::Validation(v) if v[0].contains("degree")));
    }

    #[test]
    fn file_round_trip() {
        let c = point();
        let file = c.to_file(Some(&[int(0)]));
        let text = serde_json::to_string(&file).unwrap();
        let back: AInfFile = serde_json::from_str(&text).unwrap();
        let (c2, levels) = back.build().unwrap();
        assert_eq!(c, c2);
        assert_eq!(levels, Some(vec![int(0)]));
    }

    #[test]
    fn multilinear_extension() {
        let c = point();
        let two = Element::from_pairs([(0, int(2))]);
        assert_eq!(mu_linear(&c, &[&two, &two]).unwrap(), Element::from_pairs([(0, int(4))]));
    }
}
