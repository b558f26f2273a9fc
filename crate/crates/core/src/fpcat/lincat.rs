use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::growth::{span_growth, Composer, GrowthTable, SpanLayers};
use crate::error::{Error, Result};
use crate::exactlin::{sign, Scalar, SparseVec};

/// Vector in an explicit linear category, indexed by global basis ids.
pub type Morphism = SparseVec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisMorphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: i64,
}

/// A finite linear category given by explicit bases and a composition table.
/// Composition is diagrammatic: `compose(a, b)` is "a then b".
#[derive(Clone, Debug, PartialEq)]
pub struct LinCat {
    grading_modulus: u32,
    objects: Vec<String>,
    basis: Vec<BasisMorphism>,
    table: BTreeMap<(usize, usize), Morphism>,
    units: Vec<Option<Morphism>>,
}

/// Parity of a degree, when it is well defined for the grading.
pub(crate) fn parity(modulus: u32, degree: i64) -> Result<i64> {
    match modulus {
        0 => Ok(degree.rem_euclid(2)),
        1 => Ok(0),
        m if m % 2 == 0 => Ok(degree.rem_euclid(2)),
        m => Err(Error::Unsupported(format!("signs are undefined for an odd grading modulus {m}"))),
    }
}

impl LinCat {
    /// Validates that every table entry is composable and lands in the right
    /// hom space, and that units live in endomorphism spaces.
    pub fn new(
        grading_modulus: u32,
        objects: Vec<String>,
        basis: Vec<BasisMorphism>,
        table: BTreeMap<(usize, usize), Morphism>,
        units: Vec<Option<Morphism>>,
    ) -> Result<Self> {
        let mut errors = Vec::new();
        if units.len() != objects.len() {
            errors.push(format!("{} units for {} objects", units.len(), objects.len()));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.source >= objects.len() || b.target >= objects.len() {
                errors.push(format!("basis element {i} ({}) references a missing object", b.name));
            }
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        for (&(a, b), v) in &table {
            if a >= basis.len() || b >= basis.len() {
                errors.push(format!("composition ({a},{b}) references a missing basis element"));
                continue;
            }
            if basis[a].target != basis[b].source {
                errors.push(format!("composition of {} then {} is not composable", basis[a].name, basis[b].name));
            }
            for &k in v.keys() {
                if k >= basis.len() || basis[k].source != basis[a].source || basis[k].target != basis[b].target {
                    errors.push(format!(
                        "composition of {} then {} leaves its hom space",
                        basis[a].name, basis[b].name
                    ));
                }
            }
        }
        for (o, u) in units.iter().enumerate() {
            if let Some(u) = u {
                if u.keys().any(|&k| k >= basis.len() || basis[k].source != o || basis[k].target != o) {
                    errors.push(format!("unit of {} is not an endomorphism of it", objects[o]));
                }
            }
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        Ok(LinCat {
            grading_modulus,
            objects,
            basis,
            table,
            units,
        })
    }

    /// The category with one object and `hom = k`.
    pub fn ground_field() -> Self {
        Self::matrix_category(&[1])
    }

    /// The full subcategory of finite-dimensional vector spaces on `k^{d}` for
    /// the given dimensions. Morphisms are matrices acting on row vectors, so
    /// diagrammatic composition is the matrix product; the basis consists of
    /// the matrix units `E[i][j]`.
    pub fn matrix_category(dims: &[usize]) -> Self {
        let objects: Vec<String> = dims.iter().enumerate().map(|(i, d)| format!("V{i}(k^{d})")).collect();
        let mut basis = Vec::new();
        let mut index = BTreeMap::new();
        for (s, &ds) in dims.iter().enumerate() {
            for (t, &dt) in dims.iter().enumerate() {
                for i in 0..ds {
                    for j in 0..dt {
                        index.insert((s, t, i, j), basis.len());
                        basis.push(BasisMorphism {
                            name: format!("E{s}{t}[{i}][{j}]"),
                            source: s,
                            target: t,
                            degree: 0,
                        });
                    }
                }
            }
        }
        let mut table = BTreeMap::new();
        for (&(s, t, i, j), &a) in &index {
            for u in 0..dims.len() {
                for l in 0..dims[u] {
                    let b = index[&(t, u, j, l)];
                    table.insert((a, b), Morphism::unit(index[&(s, u, i, l)]));
                }
            }
        }
        let units = (0..dims.len())
            .map(|s| {
                Some(
                    (0..dims[s])
                        .map(|i| (index[&(s, s, i, i)], Scalar::from_integer(1.into())))
                        .collect(),
                )
            })
            .collect();
        LinCat::new(0, objects, basis, table, units).expect("matrix categories are well formed")
    }

    pub fn grading_modulus(&self) -> u32 {
        self.grading_modulus
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| Error::validation(format!("unknown object {name:?}")))
    }

    pub fn basis(&self) -> &[BasisMorphism] {
        &self.basis
    }

    pub fn unit(&self, object: usize) -> Option<&Morphism> {
        self.units[object].as_ref()
    }

    pub fn table(&self) -> &BTreeMap<(usize, usize), Morphism> {
        &self.table
    }

    pub fn hom_basis(&self, source: usize, target: usize) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.basis[i].source == source && self.basis[i].target == target)
            .collect()
    }

    pub fn hom_dim(&self, source: usize, target: usize) -> usize {
        self.hom_basis(source, target).len()
    }

    /// The single hom space containing `v`, if any.
    pub fn block_of(&self, v: &Morphism) -> Option<(usize, usize)> {
        let mut it = v.keys().map(|&k| (self.basis[k].source, self.basis[k].target));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn compose(&self, a: &Morphism, b: &Morphism) -> Morphism {
        let mut out = Morphism::new();
        for (&i, x) in a.iter() {
            for (&j, y) in b.iter() {
                if let Some(v) = self.table.get(&(i, j)) {
                    out.add_scaled(v, &(x.clone() * y.clone()));
                }
            }
        }
        out
    }

    pub fn is_unital(&self) -> bool {
        self.units.iter().all(|u| u.is_some())
    }

    /// Exact check of `(ab)c = a(bc)` on all composable basis triples.
    pub fn check_associative(&self) -> Result<()> {
        for a in 0..self.basis.len() {
            for b in self.hom_starting_at(self.basis[a].target) {
                for c in self.hom_starting_at(self.basis[b].target) {
                    let (ua, ub, uc) = (Morphism::unit(a), Morphism::unit(b), Morphism::unit(c));
                    let left = self.compose(&self.compose(&ua, &ub), &uc);
                    let right = self.compose(&ua, &self.compose(&ub, &uc));
                    if left != right {
                        return Err(Error::InvariantViolation(format!(
                            "composition is not associative on ({}, {}, {})",
                            self.basis[a].name, self.basis[b].name, self.basis[c].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact check that the declared units are two-sided identities.
    pub fn check_unital(&self) -> Result<()> {
        for (o, u) in self.units.iter().enumerate() {
            let u = u
                .as_ref()
                .ok_or_else(|| Error::Precondition(format!("object {} has no unit", self.objects[o])))?;
            for (i, b) in self.basis.iter().enumerate() {
                let x = Morphism::unit(i);
                if b.source == o && self.compose(u, &x) != x {
                    return Err(Error::InvariantViolation(format!(
                        "unit of {} fails on the left of {}",
                        self.objects[o], b.name
                    )));
                }
                if b.target == o && self.compose(&x, u) != x {
                    return Err(Error::InvariantViolation(format!(
                        "unit of {} fails on the right of {}",
                        self.objects[o], b.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn hom_starting_at(&self, source: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.basis.len()).filter(move |&i| self.basis[i].source == source)
    }

    /// `C ⊗ D`: objects are pairs, bases are pairs of basis vectors, and
    /// `(a⊗b)(a'⊗b') = (-1)^{|b||a'|} (aa')⊗(bb')`.
    pub fn tensor(&self, other: &LinCat) -> Result<LinCat> {
        if !self.is_unital() || !other.is_unital() {
            return Err(Error::Precondition("tensor product needs unital inputs".into()));
        }
        if self.grading_modulus != other.grading_modulus {
            return Err(Error::validation("tensor factors use different grading moduli"));
        }
        let modulus = self.grading_modulus;
        for b in self.basis.iter().chain(&other.basis) {
            parity(modulus, b.degree)?;
        }
        let no = other.objects.len();
        let nb = other.basis.len();
        let objects = self
            .objects
            .iter()
            .flat_map(|k| other.objects.iter().map(move |l| format!("({k},{l})")))
            .collect();
        let pair = |i: usize, j: usize| i * nb + j;
        let mut basis = Vec::with_capacity(self.basis.len() * nb);
        for a in &self.basis {
            for b in &other.basis {
                let mut degree = a.degree + b.degree;
                if modulus > 0 {
                    degree = degree.rem_euclid(modulus as i64);
                }
                basis.push(BasisMorphism {
                    name: format!("{}⊗{}", a.name, b.name),
                    source: a.source * no + b.source,
                    target: a.target * no + b.target,
                    degree,
                });
            }
        }
        let mut table = BTreeMap::new();
        for (&(a, a2), ca) in &self.table {
            for (&(b, b2), cb) in &other.table {
                let s = sign(parity(modulus, other.basis[b].degree)? * parity(modulus, self.basis[a2].degree)?);
                let mut v = Morphism::new();
                for (&x, p) in ca.iter() {
                    for (&y, q) in cb.iter() {
                        v.add_term(pair(x, y), p.clone() * q.clone() * s.clone());
                    }
                }
                if !v.is_zero() {
                    table.insert((pair(a, b), pair(a2, b2)), v);
                }
            }
        }
        let mut units = Vec::new();
        for u in &self.units {
            for w in &other.units {
                let (u, w) = (u.as_ref().unwrap(), w.as_ref().unwrap());
                let mut v = Morphism::new();
                for (&x, p) in u.iter() {
                    for (&y, q) in w.iter() {
                        v.add_term(pair(x, y), p.clone() * q.clone());
                    }
                }
                units.push(Some(v));
            }
        }
        LinCat::new(modulus, objects, basis, table, units)
    }

    /// `x ⊗ e_{L'}` inside `self ⊗ other`, for `x` in `self`.
    pub fn tensor_left(&self, other: &LinCat, x: &Morphism, object: usize) -> Result<Morphism> {
        let e = other.unit(object).ok_or_else(|| Error::Precondition("missing unit".into()))?;
        let nb = other.basis.len();
        let mut v = Morphism::new();
        for (&i, p) in x.iter() {
            for (&j, q) in e.iter() {
                v.add_term(i * nb + j, p.clone() * q.clone());
            }
        }
        Ok(v)
    }

    /// Restriction to a subset of objects, with the old-to-new basis map.
    pub fn full_subcategory(&self, keep: &[usize]) -> Result<(LinCat, BTreeMap<usize, usize>)> {
        let obj_map: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let mut basis_map = BTreeMap::new();
        let mut basis = Vec::new();
        for (i, b) in self.basis.iter().enumerate() {
            if let (Some(&s), Some(&t)) = (obj_map.get(&b.source), obj_map.get(&b.target)) {
                basis_map.insert(i, basis.len());
                basis.push(BasisMorphism {
                    source: s,
                    target: t,
                    ..b.clone()
                });
            }
        }
        let remap = |v: &Morphism| v.map_keys(|k| basis_map[k]);
        let table = self
            .table
            .iter()
            .filter_map(|(&(a, b), v)| Some(((*basis_map.get(&a)?, *basis_map.get(&b)?), remap(v))))
            .collect();
        let units = keep.iter().map(|&o| self.units[o].as_ref().map(remap)).collect();
        let objects = keep.iter().map(|&o| self.objects[o].clone()).collect();
        Ok((LinCat::new(self.grading_modulus, objects, basis, table, units)?, basis_map))
    }

    pub fn span_layers(&self, sigma: &[Morphism], n_max: usize) -> Result<SpanLayers> {
        for (i, s) in sigma.iter().enumerate() {
            if s.keys().any(|&k| k >= self.basis.len()) {
                return Err(Error::validation(format!("Σ element {i} references a missing basis element")));
            }
        }
        span_growth(self, sigma, n_max)
    }

    pub fn word_growth(&self, sigma: &[Morphism], n_max: usize) -> Result<GrowthTable> {
        let layers = self.span_layers(sigma, n_max)?;
        let mut t = GrowthTable::from_dims(layers.totals(), sigma.len());
        t.warnings = layers.zero_elements.iter().map(|i| format!("Σ element {i} is zero")).collect();
        Ok(t)
    }

    pub fn word_growth_at_object(&self, sigma: &[Morphism], object: usize, n_max: usize) -> Result<GrowthTable> {
        if object >= self.objects.len() {
            return Err(Error::validation(format!("no object with index {object}")));
        }
        let layers = self.span_layers(sigma, n_max)?;
        let mut t = GrowthTable::from_dims(layers.at_object(object as u32), sigma.len());
        t.object = Some(self.objects[object].clone());
        Ok(t)
    }

    pub fn identities(&self) -> BTreeMap<u32, Morphism> {
        self.units
            .iter()
            .enumerate()
            .filter_map(|(o, u)| u.clone().map(|u| (o as u32, u)))
            .collect()
    }
}

impl Composer for LinCat {
    type Key = usize;

    fn compose(&self, a: &Morphism, b: &Morphism) -> Morphism {
        LinCat::compose(self, a, b)
    }

    fn normal_form(&self, v: &Morphism) -> Morphism {
        v.clone()
    }

    fn block(&self, key: &usize) -> (u32, u32) {
        let b = &self.basis[*key];
        (b.source as u32, b.target as u32)
    }
}

/// Retraction data for one object: `r: K → L`, `k: L → K` with `r·k = e_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Retract {
    pub object: usize,
    pub via: usize,
    pub r: Morphism,
    pub k: Morphism,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetractReport {
    pub transported: Vec<Morphism>,
    pub original: GrowthTable,
    pub transported_table: GrowthTable,
    pub equal: bool,
}

/// Transports Σ along retractions, `φ(y) = k_src · y · r_tgt`, and compares
/// the two growth tables.
///
/// Each object touched by Σ needs retraction data, and distinct objects must
/// retract through distinct objects; otherwise transported words can compose
/// where the originals do not.
pub fn retract_transport(cat: &LinCat, sigma: &[Morphism], retracts: &[Retract], n_max: usize) -> Result<RetractReport> {
    let mut by_object: BTreeMap<usize, &Retract> = BTreeMap::new();
    let mut via_used: BTreeMap<usize, usize> = BTreeMap::new();
    for r in retracts {
        let e = cat
            .unit(r.object)
            .ok_or_else(|| Error::Precondition(format!("object {} has no unit", cat.objects[r.object])))?;
        if cat.block_of(&r.r).is_some_and(|b| b != (r.object, r.via)) || cat.block_of(&r.k).is_some_and(|b| b != (r.via, r.object)) {
            return Err(Error::Precondition(format!(
                "retraction maps for {} have the wrong ends",
                cat.objects[r.object]
            )));
        }
        if &cat.compose(&r.r, &r.k) != e {
            return Err(Error::Precondition(format!("r·k is not the identity of {}", cat.objects[r.object])));
        }
        if by_object.insert(r.object, r).is_some() {
            return Err(Error::Precondition(format!("two retractions given for {}", cat.objects[r.object])));
        }
        if let Some(prev) = via_used.insert(r.via, r.object) {
            return Err(Error::Precondition(format!(
                "{} and {} retract through the same object",
                cat.objects[prev], cat.objects[r.object]
            )));
        }
    }
    let mut transported = Vec::with_capacity(sigma.len());
    for (i, y) in sigma.iter().enumerate() {
        let Some((s, t)) = cat.block_of(y) else {
            if y.is_zero() {
                transported.push(Morphism::new());
                continue;
            }
            return Err(Error::validation(format!("Σ element {i} spans several hom spaces")));
        };
        let (rs, rt) = match (by_object.get(&s), by_object.get(&t)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Precondition(format!(
                    "Σ element {i} touches an object without retraction data"
                )))
            }
        };
        transported.push(cat.compose(&cat.compose(&rs.k, y), &rt.r));
    }
    let original = cat.word_growth(sigma, n_max)?;
    let transported_table = cat.word_growth(&transported, n_max)?;
    let equal = original.dims == transported_table.dims;
    Ok(RetractReport {
        transported,
        original,
        transported_table,
        equal,
    })
}

/// True when some coefficient of `v` is nonzero.
pub fn is_nonzero(v: &Morphism) -> bool {
    v.iter().any(|(_, c)| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    #[test]
    fn matrix_category_is_a_category() {
        let c = LinCat::matrix_category(&[1, 2]);
        assert_eq!(c.hom_dim(0, 1), 2);
        assert_eq!(c.hom_dim(1, 1), 4);
        c.check_associative().unwrap();
        c.check_unital().unwrap();
    }

    #[test]
    fn tensor_with_ground_field_keeps_dimensions() {
        let c = LinCat::matrix_category(&[2, 1]);
        let k = LinCat::ground_field();
        let t = c.tensor(&k).unwrap();
        for s in 0..2 {
            for u in 0..2 {
                assert_eq!(t.hom_dim(s, u), c.hom_dim(s, u));
            }
        }
        t.check_associative().unwrap();
        t.check_unital().unwrap();
    }

    #[test]
    fn tensor_dimensions_multiply() {
        // hom dims 2 (k^1 → k^2) and 3 (k^1 → k^3)
        let c = LinCat::matrix_category(&[1, 2]);
        let d = LinCat::matrix_category(&[1, 3]);
        let t = c.tensor(&d).unwrap();
        assert_eq!(t.hom_dim(0, 3), 6);
        assert_eq!(t.hom_dim(1, 3), 18);
    }

    #[test]
    fn tensor_needs_units() {
        let mut c = LinCat::ground_field();
        c.units[0] = None;
        assert!(matches!(c.tensor(&LinCat::ground_field()), Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_retract_is_trivial() {
        let c = LinCat::matrix_category(&[2]);
        let e = c.unit(0).unwrap().clone();
        let x = Morphism::from_pairs([(1, int(1)), (2, int(1))]);
        let rep = retract_transport(
            &c,
            &[x],
            &[Retract {
                object: 0,
                via: 0,
                r: e.clone(),
                k: e,
            }],
            5,
        )
        .unwrap();
        assert!(rep.equal);
        assert_eq!(rep.original, rep.transported_table);
    }

    #[test]
    fn rejects_non_retraction() {
        let c = LinCat::matrix_category(&[1, 2]);
        let zero = Morphism::new();
        let err = retract_transport(
            &c,
            &[],
            &[Retract {
                object: 0,
                via: 1,
                r: zero.clone(),
                k: zero,
            }],
            3,
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }
}
