use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{Scalar, SparseVec};

/// A composable path in the free category on a quiver. An empty letter list
/// is the identity at `source` (= `target`).
///
/// Paths are ordered so that longer paths come first; echelon pivots (the
/// smallest key) are then leading monomials of a length-graded order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub source: u32,
    pub target: u32,
    pub letters: Vec<u32>,
}

impl Path {
    pub fn identity(object: u32) -> Self {
        Path {
            source: object,
            target: object,
            letters: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Diagrammatic concatenation, `None` if not composable.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.target != other.source {
            return None;
        }
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Some(Path {
            source: self.source,
            target: other.target,
            letters,
        })
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .letters
            .len()
            .cmp(&self.letters.len())
            .then_with(|| self.source.cmp(&other.source))
            .then_with(|| self.target.cmp(&other.target))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Linear combination of paths.
pub type PathPoly = SparseVec<Path>;

/// Product of two path combinations; non-composable pairs contribute zero.
pub fn multiply(a: &PathPoly, b: &PathPoly) -> PathPoly {
    let mut out = PathPoly::new();
    for (p, x) in a.iter() {
        for (q, y) in b.iter() {
            if let Some(pq) = p.concat(q) {
                out.add_term(pq, x.clone() * y.clone());
            }
        }
    }
    out
}

pub fn max_len(p: &PathPoly) -> usize {
    p.leading().map(|(k, _)| k.len()).unwrap_or(0)
}

pub fn min_len(p: &PathPoly) -> usize {
    p.keys().map(|k| k.len()).min().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub src: String,
    pub tgt: String,
    #[serde(default)]
    pub degree: i64,
}

/// One term of a linear combination of words. `object` is required only for
/// the empty word, which denotes that object's identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "crate::serde_scalar")]
    pub coeff: Scalar,
    pub word: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

impl Term {
    pub fn new(coeff: Scalar, word: &[&str]) -> Self {
        Term {
            coeff,
            word: word.iter().map(|s| s.to_string()).collect(),
            object: None,
        }
    }
}

/// A morphism of the presented category written as a combination of words
/// sharing one (source, target) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MorphismExpr {
    pub terms: Vec<Term>,
}

impl MorphismExpr {
    pub fn word(word: &[&str]) -> Self {
        MorphismExpr {
            terms: vec![Term::new(crate::exactlin::int(1), word)],
        }
    }

    pub fn identity(object: &str) -> Self {
        MorphismExpr {
            terms: vec![Term {
                coeff: crate::exactlin::int(1),
                word: Vec::new(),
                object: Some(object.to_string()),
            }],
        }
    }
}

/// The finite set Σ whose word growth is measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SigmaSet {
    pub elements: Vec<MorphismExpr>,
}

/// A finitely presented Z/N-graded linear category (quiver with relations).
/// `grading_modulus = 0` means integer grading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    #[serde(default)]
    pub grading_modulus: u32,
    pub objects: Vec<String>,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub relations: Vec<Vec<Term>>,
    /// Accept relations whose terms have different word lengths; growth
    /// tables computed from such presentations are upper bounds.
    #[serde(default)]
    pub inhomogeneous: bool,
}

/// Index-resolved form of a validated presentation.
#[derive(Clone, Debug)]
pub struct Quiver {
    pub objects: Vec<String>,
    pub arrows: Vec<(u32, u32)>,
    pub names: Vec<String>,
    pub relations: Vec<PathPoly>,
    pub homogeneous: bool,
}

impl Presentation {
    pub fn free_algebra(names: &[&str]) -> Self {
        Presentation {
            grading_modulus: 0,
            objects: vec!["*".into()],
            generators: names
                .iter()
                .map(|n| Generator {
                    name: n.to_string(),
                    src: "*".into(),
                    tgt: "*".into(),
                    degree: 0,
                })
                .collect(),
            relations: Vec::new(),
            inhomogeneous: false,
        }
    }

    fn reduce_degree(&self, d: i64) -> i64 {
        if self.grading_modulus == 0 {
            d
        } else {
            d.rem_euclid(self.grading_modulus as i64)
        }
    }

    /// Checks every structural invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        self.compile().map(|_| ())
    }

    pub fn compile(&self) -> Result<Quiver> {
        let mut errors = Vec::new();
        let object_index: BTreeMap<&str, u32> = self.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i as u32)).collect();
        if object_index.len() != self.objects.len() {
            errors.push("object names are not unique".to_string());
        }

        let mut gen_index: BTreeMap<&str, u32> = BTreeMap::new();
        let mut arrows = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            if gen_index.insert(g.name.as_str(), i as u32).is_some() {
                errors.push(format!("generator {i}: duplicate name {:?}", g.name));
            }
            let src = object_index.get(g.src.as_str());
            let tgt = object_index.get(g.tgt.as_str());
            if src.is_none() {
                errors.push(format!("generator {:?}: unknown source object {:?}", g.name, g.src));
            }
            if tgt.is_none() {
                errors.push(format!("generator {:?}: unknown target object {:?}", g.name, g.tgt));
            }
            arrows.push((src.copied().unwrap_or(0), tgt.copied().unwrap_or(0)));
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }

        let ctx = Resolver {
            object_index: &object_index,
            gen_index: &gen_index,
            arrows: &arrows,
        };
        let mut relations = Vec::new();
        let mut homogeneous = true;
        for (ri, rel) in self.relations.iter().enumerate() {
            let poly = match ctx.resolve(&rel[..]) {
                Ok(p) => p,
                Err(e) => {
                    errors.push(format!("relation {ri}: {e}"));
                    continue;
                }
            };
            if poly.is_zero() {
                errors.push(format!("relation {ri}: is zero"));
                continue;
            }
            if poly.keys().any(|p| p.is_empty()) {
                errors.push(format!("relation {ri}: contains an identity term"));
            }
            let degrees: BTreeSet<i64> = poly
                .keys()
                .map(|p| self.reduce_degree(p.letters.iter().map(|&a| self.generators[a as usize].degree).sum()))
                .collect();
            if degrees.len() > 1 {
                errors.push(format!("relation {ri}: not homogeneous in degree (degrees {degrees:?})"));
            }
            if min_len(&poly) != max_len(&poly) {
                homogeneous = false;
                if !self.inhomogeneous {
                    errors.push(format!(
                        "relation {ri}: mixes word lengths {}..{} without the inhomogeneous flag",
                        min_len(&poly),
                        max_len(&poly)
                    ));
                }
            }
            relations.push(poly);
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        Ok(Quiver {
            objects: self.objects.clone(),
            arrows,
            names: self.generators.iter().map(|g| g.name.clone()).collect(),
            relations,
            homogeneous,
        })
    }
}

struct Resolver<'a> {
    object_index: &'a BTreeMap<&'a str, u32>,
    gen_index: &'a BTreeMap<&'a str, u32>,
    arrows: &'a [(u32, u32)],
}

impl Resolver<'_> {
    fn path(&self, term: &Term) -> std::result::Result<Path, String> {
        if term.word.is_empty() {
            let obj = term.object.as_deref().ok_or("empty word without an object")?;
            let o = *self.object_index.get(obj).ok_or_else(|| format!("unknown object {obj:?}"))?;
            return Ok(Path::identity(o));
        }
        let mut letters = Vec::with_capacity(term.word.len());
        for name in &term.word {
            letters.push(
                *self
                    .gen_index
                    .get(name.as_str())
                    .ok_or_else(|| format!("unknown generator {name:?}"))?,
            );
        }
        for (i, w) in letters.windows(2).enumerate() {
            let (_, t) = self.arrows[w[0] as usize];
            let (s, _) = self.arrows[w[1] as usize];
            if t != s {
                return Err(format!(
                    "word {:?} is not composable at position {} ({} then {})",
                    term.word.join(" "),
                    i + 1,
                    term.word[i],
                    term.word[i + 1]
                ));
            }
        }
        let source = self.arrows[letters[0] as usize].0;
        let target = self.arrows[*letters.last().unwrap() as usize].1;
        if let Some(obj) = &term.object {
            let o = self.object_index.get(obj.as_str()).copied();
            if o != Some(source) {
                return Err(format!("word {:?} does not start at object {obj:?}", term.word.join(" ")));
            }
        }
        Ok(Path { source, target, letters })
    }

    fn resolve(&self, terms: &[Term]) -> std::result::Result<PathPoly, String> {
        let mut poly = PathPoly::new();
        let mut ends: Option<(u32, u32)> = None;
        for t in terms {
            let p = self.path(t)?;
            match ends {
                None => ends = Some((p.source, p.target)),
                Some(e) if e != (p.source, p.target) => {
                    return Err("terms do not share one (source, target) pair".into());
                }
                _ => {}
            }
            poly.add_term(p, t.coeff.clone());
        }
        Ok(poly)
    }
}

impl Quiver {
    pub fn object(&self, name: &str) -> Result<u32> {
        self.objects
            .iter()
            .position(|o| o == name)
            .map(|i| i as u32)
            .ok_or_else(|| Error::validation(format!("unknown object {name:?}")))
    }

    /// Resolves Σ against this quiver. Each element must be a nonzero
    /// combination within a single hom space.
    pub fn resolve_sigma(&self, p: &Presentation, sigma: &SigmaSet) -> Result<Vec<PathPoly>> {
        let object_index: BTreeMap<&str, u32> = self.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i as u32)).collect();
        let gen_index: BTreeMap<&str, u32> = p.generators.iter().enumerate().map(|(i, g)| (g.name.as_str(), i as u32)).collect();
        let ctx = Resolver {
            object_index: &object_index,
            gen_index: &gen_index,
            arrows: &self.arrows,
        };
        if sigma.elements.is_empty() {
            return Err(Error::validation("Σ is empty"));
        }
        let mut errors = Vec::new();
        let mut out = Vec::new();
        for (i, e) in sigma.elements.iter().enumerate() {
            match ctx.resolve(&e.terms) {
                Ok(p) if p.is_zero() => errors.push(format!("Σ element {i}: is the zero combination")),
                Ok(p) => out.push(p),
                Err(msg) => errors.push(format!("Σ element {i}: {msg}")),
            }
        }
        if errors.is_empty() {
            Ok(out)
        } else {
            Err(Error::Validation(errors))
        }
    }

    pub fn arrows_from(&self, object: u32) -> impl Iterator<Item = u32> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.0 == object)
            .map(|(i, _)| i as u32)
    }

    pub fn arrows_into(&self, object: u32) -> impl Iterator<Item = u32> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.1 == object)
            .map(|(i, _)| i as u32)
    }

    pub fn arrow_path(&self, a: u32) -> Path {
        let (s, t) = self.arrows[a as usize];
        Path {
            source: s,
            target: t,
            letters: vec![a],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    fn commutative() -> Presentation {
        let mut p = Presentation::free_algebra(&["x", "y"]);
        p.relations
            .push(vec![Term::new(int(1), &["x", "y"]), Term::new(int(-1), &["y", "x"])]);
        p
    }

    #[test]
    fn accepts_free_and_commutative() {
        assert!(Presentation::free_algebra(&["x", "y"]).validate().is_ok());
        assert!(commutative().validate().is_ok());
    }

    #[test]
    fn rejects_non_composable_relation() {
        let p = Presentation {
            grading_modulus: 0,
            objects: vec!["A".into(), "B".into(), "C".into()],
            generators: vec![
                Generator {
                    name: "f".into(),
                    src: "A".into(),
                    tgt: "B".into(),
                    degree: 0,
                },
                Generator {
                    name: "g".into(),
                    src: "C".into(),
                    tgt: "A".into(),
                    degree: 0,
                },
            ],
            relations: vec![vec![Term::new(int(1), &["f", "g"])]],
            inhomogeneous: false,
        };
        match p.validate() {
            Err(Error::Validation(errs)) => {
                assert_eq!(errs.len(), 1);
                assert!(errs[0].starts_with("relation 0:"), "{errs:?}");
                assert!(errs[0].contains("not composable"));
            }
            other => panic!("expected a composability error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_inhomogeneous_without_flag_and_dangling_objects() {
        let mut p = Presentation::free_algebra(&["x"]);
        p.relations.push(vec![Term::new(int(1), &["x", "x"]), Term::new(int(-1), &["x"])]);
        assert!(p.validate().is_err());
        p.inhomogeneous = true;
        let q = p.compile().unwrap();
        assert!(!q.homogeneous);

        let mut d = Presentation::free_algebra(&["x"]);
        d.generators[0].tgt = "nowhere".into();
        let err = d.validate().unwrap_err();
        assert!(err.to_string().contains("unknown target object"));
    }

    #[test]
    fn rejects_degree_inhomogeneous_relation() {
        let mut p = Presentation::free_algebra(&["x", "y"]);
        p.generators[1].degree = 1;
        p.relations
            .push(vec![Term::new(int(1), &["x", "x"]), Term::new(int(1), &["y", "y"])]);
        assert!(p.validate().is_err());
        p.grading_modulus = 2;
        assert!(p.validate().is_ok());
    }

    #[test]
    fn longer_paths_sort_first() {
        let long = Path {
            source: 0,
            target: 0,
            letters: vec![0, 0],
        };
        let short = Path {
            source: 0,
            target: 0,
            letters: vec![1],
        };
        assert!(long < short);
        assert!(short < Path::identity(0));
    }
}
