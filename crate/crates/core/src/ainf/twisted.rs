use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::category::{mu_linear, reduce_degree, AInfCategory, AInfStructure, Element, OutTerm};
use crate::error::{Error, Result};
use crate::exactlin::{sign, ChainComplex, SparseMatrix};
use crate::fpcat::parity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShiftedObject {
    pub object: usize,
    pub shift: i64,
}

/// `(⊕ S^{σ_α} K_α, δ)` with `δ` strictly upper triangular: `delta[(α, β)]`
/// lies in `hom(K_α, K_β)` and only `α < β` is allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedComplex {
    pub summands: Vec<ShiftedObject>,
    pub delta: BTreeMap<(usize, usize), Element>,
}

impl TwistedComplex {
    pub fn single(object: usize) -> Self {
        TwistedComplex {
            summands: vec![ShiftedObject { object, shift: 0 }],
            delta: BTreeMap::new(),
        }
    }

    /// `Cone(id_K) = (S¹K ⊕ K, δ₀₁ = e_K)`.
    pub fn cone_of_identity<C: AInfStructure + ?Sized>(c: &C, object: usize) -> Result<Self> {
        let e = c
            .unit(object)
            .ok_or_else(|| Error::Precondition(format!("{} has no unit", c.object_label(object))))?;
        Ok(TwistedComplex {
            summands: vec![ShiftedObject { object, shift: 1 }, ShiftedObject { object, shift: 0 }],
            delta: BTreeMap::from([((0, 1), e)]),
        })
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    fn delta_chains(&self, k_max: usize) -> Vec<Chain> {
        let m = self.summands.len();
        let mut out: Vec<Chain> = (0..m)
            .map(|a| Chain {
                start: a,
                end: a,
                steps: Vec::new(),
            })
            .collect();
        let mut frontier = out.clone();
        while let Some(ch) = frontier.pop() {
            if ch.steps.len() >= k_max {
                continue;
            }
            for b in ch.end + 1..m {
                if self.delta.get(&(ch.end, b)).is_some_and(|d| !d.is_zero()) {
                    let mut steps = ch.steps.clone();
                    steps.push((ch.end, b));
                    let next = Chain {
                        start: ch.start,
                        end: b,
                        steps,
                    };
                    out.push(next.clone());
                    frontier.push(next);
                }
            }
        }
        out.sort();
        out
    }

    pub fn to_file<C: AInfStructure + ?Sized>(&self, c: &C) -> TwistedComplexFile {
        TwistedComplexFile {
            summands: self
                .summands
                .iter()
                .map(|s| SummandEntry {
                    object: c.object_label(s.object),
                    shift: s.shift,
                })
                .collect(),
            delta: self
                .delta
                .iter()
                .map(|(&(from, to), v)| DeltaEntry {
                    from,
                    to,
                    terms: v
                        .iter()
                        .map(|(&k, x)| OutTerm {
                            coeff: x.clone(),
                            id: c.basis_label(k),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Chain {
    start: usize,
    end: usize,
    steps: Vec<(usize, usize)>,
}

fn check_shape<C: AInfStructure + ?Sized>(c: &C, t: &TwistedComplex) -> Result<()> {
    let n = c.grading_modulus();
    let mut errors = Vec::new();
    for (i, s) in t.summands.iter().enumerate() {
        if s.object >= c.object_count() {
            errors.push(format!("summand {i} references a missing object"));
        }
    }
    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    for (&(a, b), v) in &t.delta {
        if a >= b || b >= t.summands.len() {
            errors.push(format!("δ entry ({a},{b}) is not strictly upper triangular"));
            continue;
        }
        let (sa, sb) = (t.summands[a], t.summands[b]);
        for &k in v.keys() {
            if k >= c.basis_len() || c.source(k) != sa.object || c.target(k) != sb.object {
                errors.push(format!(
                    "δ entry ({a},{b}) has a term outside hom({}, {})",
                    c.object_label(sa.object),
                    c.object_label(sb.object)
                ));
                continue;
            }
            let d = reduce_degree(n, c.degree(k) - sb.shift + sa.shift);
            if d != reduce_degree(n, 1) {
                errors.push(format!("δ entry ({a},{b}) has a term of shifted degree {d}, not 1"));
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(errors))
    }
}

/// The Maurer–Cartan sum `Σ_k μ^k(δ, ..., δ)` entry by entry.
pub fn maurer_cartan_residual<C: AInfStructure + ?Sized>(c: &C, t: &TwistedComplex) -> Result<BTreeMap<(usize, usize), Element>> {
    check_shape(c, t)?;
    parity(c.grading_modulus(), 0)?;
    let mut out: BTreeMap<(usize, usize), Element> = BTreeMap::new();
    for ch in t.delta_chains(c.max_arity()) {
        if ch.steps.is_empty() {
            continue;
        }
        let args: Vec<&Element> = ch.steps.iter().map(|s| &t.delta[s]).collect();
        let v = mu_linear(c, &args).ok_or_else(|| Error::Precondition("Maurer–Cartan term leaves the window".into()))?;
        let s = sign(t.summands[ch.start].shift);
        out.entry((ch.start, ch.end)).or_default().add_scaled(&v, &s);
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Shape, degree and Maurer–Cartan check; the first nonzero residual entry is
/// reported.
pub fn validate_twisted_complex<C: AInfStructure + ?Sized>(c: &C, t: &TwistedComplex) -> Result<()> {
    let residual = maurer_cartan_residual(c, t)?;
    if let Some(((a, b), v)) = residual.into_iter().next() {
        let terms: Vec<String> = v
            .iter()
            .map(|(&k, x)| format!("{}·{}", crate::exactlin::format_scalar(x), c.basis_label(k)))
            .collect();
        return Err(Error::InvariantViolation(format!(
            "Maurer–Cartan residual at ({a},{b}): {}",
            terms.join(" + ")
        )));
    }
    Ok(())
}

/// Basis element of `hom_Tw(P, Q)`: base element `b` in block `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwBasis {
    pub p: usize,
    pub q: usize,
    pub i: usize,
    pub j: usize,
    pub b: usize,
}

/// Full subcategory of `Tw C` on a finite pool of validated twisted complexes.
///
/// Shifted objects use `μ_{ΣC}(x_1..x_k) = (-1)^{σ_0} μ_C(x_1..x_k)` where `σ_0`
/// is the shift of the source of `x_1`, and an element of `hom(K, L)` from a
/// summand shifted by `σ` to one shifted by `τ` has degree `|x| - τ + σ`.
/// Operations sum over all insertions of the differentials.
pub struct TwCategory<'a, C: AInfStructure + ?Sized> {
    base: &'a C,
    complexes: Vec<TwistedComplex>,
    chains: Vec<Vec<Chain>>,
    basis: Vec<TwBasis>,
    index: HashMap<TwBasis, usize>,
    hom: BTreeMap<(usize, usize), Vec<usize>>,
    by_source: Vec<Vec<usize>>,
}

impl<'a, C: AInfStructure + ?Sized> TwCategory<'a, C> {
    pub fn new(base: &'a C, complexes: Vec<TwistedComplex>) -> Result<Self> {
        for (i, t) in complexes.iter().enumerate() {
            validate_twisted_complex(base, t).map_err(|e| match e {
                Error::InvariantViolation(m) => Error::InvariantViolation(format!("complex {i}: {m}")),
                other => other,
            })?;
        }
        let mut basis = Vec::new();
        let mut hom: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut by_source = vec![Vec::new(); complexes.len()];
        for (p, tp) in complexes.iter().enumerate() {
            for (q, tq) in complexes.iter().enumerate() {
                for (i, si) in tp.summands.iter().enumerate() {
                    for (j, sj) in tq.summands.iter().enumerate() {
                        for b in base.hom_basis(si.object, sj.object) {
                            hom.entry((p, q)).or_default().push(basis.len());
                            by_source[p].push(basis.len());
                            basis.push(TwBasis { p, q, i, j, b });
                        }
                    }
                }
            }
        }
        let index = basis.iter().enumerate().map(|(n, &t)| (t, n)).collect();
        let chains = complexes.iter().map(|t| t.delta_chains(base.max_arity())).collect();
        Ok(TwCategory {
            base,
            complexes,
            chains,
            basis,
            index,
            hom,
            by_source,
        })
    }

    /// The image of `C` in `Tw C`: one unshifted summand per object.
    pub fn embedding(base: &'a C) -> Result<Self> {
        Self::new(base, (0..base.object_count()).map(TwistedComplex::single).collect())
    }

    pub fn base(&self) -> &C {
        self.base
    }

    pub fn complexes(&self) -> &[TwistedComplex] {
        &self.complexes
    }

    pub fn tw_basis(&self) -> &[TwBasis] {
        &self.basis
    }

    pub fn index_of(&self, t: TwBasis) -> Option<usize> {
        self.index.get(&t).copied()
    }

    /// Embeds a base element sitting in block `(i, j)` of `hom(P, Q)`.
    pub fn block_element(&self, p: usize, q: usize, i: usize, j: usize, v: &Element) -> Result<Element> {
        let mut out = Element::new();
        for (&b, x) in v.iter() {
            let id = self
                .index_of(TwBasis { p, q, i, j, b })
                .ok_or_else(|| Error::validation(format!("base element {} does not fit block ({i},{j})", self.base.basis_label(b))))?;
            out.add_term(id, x.clone());
        }
        Ok(out)
    }

    fn chains_between(&self, complex: usize, start: Option<usize>, end: Option<usize>) -> impl Iterator<Item = &Chain> {
        self.chains[complex]
            .iter()
            .filter(move |ch| start.is_none_or(|s| ch.start == s) && end.is_none_or(|e| ch.end == e))
    }

    fn sum_insertions(&self, x: &[TwBasis], out: &mut Element) -> Option<()> {
        let k = x.len();
        let k_max = self.base.max_arity();
        let q0 = x[0].p;
        let units: Vec<Element> = x.iter().map(|t| Element::unit(t.b)).collect();
        // Middle segments: chains in Q_r from j_r to i_{r+1}.
        let mut middle: Vec<Vec<&Chain>> = Vec::with_capacity(k.saturating_sub(1));
        for r in 1..k {
            let ch: Vec<&Chain> = self.chains_between(x[r - 1].q, Some(x[r - 1].j), Some(x[r].i)).collect();
            if ch.is_empty() {
                return Some(());
            }
            middle.push(ch);
        }
        let first: Vec<&Chain> = self.chains_between(q0, None, Some(x[0].i)).collect();
        let last: Vec<&Chain> = self.chains_between(x[k - 1].q, Some(x[k - 1].j), None).collect();
        let mut pick: Vec<&Chain> = Vec::with_capacity(k + 1);
        self.expand(x, &units, &first, &middle, &last, k_max, &mut pick, out)
    }

    #[allow(clippy::too_many_arguments)]
    fn expand<'c>(
        &self,
        x: &[TwBasis],
        units: &[Element],
        first: &[&'c Chain],
        middle: &[Vec<&'c Chain>],
        last: &[&'c Chain],
        k_max: usize,
        pick: &mut Vec<&'c Chain>,
        out: &mut Element,
    ) -> Option<()> {
        let k = x.len();
        let used: usize = k + pick.iter().map(|c| c.steps.len()).sum::<usize>();
        if used > k_max {
            return Some(());
        }
        let options: &[&Chain] = match pick.len() {
            0 => first,
            n if n < k => &middle[n - 1],
            n if n == k => last,
            _ => {
                // Segments 0..=k chosen: evaluate.
                let q0 = x[0].p;
                let qk = x[k - 1].q;
                let mut args: Vec<&Element> = Vec::with_capacity(used);
                for (r, ch) in pick.iter().enumerate() {
                    let complex = if r == 0 { q0 } else { x[r - 1].q };
                    args.extend(ch.steps.iter().map(|s| &self.complexes[complex].delta[s]));
                    if r < k {
                        args.push(&units[r]);
                    }
                }
                let v = mu_linear(self.base, &args)?;
                let (alpha, beta) = (pick[0].start, pick[k].end);
                let s = sign(self.complexes[q0].summands[alpha].shift);
                for (&b, c) in v.iter() {
                    let id = self.index[&TwBasis {
                        p: q0,
                        q: qk,
                        i: alpha,
                        j: beta,
                        b,
                    }];
                    out.add_term(id, c.clone() * s.clone());
                }
                return Some(());
            }
        };
        for &ch in options {
            pick.push(ch);
            let r = self.expand(x, units, first, middle, last, k_max, pick, out);
            pick.pop();
            r?;
        }
        Some(())
    }
}

impl<C: AInfStructure + ?Sized> AInfStructure for TwCategory<'_, C> {
    fn grading_modulus(&self) -> u32 {
        self.base.grading_modulus()
    }

    fn object_count(&self) -> usize {
        self.complexes.len()
    }

    fn object_label(&self, object: usize) -> String {
        let t = &self.complexes[object];
        let parts: Vec<String> = t
            .summands
            .iter()
            .map(|s| {
                if s.shift == 0 {
                    self.base.object_label(s.object)
                } else {
                    format!("S^{}{}", s.shift, self.base.object_label(s.object))
                }
            })
            .collect();
        format!("Q{object}[{}]", parts.join("⊕"))
    }

    fn basis_len(&self) -> usize {
        self.basis.len()
    }

    fn source(&self, b: usize) -> usize {
        self.basis[b].p
    }

    fn target(&self, b: usize) -> usize {
        self.basis[b].q
    }

    fn degree(&self, b: usize) -> i64 {
        let t = self.basis[b];
        let sigma = self.complexes[t.p].summands[t.i].shift;
        let tau = self.complexes[t.q].summands[t.j].shift;
        reduce_degree(self.base.grading_modulus(), self.base.degree(t.b) - tau + sigma)
    }

    fn basis_label(&self, b: usize) -> String {
        let t = self.basis[b];
        format!("Q{}→Q{}({},{}):{}", t.p, t.q, t.i, t.j, self.base.basis_label(t.b))
    }

    fn max_arity(&self) -> usize {
        // Insertions only add base inputs.
        self.base.max_arity()
    }

    fn mu(&self, inputs: &[usize]) -> Option<Element> {
        let x: Vec<TwBasis> = inputs.iter().map(|&i| self.basis[i]).collect();
        if x.is_empty() || x.windows(2).any(|w| w[0].q != w[1].p) {
            return Some(Element::new());
        }
        let mut out = Element::new();
        self.sum_insertions(&x, &mut out)?;
        Some(out)
    }

    fn unit(&self, object: usize) -> Option<Element> {
        let t = &self.complexes[object];
        let mut out = Element::new();
        for (i, s) in t.summands.iter().enumerate() {
            let e = self.base.unit(s.object)?;
            let sg = sign(s.shift);
            for (&b, c) in e.iter() {
                out.add_term(
                    self.index[&TwBasis {
                        p: object,
                        q: object,
                        i,
                        j: i,
                        b,
                    }],
                    c.clone() * sg.clone(),
                );
            }
        }
        Some(out)
    }

    fn is_partial(&self) -> bool {
        self.base.is_partial()
    }

    fn hom_basis(&self, source: usize, target: usize) -> Vec<usize> {
        self.hom.get(&(source, target)).cloned().unwrap_or_default()
    }

    fn basis_from(&self, source: usize) -> Vec<usize> {
        self.by_source[source].clone()
    }
}

/// Hom complex of a pair of objects with differential `μ¹`, on the basis
/// `hom_basis(source, target)` in order.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub ids: Vec<usize>,
    pub labels: Vec<String>,
    pub degrees: Vec<i64>,
    pub complex: ChainComplex,
}

pub fn hom_complex<C: AInfStructure + ?Sized>(c: &C, source: usize, target: usize) -> Result<HomComplex> {
    let ids = c.hom_basis(source, target);
    let local: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let mut rows = Vec::with_capacity(ids.len());
    for &b in &ids {
        let v = c
            .mu(&[b])
            .ok_or_else(|| Error::Precondition(format!("μ¹ undefined on {}", c.basis_label(b))))?;
        rows.push(v.map_keys(|k| local[k]));
    }
    let d = SparseMatrix::from_rows(ids.len(), rows)?;
    let complex = ChainComplex::new(d).map_err(|e| match e {
        Error::InvariantViolation(m) => Error::InvariantViolation(format!("μ¹ does not square to zero: {m}")),
        other => other,
    })?;
    Ok(HomComplex {
        labels: ids.iter().map(|&b| c.basis_label(b)).collect(),
        degrees: ids.iter().map(|&b| c.degree(b)).collect(),
        ids,
        complex,
    })
}

/// `hom_Tw(P, Q)` with `μ¹_Tw`; a nonzero square is a sign-convention failure.
pub fn tw_hom_complex<C: AInfStructure + ?Sized>(c: &C, p: &TwistedComplex, q: &TwistedComplex) -> Result<HomComplex> {
    let tw = TwCategory::new(c, vec![p.clone(), q.clone()])?;
    hom_complex(&tw, 0, 1)
}

/// `μ^k_Tw` on elements of a pool, after checking the chain is composable.
pub fn tw_mu<C: AInfStructure + ?Sized>(tw: &TwCategory<'_, C>, inputs: &[&Element]) -> Result<Element> {
    let mut ends = Vec::new();
    for (n, x) in inputs.iter().enumerate() {
        let mut it = x.keys().map(|&k| (tw.source(k), tw.target(k)));
        let Some(first) = it.next() else {
            return Ok(Element::new());
        };
        if it.any(|e| e != first) {
            return Err(Error::validation(format!("input {} spans several hom spaces", n + 1)));
        }
        ends.push(first);
    }
    if ends.windows(2).any(|w| w[0].1 != w[1].0) {
        return Err(Error::validation("inputs do not form a composable chain"));
    }
    mu_linear(tw, inputs).ok_or_else(|| Error::Precondition("product leaves the computed window".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummandEntry {
    pub object: String,
    #[serde(default)]
    pub shift: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaEntry {
    pub from: usize,
    pub to: usize,
    pub terms: Vec<OutTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistedComplexFile {
    pub summands: Vec<SummandEntry>,
    #[serde(default)]
    pub delta: Vec<DeltaEntry>,
}

impl TwistedComplexFile {
    pub fn resolve(&self, c: &AInfCategory) -> Result<TwistedComplex> {
        let mut summands = Vec::new();
        for s in &self.summands {
            summands.push(ShiftedObject {
                object: c.object_index(&s.object)?,
                shift: s.shift,
            });
        }
        let mut delta: BTreeMap<(usize, usize), Element> = BTreeMap::new();
        for d in &self.delta {
            let entry = delta.entry((d.from, d.to)).or_default();
            for t in &d.terms {
                entry.add_term(c.basis_index(&t.id)?, t.coeff.clone());
            }
        }
        Ok(TwistedComplex { summands, delta })
    }
}
