//! Seeded instance generators shared by the test suites and the CLI.
//!
//! Every generator is a pure function of its seed (ChaCha8 seeded with
//! `seed_from_u64`), so instances are reproducible across platforms.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ainf::{mu_linear, AInfCategory, AInfStructure, BasisElement, Element, ShiftedObject, TwistedComplex};
use crate::exactlin::{int, left_kernel, Expresser, Scalar, SparseMatrix, SparseVec};
use crate::fpcat::{Generator, LinCat, Morphism, Presentation, Retract, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_coeff(r: &mut ChaCha8Rng) -> Scalar {
    int([-2, -1, 1, 1, 2, 3][r.random_range(0..6)])
}

/// A graded vector space concentrated in degrees 0 and 1 with a differential
/// `V⁰ → V¹` that never raises weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedComplex {
    pub degrees: Vec<i64>,
    pub weights: Vec<i64>,
    /// `d(u) = Σ c·v` as `(u, v, c)`.
    pub d: Vec<(usize, usize, Scalar)>,
}

/// A dg category of weighted complexes, returned with its filtration levels.
#[derive(Clone, Debug)]
pub struct FilteredFixture {
    pub seed: u64,
    pub category: AInfCategory,
    pub levels: Vec<Scalar>,
}

/// The full dg subcategory of cochain complexes on the given objects.
///
/// Basis: elementary maps `u ↦ v`, of degree `|v| - |u|` and level
/// `w(v) - w(u) + ρ`, with `ρ = 0` between an object and itself and
/// `off_diagonal` otherwise. The A∞ operations are `μ¹(f) = (-1)^{|f|} Df` and
/// `μ²(f, g) = (-1)^{|f|} g∘f`, with `Df = d∘f - (-1)^{|f|} f∘d`.
pub fn dg_category(spaces: &[WeightedComplex], off_diagonal: i64) -> (AInfCategory, Vec<Scalar>) {
    let objects: Vec<String> = (0..spaces.len()).map(|i| format!("K{i}")).collect();
    let mut basis = Vec::new();
    let mut levels = Vec::new();
    let mut index = BTreeMap::new();
    for (s, vs) in spaces.iter().enumerate() {
        for (t, vt) in spaces.iter().enumerate() {
            for u in 0..vs.degrees.len() {
                for v in 0..vt.degrees.len() {
                    index.insert((s, t, u, v), basis.len());
                    basis.push(BasisElement {
                        name: format!("K{s}K{t}:{u}>{v}"),
                        source: s,
                        target: t,
                        degree: vt.degrees[v] - vs.degrees[u],
                    });
                    let rho = if s == t { 0 } else { off_diagonal };
                    levels.push(int(vt.weights[v] - vs.weights[u] + rho));
                }
            }
        }
    }
    let sgn = |d: i64| if d.rem_euclid(2) == 0 { int(1) } else { int(-1) };
    let mut mu: BTreeMap<Vec<usize>, Element> = BTreeMap::new();
    for (&(s, t, u, v), &f) in &index {
        let deg = basis[f].degree;
        let mut df = Element::new();
        for (a, b, c) in &spaces[t].d {
            if *a == v {
                df.add_term(index[&(s, t, u, *b)], c.clone());
            }
        }
        for (a, b, c) in &spaces[s].d {
            if *b == u {
                df.add_term(index[&(s, t, *a, v)], -sgn(deg) * c.clone());
            }
        }
        mu.insert(vec![f], df.scaled(&sgn(deg)));
        for m in 0..spaces.len() {
            for z in 0..spaces[m].degrees.len() {
                let g = index[&(t, m, v, z)];
                mu.insert(vec![f, g], Element::from_pairs([(index[&(s, m, u, z)], sgn(deg))]));
            }
        }
    }
    let units = (0..spaces.len())
        .map(|s| Some((0..spaces[s].degrees.len()).map(|u| (index[&(s, s, u, u)], int(1))).collect()))
        .collect();
    let cat = AInfCategory::new(0, objects, basis, mu, 2, units).expect("dg fixtures are well formed");
    (cat, levels)
}

pub fn random_weighted_complex(r: &mut ChaCha8Rng, max_dim: usize) -> WeightedComplex {
    let n0 = r.random_range(1..=max_dim.max(1));
    let n1 = r.random_range(0..=max_dim.saturating_sub(n0));
    let mut degrees = vec![0; n0];
    degrees.extend(vec![1; n1]);
    let weights: Vec<i64> = degrees.iter().map(|_| r.random_range(0..=2)).collect();
    let mut d = Vec::new();
    for u in 0..n0 {
        for v in n0..n0 + n1 {
            if weights[v] <= weights[u] && r.random_bool(0.6) {
                d.push((u, v, small_coeff(r)));
            }
        }
    }
    WeightedComplex { degrees, weights, d }
}

/// Random filtered dg category with 1–3 objects of total dimension ≤ `max_dim`.
pub fn random_filtered_dg(seed: u64, max_objects: usize, max_dim: usize) -> FilteredFixture {
    let mut r = rng(seed);
    let n = r.random_range(1..=max_objects.max(1));
    let spaces: Vec<WeightedComplex> = (0..n).map(|_| random_weighted_complex(&mut r, max_dim)).collect();
    let off = r.random_range(0..=1);
    let (category, levels) = dg_category(&spaces, off);
    FilteredFixture { seed, category, levels }
}

/// Non-unital free algebra on `generators` letters, truncated to words of
/// length ≤ `max_len` (longer products vanish). Levels are word lengths.
pub fn truncated_free_algebra(generators: usize, max_len: usize) -> (AInfCategory, Vec<Scalar>) {
    let letters: Vec<char> = "xyzwuv".chars().take(generators).collect();
    let mut words: Vec<String> = Vec::new();
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        layer = layer.iter().flat_map(|w| letters.iter().map(move |c| format!("{w}{c}"))).collect();
        words.extend(layer.iter().cloned());
    }
    let index: BTreeMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let basis = words
        .iter()
        .map(|w| BasisElement {
            name: w.clone(),
            source: 0,
            target: 0,
            degree: 0,
        })
        .collect();
    let mut mu = BTreeMap::new();
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            if a.len() + b.len() <= max_len {
                mu.insert(vec![i, j], Element::unit(index[format!("{a}{b}").as_str()]));
            }
        }
    }
    let levels = words.iter().map(|w| int(w.len() as i64)).collect();
    let cat = AInfCategory::new(0, vec!["L".into()], basis, mu, 2, vec![None]).expect("free algebra is well formed");
    (cat, levels)
}

fn random_combination(r: &mut ChaCha8Rng, rows: &[SparseVec<usize>]) -> SparseVec<usize> {
    let mut out = SparseVec::new();
    for row in rows {
        if r.random_bool(0.7) {
            out.add_scaled(row, &small_coeff(r));
        }
    }
    out
}

/// Random twisted complex with `m` summands whose differential has entries of
/// level ≤ `c`, built one superdiagonal at a time by solving the
/// Maurer–Cartan equation linearly. Falls back to fewer nonzero entries when
/// a diagonal cannot be solved.
pub fn random_twisted_complex(r: &mut ChaCha8Rng, cat: &AInfCategory, levels: &[Scalar], m: usize, c: &Scalar) -> TwistedComplex {
    let n_obj = cat.object_count();
    let mut shift = r.random_range(0..=2);
    let mut summands = Vec::with_capacity(m);
    for _ in 0..m {
        summands.push(ShiftedObject {
            object: r.random_range(0..n_obj),
            shift,
        });
        shift -= r.random_range(0..=1);
    }
    for attempt in 0..8 {
        let density = if attempt < 6 { 0.8 } else { 0.3 };
        if let Some(delta) = solve_delta(r, cat, levels, &summands, c, density) {
            return TwistedComplex { summands, delta };
        }
    }
    TwistedComplex {
        summands,
        delta: BTreeMap::new(),
    }
}

fn solve_delta(
    r: &mut ChaCha8Rng,
    cat: &AInfCategory,
    levels: &[Scalar],
    summands: &[ShiftedObject],
    c: &Scalar,
    density: f64,
) -> Option<BTreeMap<(usize, usize), Element>> {
    let m = summands.len();
    let mut delta: BTreeMap<(usize, usize), Element> = BTreeMap::new();
    for dist in 1..m {
        for a in 0..m - dist {
            let b = a + dist;
            let (sa, sb) = (summands[a], summands[b]);
            let candidates: Vec<usize> = cat
                .hom_basis(sa.object, sb.object)
                .into_iter()
                .filter(|&k| cat.degree(k) == 1 + sb.shift - sa.shift && levels[k] <= *c)
                .collect();
            // rest = Σ_γ μ²(δ_aγ, δ_γb) and any higher terms along longer chains.
            let mut rest = Element::new();
            for g in a + 1..b {
                if let (Some(x), Some(y)) = (delta.get(&(a, g)), delta.get(&(g, b))) {
                    rest.add_scaled(&mu_linear(cat, &[x, y])?, &int(1));
                }
            }
            let images: Vec<Element> = candidates.iter().map(|&k| cat.mu(&[k]).unwrap_or_default()).collect();
            let particular = if rest.is_zero() {
                Element::new()
            } else {
                let coeffs = Expresser::new(images.iter()).express(&rest.scaled(&int(-1)))?;
                let mut p = Element::new();
                for (&i, x) in coeffs.iter() {
                    p.add_term(candidates[i], x.clone());
                }
                p
            };
            let mut entry = particular;
            if !candidates.is_empty() && r.random_bool(density) {
                let kernel = left_kernel(&SparseMatrix::from_rows(cat.basis_len(), images).ok()?);
                let cocycles: Vec<SparseVec<usize>> = kernel.rows().iter().map(|z| z.map_keys(|&i| candidates[i])).collect();
                entry.add_scaled(&random_combination(r, &cocycles), &int(1));
            }
            if !entry.is_zero() {
                delta.insert((a, b), entry);
            }
        }
    }
    Some(delta)
}

/// An admissible complex over a random filtered dg fixture.
#[derive(Clone, Debug)]
pub struct AdmissibleInstance {
    pub seed: u64,
    pub fixture: FilteredFixture,
    pub complex: TwistedComplex,
    pub threshold: Scalar,
}

pub fn random_admissible_instance(seed: u64, max_summands: usize) -> AdmissibleInstance {
    let fixture = random_filtered_dg(seed, 2, 3);
    let mut r = rng(seed ^ 0x0005_eed0_f7c0);
    let m = r.random_range(1..=max_summands.max(1));
    let threshold = int(r.random_range(1..=2));
    let complex = random_twisted_complex(&mut r, &fixture.category, &fixture.levels, m, &threshold);
    AdmissibleInstance {
        seed,
        fixture,
        complex,
        threshold,
    }
}

/// Retraction instance in a category of matrices: objects `K_i = k^{a_i}`
/// retract through `L_i = k^{b_i}` with `b_i ≥ a_i`, and Σ consists of random
/// morphisms between the `K_i`.
#[derive(Clone, Debug)]
pub struct RetractInstance {
    pub seed: u64,
    pub category: LinCat,
    pub sigma: Vec<Morphism>,
    pub retracts: Vec<Retract>,
}

/// Element of `hom(k^a, k^b)` from `(row, column, value)` entries; the basis
/// of a matrix category block is row-major.
fn matrix_element(cat: &LinCat, s: usize, t: usize, entries: &[(usize, usize, Scalar)]) -> Morphism {
    let ids = cat.hom_basis(s, t);
    let width = ids.len() / cat.hom_dim(s, s).isqrt();
    entries.iter().map(|(i, j, x)| (ids[i * width + j], x.clone())).collect()
}

pub fn random_retract_instance(seed: u64) -> RetractInstance {
    let mut r = rng(seed);
    let p = r.random_range(1..=2);
    let a: Vec<usize> = (0..p).map(|_| r.random_range(1..=2)).collect();
    let b: Vec<usize> = a.iter().map(|&x| x + r.random_range(0..=1)).collect();
    let dims: Vec<usize> = a.iter().chain(&b).copied().collect();
    let category = LinCat::matrix_category(&dims);
    let mut retracts = Vec::new();
    for i in 0..p {
        let (k_obj, l_obj) = (i, p + i);
        // r = [I | X] (a × b), k = [I ; 0] (b × a), so r·k = I.
        let mut r_entries = Vec::new();
        let mut k_entries = Vec::new();
        for row in 0..a[i] {
            r_entries.push((row, row, int(1)));
            k_entries.push((row, row, int(1)));
            for col in a[i]..b[i] {
                let x = small_coeff(&mut r);
                r_entries.push((row, col, x));
            }
        }
        retracts.push(Retract {
            object: k_obj,
            via: l_obj,
            r: matrix_element(&category, k_obj, l_obj, &r_entries),
            k: matrix_element(&category, l_obj, k_obj, &k_entries),
        });
    }
    let n_sigma = r.random_range(1..=3);
    let mut sigma = Vec::new();
    for _ in 0..n_sigma {
        let (s, t) = (r.random_range(0..p), r.random_range(0..p));
        let mut entries = Vec::new();
        for i in 0..a[s] {
            for j in 0..a[t] {
                if r.random_bool(0.6) {
                    entries.push((i, j, small_coeff(&mut r)));
                }
            }
        }
        if entries.is_empty() {
            entries.push((0, 0, int(1)));
        }
        sigma.push(matrix_element(&category, s, t, &entries));
    }
    RetractInstance {
        seed,
        category,
        sigma,
        retracts,
    }
}

/// Random quiver with homogeneous quadratic relations on at most
/// `max_objects` objects.
pub fn random_presentation(seed: u64, max_objects: usize) -> Presentation {
    let mut r = rng(seed);
    let n = r.random_range(2..=max_objects.max(2));
    let objects: Vec<String> = (0..n).map(|i| format!("O{i}")).collect();
    let n_arrows = r.random_range(n..=n + 3);
    let mut generators = Vec::new();
    for i in 0..n_arrows {
        // The first n arrows form a cycle so that every object is reached.
        let (s, t) = if i < n {
            (i, (i + 1) % n)
        } else {
            (r.random_range(0..n), r.random_range(0..n))
        };
        generators.push(Generator {
            name: format!("a{i}"),
            src: objects[s].clone(),
            tgt: objects[t].clone(),
            degree: 0,
        });
    }
    let mut relations = Vec::new();
    for _ in 0..r.random_range(0..=2) {
        // Pick a composable pair and possibly a parallel one.
        let first = r.random_range(0..n_arrows);
        let mid = &generators[first].tgt;
        let next: Vec<usize> = (0..n_arrows).filter(|&g| &generators[g].src == mid).collect();
        let second = next[r.random_range(0..next.len())];
        let mut rel = vec![Term::new(int(1), &[&generators[first].name, &generators[second].name])];
        let (src, tgt) = (&generators[first].src, &generators[second].tgt);
        for a in 0..n_arrows {
            for b in 0..n_arrows {
                if (a, b) != (first, second)
                    && &generators[a].src == src
                    && generators[a].tgt == generators[b].src
                    && &generators[b].tgt == tgt
                    && r.random_bool(0.3)
                {
                    rel.push(Term::new(small_coeff(&mut r), &[&generators[a].name, &generators[b].name]));
                }
            }
        }
        relations.push(rel);
    }
    Presentation {
        grading_modulus: 0,
        objects,
        generators,
        relations,
        inhomogeneous: false,
    }
}

/// Σ consisting of every generator of a presentation.
pub fn generator_sigma(p: &Presentation) -> crate::fpcat::SigmaSet {
    crate::fpcat::SigmaSet {
        elements: p
            .generators
            .iter()
            .map(|g| crate::fpcat::MorphismExpr::word(&[g.name.as_str()]))
            .collect(),
    }
}
