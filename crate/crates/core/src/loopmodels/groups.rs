use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use serde::Serialize;

use super::hilbert::index_value_tsv;
use crate::error::{Error, Result};
use crate::fixtures::rng;

/// Environment variable capping the number of group elements a ball search
/// may store.
pub const BFS_BUDGET_VAR: &str = "ALGROWTH_BFS_BUDGET";
pub const DEFAULT_BFS_BUDGET: usize = 4_000_000;

/// Letters are `2i` for generator `i` and `2i + 1` for its inverse.
pub type Letter = u8;

fn inv(x: Letter) -> Letter {
    x ^ 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    Free { rank: usize },
    Surface { genus: usize, orientable: bool },
}

impl std::fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupSpec::Free { rank } => write!(f, "free group of rank {rank}"),
            GroupSpec::Surface { genus, orientable: true } => write!(f, "orientable surface group of genus {genus}"),
            GroupSpec::Surface { genus, orientable: false } => write!(f, "non-orientable surface group of genus {genus}"),
        }
    }
}

/// `B_0, ..., B_N` with `B_n` the number of elements of word length ≤ n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallTable {
    pub group: GroupSpec,
    pub sizes: Vec<BigUint>,
}

impl BallTable {
    pub fn to_tsv(&self) -> String {
        index_value_tsv(&self.sizes)
    }

    pub fn spheres(&self) -> Vec<BigUint> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(i, b)| if i == 0 { b.clone() } else { b - &self.sizes[i - 1] })
            .collect()
    }
}

/// `B_n = 1 + Σ_{l=1}^n 2r(2r-1)^{l-1}`.
pub fn free_group_ball(rank: usize, n_max: usize) -> Result<BallTable> {
    if rank == 0 {
        return Err(Error::Precondition("free group rank must be at least 1".into()));
    }
    let mut sizes = vec![BigUint::from(1u32)];
    let mut sphere = BigUint::from(2 * rank);
    for _ in 1..=n_max {
        let next = sizes.last().unwrap() + &sphere;
        sizes.push(next);
        sphere *= BigUint::from(2 * rank - 1);
    }
    Ok(BallTable {
        group: GroupSpec::Free { rank },
        sizes,
    })
}

/// A one-relator presentation (or a free group) whose relator satisfies
/// Dehn's algorithm.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub spec: GroupSpec,
    pub names: Vec<String>,
    pub relator: Vec<Letter>,
    /// Cyclic permutations of the relator and its inverse.
    forms: Vec<Vec<Letter>>,
}

impl Presentation {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        let (names, relator): (Vec<String>, Vec<Letter>) = match spec {
            GroupSpec::Free { rank } => {
                if rank == 0 {
                    return Err(Error::Precondition("free group rank must be at least 1".into()));
                }
                ((1..=rank).map(|i| format!("x{i}")).collect(), Vec::new())
            }
            GroupSpec::Surface { genus, orientable: true } => {
                if genus < 2 {
                    return Err(Error::Unsupported(format!(
                        "orientable genus {genus}: only hyperbolic surfaces (genus ≥ 2) are supported"
                    )));
                }
                let names = (1..=genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect();
                let relator = (0..genus as u8)
                    .flat_map(|i| {
                        let (a, b) = (4 * i, 4 * i + 2);
                        [a, b, inv(a), inv(b)]
                    })
                    .collect();
                (names, relator)
            }
            GroupSpec::Surface { genus, orientable: false } => {
                if genus < 3 {
                    return Err(Error::Unsupported(format!(
                        "non-orientable genus {genus}: the projective plane and the Klein bottle are not hyperbolic; genus ≥ 3 is required"
                    )));
                }
                let names = (1..=genus).map(|i| format!("c{i}")).collect();
                let relator = (0..genus as u8).flat_map(|i| [2 * i, 2 * i]).collect();
                (names, relator)
            }
        };
        if names.len() > 64 {
            return Err(Error::Unsupported("at most 64 generators".into()));
        }
        let mut forms = Vec::new();
        if !relator.is_empty() {
            let inverse: Vec<Letter> = relator.iter().rev().map(|&x| inv(x)).collect();
            for r in [&relator, &inverse] {
                for s in 0..r.len() {
                    let mut f = r[s..].to_vec();
                    f.extend_from_slice(&r[..s]);
                    if !forms.contains(&f) {
                        forms.push(f);
                    }
                }
            }
        }
        Ok(Presentation {
            spec,
            names,
            relator,
            forms,
        })
    }

    pub fn letter_count(&self) -> usize {
        2 * self.names.len()
    }

    pub fn letter_name(&self, x: Letter) -> String {
        let name = &self.names[(x / 2) as usize];
        if x.is_multiple_of(2) {
            name.clone()
        } else {
            name.to_uppercase()
        }
    }

    pub fn word_name(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            "e".into()
        } else {
            w.iter().map(|&x| self.letter_name(x)).collect()
        }
    }

    /// Free reduction followed by Dehn's algorithm: any subword that is more
    /// than half of a cyclic form of the relator is replaced by the inverse
    /// of the shorter complement, until none remains.
    pub fn dehn_reduce(&self, w: &[Letter]) -> Vec<Letter> {
        let mut w = free_reduce(w);
        let len = self.relator.len();
        if len == 0 {
            return w;
        }
        let half = len / 2;
        'outer: loop {
            for start in 0..w.len() {
                for f in &self.forms {
                    let k = w[start..].iter().zip(f).take_while(|(a, b)| a == b).count();
                    if k > half {
                        let replacement = f[k..].iter().rev().map(|&x| inv(x));
                        let mut next: Vec<Letter> = w[..start].to_vec();
                        next.extend(replacement);
                        next.extend_from_slice(&w[start + k..]);
                        w = free_reduce(&next);
                        continue 'outer;
                    }
                }
            }
            return w;
        }
    }

    /// Word problem: `u = v` iff `u v⁻¹` Dehn-reduces to the empty word.
    pub fn equal(&self, u: &[Letter], v: &[Letter]) -> bool {
        let mut w = u.to_vec();
        w.extend(v.iter().rev().map(|&x| inv(x)));
        self.dehn_reduce(&w).is_empty()
    }
}

pub fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&inv(x)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

const PERM_SIZE: usize = 12;
const PERM_REPS: usize = 4;

/// Abelianization and permutation-representation images: a hashable class
/// function used only to bucket candidates before the word-problem check.
#[derive(Clone, Debug)]
struct Invariants {
    orientable: bool,
    letter_perms: Vec<[[u8; PERM_SIZE]; PERM_REPS]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Signature {
    abelian: Vec<i32>,
    perms: [[u8; PERM_SIZE]; PERM_REPS],
}

fn random_perm(r: &mut rand_chacha::ChaCha8Rng) -> [u8; PERM_SIZE] {
    let mut p: [u8; PERM_SIZE] = std::array::from_fn(|i| i as u8);
    p.shuffle(r);
    p
}

fn random_involution(r: &mut rand_chacha::ChaCha8Rng) -> [u8; PERM_SIZE] {
    let mut order: Vec<u8> = (0..PERM_SIZE as u8).collect();
    order.shuffle(r);
    let mut p: [u8; PERM_SIZE] = std::array::from_fn(|i| i as u8);
    for pair in order.chunks(2).take(PERM_SIZE / 2 - 1) {
        p[pair[0] as usize] = pair[1];
        p[pair[1] as usize] = pair[0];
    }
    p
}

fn invert(p: &[u8; PERM_SIZE]) -> [u8; PERM_SIZE] {
    let mut q = [0u8; PERM_SIZE];
    for (i, &j) in p.iter().enumerate() {
        q[j as usize] = i as u8;
    }
    q
}

/// Apply `p` then `q`.
fn then(p: &[u8; PERM_SIZE], q: &[u8; PERM_SIZE]) -> [u8; PERM_SIZE] {
    std::array::from_fn(|i| q[p[i] as usize])
}

/// `a b a⁻¹ b⁻¹`, multiplying left to right.
fn commutator(a: &[u8; PERM_SIZE], b: &[u8; PERM_SIZE]) -> [u8; PERM_SIZE] {
    then(&then(&then(a, b), &invert(a)), &invert(b))
}

/// Some `d` with `d p d⁻¹ = q`, when `p` and `q` have the same cycle type.
fn conjugator(p: &[u8; PERM_SIZE], q: &[u8; PERM_SIZE]) -> Option<[u8; PERM_SIZE]> {
    let cycles = |x: &[u8; PERM_SIZE]| {
        let mut seen = [false; PERM_SIZE];
        let mut out: Vec<Vec<u8>> = Vec::new();
        for i in 0..PERM_SIZE {
            if !seen[i] {
                let mut cyc = vec![i as u8];
                seen[i] = true;
                let mut j = x[i] as usize;
                while j != i {
                    seen[j] = true;
                    cyc.push(j as u8);
                    j = x[j] as usize;
                }
                out.push(cyc);
            }
        }
        out.sort_by_key(|c| c.len());
        out
    };
    let (cp, cq) = (cycles(p), cycles(q));
    if cp.iter().map(Vec::len).ne(cq.iter().map(Vec::len)) {
        return None;
    }
    // Left-to-right products make d p d⁻¹ = q mean p ∘ d = d ∘ q.
    let mut d = [0u8; PERM_SIZE];
    for (a, b) in cq.iter().zip(&cp) {
        for (x, y) in a.iter().zip(b) {
            d[*x as usize] = *y;
        }
    }
    Some(d)
}

/// Random `(c, d)` with `[c, d] = t`.
fn solve_commutator(r: &mut rand_chacha::ChaCha8Rng, t: &[u8; PERM_SIZE]) -> ([u8; PERM_SIZE], [u8; PERM_SIZE]) {
    // c d c⁻¹ d⁻¹ = t  ⇔  d c⁻¹ d⁻¹ = c⁻¹ t.
    loop {
        let c = random_perm(r);
        let ci = invert(&c);
        if let Some(d) = conjugator(&ci, &then(&ci, t)) {
            return (c, d);
        }
    }
}

const IDENTITY: [u8; PERM_SIZE] = {
    let mut p = [0u8; PERM_SIZE];
    let mut i = 0;
    while i < PERM_SIZE {
        p[i] = i as u8;
        i += 1;
    }
    p
};

impl Invariants {
    fn new(p: &Presentation) -> Self {
        let g = p.names.len();
        let mut r = rng(0x005e_ed0f_6a05);
        let mut gens: Vec<[[u8; PERM_SIZE]; PERM_REPS]> = vec![[IDENTITY; PERM_REPS]; g];
        for rep in 0..PERM_REPS {
            match p.spec {
                GroupSpec::Free { .. } => {
                    for x in gens.iter_mut() {
                        x[rep] = random_perm(&mut r);
                    }
                }
                GroupSpec::Surface { orientable: true, .. } => {
                    // Random handles, with the last one solving
                    // [C, D] = (product of the others)⁻¹.
                    let handles = g / 2;
                    let mut product = IDENTITY;
                    for h in 0..handles - 1 {
                        let (a, b) = (random_perm(&mut r), random_perm(&mut r));
                        gens[2 * h][rep] = a;
                        gens[2 * h + 1][rep] = b;
                        product = then(&product, &commutator(&a, &b));
                    }
                    let (c, d) = solve_commutator(&mut r, &invert(&product));
                    gens[2 * handles - 2][rep] = c;
                    gens[2 * handles - 1][rep] = d;
                }
                GroupSpec::Surface { orientable: false, .. } => {
                    // Cyclically adjacent squares pair off as X², X⁻² or as two
                    // involutions; an odd leftover maps to an involution.
                    let shift = rand::Rng::random_range(&mut r, 0..g);
                    let order: Vec<usize> = (0..g).map(|i| (i + shift) % g).collect();
                    for pair in order.chunks(2) {
                        match *pair {
                            [i, j] if rand::Rng::random_bool(&mut r, 0.5) => {
                                let x = random_perm(&mut r);
                                gens[i][rep] = x;
                                gens[j][rep] = invert(&x);
                            }
                            [i, j] => {
                                gens[i][rep] = random_involution(&mut r);
                                gens[j][rep] = random_involution(&mut r);
                            }
                            _ => gens[pair[0]][rep] = random_involution(&mut r),
                        }
                    }
                }
            }
        }
        let mut letter_perms = Vec::with_capacity(2 * g);
        for x in &gens {
            letter_perms.push(*x);
            letter_perms.push(std::array::from_fn(|rep| invert(&x[rep])));
        }
        let inv = Invariants {
            orientable: !matches!(p.spec, GroupSpec::Surface { orientable: false, .. }),
            letter_perms,
        };
        for rep in 0..PERM_REPS {
            let image = p
                .relator
                .iter()
                .fold(IDENTITY, |acc, &x| then(&acc, &inv.letter_perms[x as usize][rep]));
            assert_eq!(image, IDENTITY, "permutation representation must kill the relator");
        }
        inv
    }

    fn signature(&self, w: &[Letter], generators: usize) -> Signature {
        let mut abelian = vec![0i32; generators];
        let mut perms = [IDENTITY; PERM_REPS];
        for &x in w {
            abelian[(x / 2) as usize] += if x % 2 == 0 { 1 } else { -1 };
            for (rep, p) in perms.iter_mut().enumerate() {
                *p = then(p, &self.letter_perms[x as usize][rep]);
            }
        }
        if !self.orientable {
            // Z^g modulo (2, ..., 2): normalize the first coordinate into {0, 1}.
            let k = abelian[0].div_euclid(2);
            for a in abelian.iter_mut() {
                *a -= 2 * k;
            }
        }
        Signature { abelian, perms }
    }
}

fn hash_of(s: &Signature) -> u64 {
    let mut h = DefaultHasher::new();
    s.hash(&mut h);
    h.finish()
}

/// Breadth-first enumeration of a word-metric ball with one normal word per
/// element (the first one reached, in generator order).
#[derive(Clone, Debug)]
pub struct GroupBall {
    presentation: Presentation,
    invariants: Invariants,
    /// `words[n]` holds the sphere of radius `n`, words concatenated.
    words: Vec<Vec<Letter>>,
    /// Signature hash → element ids.
    buckets: HashMap<u64, Vec<u32>>,
    /// Start id of each sphere.
    offsets: Vec<usize>,
    budget: usize,
}

impl GroupBall {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        let budget = match std::env::var(BFS_BUDGET_VAR) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::validation(format!("{BFS_BUDGET_VAR} must be a positive integer, got {v:?}")))?,
            Err(_) => DEFAULT_BFS_BUDGET,
        };
        Self::with_budget(spec, budget)
    }

    pub fn with_budget(spec: GroupSpec, budget: usize) -> Result<Self> {
        let presentation = Presentation::new(spec)?;
        let invariants = Invariants::new(&presentation);
        let mut ball = GroupBall {
            presentation,
            invariants,
            words: vec![Vec::new()],
            buckets: HashMap::new(),
            offsets: vec![0, 1],
            budget,
        };
        let h = ball.hash_word(&[]);
        ball.buckets.insert(h, vec![0]);
        Ok(ball)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn radius(&self) -> usize {
        self.words.len() - 1
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn hash_word(&self, w: &[Letter]) -> u64 {
        hash_of(&self.invariants.signature(w, self.presentation.names.len()))
    }

    /// Word length of element `id`.
    pub fn length(&self, id: usize) -> usize {
        self.offsets.partition_point(|&o| o <= id) - 1
    }

    pub fn word(&self, id: usize) -> &[Letter] {
        let n = self.length(id);
        let i = id - self.offsets[n];
        &self.words[n][i * n..(i + 1) * n]
    }

    pub fn label(&self, id: usize) -> String {
        self.presentation.word_name(self.word(id))
    }

    /// Element represented by an arbitrary word, if it lies in the ball.
    pub fn find(&self, w: &[Letter]) -> Option<usize> {
        let bucket = self.buckets.get(&self.hash_word(w))?;
        bucket
            .iter()
            .map(|&id| id as usize)
            .find(|&id| self.presentation.equal(w, self.word(id)))
    }

    /// Group product "a then b", if it lies in the ball.
    pub fn multiply(&self, a: usize, b: usize) -> Option<usize> {
        let mut w = self.word(a).to_vec();
        w.extend_from_slice(self.word(b));
        self.find(&w)
    }

    /// Extends the ball by one sphere. On a budget overrun the ball keeps
    /// every complete sphere.
    pub fn grow(&mut self) -> Result<()> {
        let n = self.radius();
        let letters = self.presentation.letter_count() as Letter;
        let sphere = &self.words[n];
        let count = sphere.len().checked_div(n).unwrap_or(1);
        let mut next: Vec<Letter> = Vec::new();
        let mut fresh: HashMap<u64, Vec<u32>> = HashMap::new();
        let mut added = 0usize;
        let start = self.len();
        for i in 0..count {
            let w = &sphere[i * n..(i + 1) * n];
            for x in 0..letters {
                if w.last() == Some(&inv(x)) {
                    continue;
                }
                let mut cand = w.to_vec();
                cand.push(x);
                let h = self.hash_word(&cand);
                let known = self
                    .buckets
                    .get(&h)
                    .is_some_and(|b| b.iter().any(|&id| self.presentation.equal(&cand, self.word(id as usize))));
                let new_here = fresh.get(&h).is_some_and(|b| {
                    b.iter().any(|&j| {
                        let j = j as usize;
                        self.presentation.equal(&cand, &next[j * (n + 1)..(j + 1) * (n + 1)])
                    })
                });
                if known || new_here {
                    continue;
                }
                if start + added + 1 > self.budget {
                    return Err(Error::Resource(format!(
                        "ball search for the {} stopped at radius {} after {} elements (budget {} via {BFS_BUDGET_VAR}); partial sizes {}",
                        self.presentation.spec,
                        n,
                        start + added,
                        self.budget,
                        self.sizes().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
                    )));
                }
                fresh.entry(h).or_default().push(added as u32);
                next.extend_from_slice(&cand);
                added += 1;
            }
        }
        for (h, ids) in fresh {
            self.buckets
                .entry(h)
                .or_default()
                .extend(ids.into_iter().map(|j| (start + j as usize) as u32));
        }
        self.offsets.push(start + added);
        self.words.push(next);
        Ok(())
    }

    pub fn grow_to(&mut self, n_max: usize) -> Result<()> {
        while self.radius() < n_max {
            self.grow()?;
        }
        Ok(())
    }

    pub fn sizes(&self) -> Vec<BigUint> {
        self.offsets[1..].iter().map(|&o| BigUint::from(o)).collect()
    }

    pub fn table(&self) -> BallTable {
        BallTable {
            group: self.presentation.spec,
            sizes: self.sizes(),
        }
    }
}

/// Ball sizes of a surface group by breadth-first search with Dehn's
/// algorithm as the word-problem oracle.
pub fn surface_group_ball(genus: usize, orientable: bool, n_max: usize) -> Result<BallTable> {
    let mut ball = GroupBall::new(GroupSpec::Surface { genus, orientable })?;
    ball.grow_to(n_max)?;
    Ok(ball.table())
}
