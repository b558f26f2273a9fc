//! Independent oracles shared by the integration tests. None of them calls
//! into the library's linear algebra or growth code.
#![allow(dead_code)]

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

/// Classes of freely reduced words of length ≤ n under every rewrite
/// `u ↦ v⁻¹` for a cyclic relator form `uv`, kept when the result still has
/// length ≤ n. Letters: `2i` and `2i + 1` are a generator and its inverse.
pub fn closure_ball(generators: usize, relator: &[u8], n: usize) -> Vec<usize> {
    let inv = |x: u8| x ^ 1;
    let reduce = |w: &[u8]| {
        let mut out: Vec<u8> = Vec::new();
        for &x in w {
            if out.last() == Some(&inv(x)) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        out
    };
    let mut words: Vec<Vec<u8>> = vec![vec![]];
    let mut start = 0;
    for _ in 0..n {
        let end = words.len();
        for i in start..end {
            for x in 0..2 * generators as u8 {
                if words[i].last() != Some(&inv(x)) {
                    let mut w = words[i].clone();
                    w.push(x);
                    words.push(w);
                }
            }
        }
        start = end;
    }
    let index: HashMap<Vec<u8>, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut parent: Vec<usize> = (0..words.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let inverse: Vec<u8> = relator.iter().rev().map(|&x| inv(x)).collect();
    let mut forms = Vec::new();
    for r in [relator.to_vec(), inverse] {
        for s in 0..r.len() {
            let mut f = r[s..].to_vec();
            f.extend_from_slice(&r[..s]);
            forms.push(f);
        }
    }
    for (id, w) in words.iter().enumerate() {
        for pos in 0..w.len() {
            for f in &forms {
                for k in 1..=f.len().min(w.len() - pos) {
                    if w[pos..pos + k] != f[..k] {
                        break;
                    }
                    let mut next = w[..pos].to_vec();
                    next.extend(f[k..].iter().rev().map(|&x| inv(x)));
                    next.extend_from_slice(&w[pos + k..]);
                    let next = reduce(&next);
                    if let Some(&j) = index.get(&next) {
                        let (a, b) = (find(&mut parent, id), find(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
        }
    }
    // Count classes by the shortest word length they contain.
    let mut shortest: HashMap<usize, usize> = HashMap::new();
    for (id, w) in words.iter().enumerate() {
        let r = find(&mut parent, id);
        let e = shortest.entry(r).or_insert(w.len());
        *e = (*e).min(w.len());
    }
    let mut balls = vec![0; n + 1];
    for &l in shortest.values() {
        for b in balls.iter_mut().skip(l) {
            *b += 1;
        }
    }
    balls
}

/// Rank by dense Gaussian elimination.
pub fn dense_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A matrix acting on row vectors from object `source` to object `target`.
#[derive(Clone, Debug)]
pub struct Block {
    pub source: usize,
    pub target: usize,
    pub m: Vec<Vec<BigRational>>,
}

fn product(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(BigRational::zero(), |acc, (x, brow)| acc + x * &brow[j]))
                .collect()
        })
        .collect()
}

/// `dim W_Σ(n)` for n = 1..=n_max, where Σ is a list of single-block matrices
/// and words compose as "first then second". Every word lies in one block, so
/// the span splits by block.
pub fn matrix_word_dims(sigma: &[Block], n_max: usize) -> Vec<usize> {
    let flat = |m: &Vec<Vec<BigRational>>| m.iter().flatten().cloned().collect::<Vec<_>>();
    let mut spans: HashMap<(usize, usize), Vec<Vec<Vec<BigRational>>>> = HashMap::new();
    let add = |spans: &mut HashMap<(usize, usize), Vec<Vec<Vec<BigRational>>>>, b: Block| {
        let entry = spans.entry((b.source, b.target)).or_default();
        let mut rows: Vec<Vec<BigRational>> = entry.iter().map(flat).collect();
        rows.push(flat(&b.m));
        if dense_rank(rows) > entry.len() {
            entry.push(b.m);
        }
    };
    for s in sigma {
        add(&mut spans, s.clone());
    }
    let mut out = vec![spans.values().map(Vec::len).sum()];
    for _ in 1..n_max {
        let mut next = spans.clone();
        for (&(s, t), basis) in &spans {
            for w in basis {
                for g in sigma.iter().filter(|g| g.source == t) {
                    add(
                        &mut next,
                        Block {
                            source: s,
                            target: g.target,
                            m: product(w, &g.m),
                        },
                    );
                }
            }
        }
        spans = next;
        out.push(spans.values().map(Vec::len).sum());
    }
    out
}

/// Number of paths of each length 1..=n_max in a quiver with the given arrows,
/// counted by powers of the adjacency matrix; entry `[k-1][s][t]` counts
/// paths of length k from s to t.
pub fn path_counts(objects: usize, arrows: &[(usize, usize)], n_max: usize) -> Vec<Vec<Vec<u64>>> {
    let mut a = vec![vec![0u64; objects]; objects];
    for &(s, t) in arrows {
        a[s][t] += 1;
    }
    let mut out = vec![a.clone()];
    for _ in 1..n_max {
        let last = out.last().unwrap();
        let next: Vec<Vec<u64>> = (0..objects)
            .map(|s| (0..objects).map(|t| (0..objects).map(|u| last[s][u] * a[u][t]).sum()).collect())
            .collect();
        out.push(next);
    }
    out
}
