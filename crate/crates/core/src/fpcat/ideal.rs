use std::collections::BTreeMap;

use super::presentation::{max_len, multiply, PathPoly, Quiver};
use crate::exactlin::EchelonBasis;

/// The relation ideal intersected with paths of length ≤ `bound`.
///
/// For length-homogeneous relations this is exactly `I ∩ P_{≤bound}`. Otherwise
/// it is the span of the shifted relators `p·r·q` of length ≤ `bound + slack`,
/// intersected with `P_{≤bound}`: a subspace of the true truncation, so every
/// dimension computed modulo it is an upper bound.
#[derive(Clone, Debug)]
pub struct IdealTruncation {
    basis: EchelonBasis<super::presentation::Path>,
    bound: usize,
    exact: bool,
}

impl IdealTruncation {
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    /// Normal form modulo the truncated ideal. Only meaningful for
    /// combinations of paths of length ≤ `bound`.
    pub fn normal_form(&self, p: &PathPoly) -> PathPoly {
        if self.basis.rank() == 0 {
            return p.clone();
        }
        self.basis.reduce(p)
    }

    pub fn contains(&self, p: &PathPoly) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Echelon basis rows grouped by the (source, target) pair they live in.
    pub fn blocks(&self) -> BTreeMap<(u32, u32), Vec<PathPoly>> {
        let mut out: BTreeMap<(u32, u32), Vec<PathPoly>> = BTreeMap::new();
        for row in self.basis.sorted_rows() {
            let (p, _) = row.leading().expect("echelon rows are nonzero");
            out.entry((p.source, p.target)).or_default().push(row.clone());
        }
        out
    }
}

/// Builds the truncated relation ideal up to path length `n`. `slack` is only
/// used when some relation is not length-homogeneous.
pub fn ideal_basis_up_to(q: &Quiver, n: usize, slack: usize) -> IdealTruncation {
    let exact = q.homogeneous;
    let horizon = if exact { n } else { n + slack };
    let mut basis: EchelonBasis<super::presentation::Path> = EchelonBasis::new();
    let mut fresh: Vec<PathPoly> = Vec::new();

    // J_m = span(relators of length ≤ m, G·J_{m-1}, J_{m-1}·G); only rows that
    // entered at step m-1 need to be multiplied again.
    for m in 1..=horizon {
        let mut candidates: Vec<PathPoly> = q.relations.iter().filter(|r| max_len(r) == m).cloned().collect();
        for row in &fresh {
            let (lead, _) = row.leading().expect("nonzero row");
            let (s, t) = (lead.source, lead.target);
            for a in q.arrows_into(s) {
                candidates.push(multiply(&PathPoly::unit(q.arrow_path(a)), row));
            }
            for a in q.arrows_from(t) {
                candidates.push(multiply(row, &PathPoly::unit(q.arrow_path(a))));
            }
        }
        fresh.clear();
        for c in candidates {
            if basis.insert(&c) {
                fresh.push(basis.rows().last().unwrap().clone());
            }
        }
    }

    if horizon > n {
        // Rows led by a path of length ≤ n span the intersection with P_{≤n}
        // because the order is length-graded.
        let mut truncated = EchelonBasis::new();
        for row in basis.rows().iter().filter(|r| max_len(r) <= n) {
            truncated.insert(row);
        }
        basis = truncated;
    }

    IdealTruncation { basis, bound: n, exact }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;
    use crate::fpcat::presentation::{Path, Presentation, Term};

    fn x_pow(k: usize) -> PathPoly {
        PathPoly::unit(Path {
            source: 0,
            target: 0,
            letters: vec![0; k],
        })
    }

    #[test]
    fn free_algebra_has_empty_ideal() {
        let q = Presentation::free_algebra(&["x", "y"]).compile().unwrap();
        assert_eq!(ideal_basis_up_to(&q, 6, 0).dim(), 0);
    }

    #[test]
    fn square_zero_relation() {
        let mut p = Presentation::free_algebra(&["x"]);
        p.relations.push(vec![Term::new(int(1), &["x", "x"])]);
        let ideal = ideal_basis_up_to(&p.compile().unwrap(), 3, 0);
        assert_eq!(ideal.dim(), 2);
        assert!(ideal.contains(&x_pow(2)));
        assert!(ideal.contains(&x_pow(3)));
        assert!(!ideal.contains(&x_pow(1)));
    }

    #[test]
    fn commutator_ideal_dimensions() {
        let mut p = Presentation::free_algebra(&["x", "y"]);
        p.relations
            .push(vec![Term::new(int(1), &["x", "y"]), Term::new(int(-1), &["y", "x"])]);
        let ideal = ideal_basis_up_to(&p.compile().unwrap(), 3, 0);
        let by_len = |l: usize| ideal.blocks()[&(0, 0)].iter().filter(|r| max_len(r) == l).count();
        assert_eq!(by_len(2), 1);
        // 8 words of length 3 against 4 commutative monomials
        assert_eq!(by_len(3), 4);
        assert_eq!(ideal.dim(), 5);
    }

    #[test]
    fn inhomogeneous_truncation_is_inside_the_ideal() {
        // x² = x: the true ideal contains x^k - x for every k ≥ 2.
        let mut p = Presentation::free_algebra(&["x"]);
        p.inhomogeneous = true;
        p.relations.push(vec![Term::new(int(1), &["x", "x"]), Term::new(int(-1), &["x"])]);
        let q = p.compile().unwrap();
        let tight = ideal_basis_up_to(&q, 3, 0);
        assert!(!tight.is_exact());
        let mut x3_minus_x = x_pow(3);
        x3_minus_x.add_term(
            Path {
                source: 0,
                target: 0,
                letters: vec![0],
            },
            int(-1),
        );
        assert!(tight.contains(&x3_minus_x));
        let loose = ideal_basis_up_to(&q, 3, 2);
        assert!(loose.dim() >= tight.dim());
    }
}
