mod common;

use algrowth::ainf::*;
use algrowth::exactlin::{int, Scalar};
use algrowth::fixtures::{random_filtered_dg, random_twisted_complex, rng};
use common::dense_rank;
use num_traits::Zero;
use rand::Rng;

/// `dim H = dim − 2 rank d` for a square-zero `d`.
fn dense_cohomology(h: &HomComplex) -> usize {
    let d = h.complex.differential();
    let n = d.n_rows();
    let mut m = vec![vec![Scalar::zero(); n]; n];
    for (i, j, x) in d.entries() {
        m[i][j] = x.clone();
    }
    let square = d.mul(d).unwrap();
    assert_eq!(square.nnz(), 0, "differential does not square to zero");
    n - 2 * dense_rank(m)
}

fn pool(seed: u64, c: &AInfCategory, levels: &[Scalar]) -> Vec<TwistedComplex> {
    let mut r = rng(seed ^ 0x7a1f);
    let mut out: Vec<TwistedComplex> = (0..2)
        .map(|_| {
            let m = r.random_range(2..=3);
            random_twisted_complex(&mut r, c, levels, m, &int(1_000))
        })
        .collect();
    out.push(TwistedComplex::single(0));
    out.push(TwistedComplex::cone_of_identity(c, 0).unwrap());
    out
}

#[test]
fn twisted_pools_satisfy_the_relations() {
    let mut with_delta = 0;
    for seed in 0..10 {
        let fx = random_filtered_dg(seed, 2, 2);
        let c = &fx.category;
        let complexes = pool(seed, c, &fx.levels);
        assert!(complexes.len() <= 4 && complexes.iter().all(|t| t.len() <= 3));
        with_delta += complexes.iter().filter(|t| t.delta.len() >= 2).count();
        let tw = TwCategory::new(c, complexes).unwrap();
        let report = check_ainf(&tw, 3).unwrap();
        assert!(report.is_ok(), "seed {seed}: {:?}", report.violations.first());
        assert!(report.checked > 0);
        assert!(check_strict_units(&tw, 3).unwrap().is_empty(), "seed {seed}");
    }
    assert!(with_delta > 0);
}

#[test]
fn cones_of_identities_are_acyclic() {
    for seed in 0..10 {
        let fx = random_filtered_dg(seed, 2, 2);
        let c = &fx.category;
        let complexes = pool(seed, c, &fx.levels);
        for o in 0..c.object_count() {
            let cone = TwistedComplex::cone_of_identity(c, o).unwrap();
            for t in &complexes {
                for h in [tw_hom_complex(c, &cone, t).unwrap(), tw_hom_complex(c, t, &cone).unwrap()] {
                    assert_eq!(dense_cohomology(&h), 0, "seed {seed} object {o}");
                    assert_eq!(h.complex.cohomology_dim(), 0);
                }
            }
        }
    }
}

#[test]
fn single_objects_recover_base_cohomology() {
    for seed in 0..10 {
        let fx = random_filtered_dg(seed, 2, 2);
        let c = &fx.category;
        for a in 0..c.object_count() {
            for b in 0..c.object_count() {
                let base = hom_complex(c, a, b).unwrap();
                let tw = tw_hom_complex(c, &TwistedComplex::single(a), &TwistedComplex::single(b)).unwrap();
                assert_eq!(dense_cohomology(&tw), dense_cohomology(&base), "seed {seed} ({a},{b})");
            }
        }
    }
}

#[test]
fn corrupted_products_are_caught() {
    let mut caught = 0;
    for seed in 0..10 {
        let fx = random_filtered_dg(seed, 2, 2);
        let c = &fx.category;
        let Some((inputs, value)) = c.table().iter().find(|(k, v)| k.len() == 2 && !v.is_zero() && c.degree(k[0]) != 0) else {
            continue;
        };
        let broken = c.with_entry(inputs.clone(), value.scaled(&int(-1))).unwrap();
        let report = check_ainf(&broken, 3).unwrap();
        assert!(!report.is_ok(), "seed {seed}");
        caught += 1;
    }
    assert!(caught >= 3);
}
