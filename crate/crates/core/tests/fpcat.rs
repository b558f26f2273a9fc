mod common;

use algrowth::fixtures::{generator_sigma, random_presentation, random_retract_instance};
use algrowth::fpcat::*;
use common::{matrix_word_dims, path_counts, Block};
use num_bigint::BigUint;

fn read<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn block(cat: &LinCat, v: &Morphism) -> Block {
    let (s, t) = cat.block_of(v).expect("single-block morphism");
    let ids = cat.hom_basis(s, t);
    let (ds, dt) = (cat.hom_dim(s, s).isqrt(), cat.hom_dim(t, t).isqrt());
    let m = (0..ds).map(|i| (0..dt).map(|j| v.coeff(&ids[i * dt + j])).collect()).collect();
    Block { source: s, target: t, m }
}

#[test]
fn free_and_commutative_examples() {
    let sigma: SigmaSet = read("xy_sigma.json");
    let free = word_growth(&read("free2.json"), &sigma, 15).unwrap();
    let expected: Vec<usize> = (1..=15).map(|n| (1 << (n + 1)) - 2).collect();
    assert_eq!(free.dims, expected);
    let c = classify_growth(&free, (5, 15)).unwrap();
    assert_eq!(c.verdict, Verdict::Exponential);
    assert!((c.rate_estimate - 2f64.ln()).abs() < 0.05, "{}", c.rate_estimate);

    let comm = word_growth(&read("commutative2.json"), &sigma, 15).unwrap();
    let expected: Vec<usize> = (1..=15).map(|n| (n + 1) * (n + 2) / 2 - 1).collect();
    assert_eq!(comm.dims, expected);
    assert_eq!(classify_growth(&comm, (5, 15)).unwrap().verdict, Verdict::Polynomial);
}

#[test]
fn relation_free_quivers_count_paths() {
    let mut tried = 0;
    for seed in 0..60 {
        let p = random_presentation(seed, 4);
        if !p.relations.is_empty() {
            continue;
        }
        tried += 1;
        let index = |o: &str| p.objects.iter().position(|x| x == o).unwrap();
        let arrows: Vec<(usize, usize)> = p.generators.iter().map(|g| (index(&g.src), index(&g.tgt))).collect();
        let counts = path_counts(p.objects.len(), &arrows, 6);
        let table = word_growth(&p, &generator_sigma(&p), 6).unwrap();
        let mut total = 0;
        for n in 1..=6 {
            total += counts[n - 1].iter().flatten().sum::<u64>();
            assert_eq!(table.dims[n - 1] as u64, total, "seed {seed} n={n}");
        }
    }
    assert!(tried >= 5);
}

#[test]
fn category_to_object_bound_on_random_presentations() {
    for seed in 0..30 {
        let p = random_presentation(seed, 4);
        let quiver = p.compile().unwrap();
        let polys = quiver.resolve_sigma(&p, &generator_sigma(&p)).unwrap();
        let composer = QuotientComposer::new(&quiver, 8, 2);
        let rows = category_to_object_bound(&composer, &polys, &path_identities(&quiver), 8).unwrap();
        let objects = p.objects.len() as u32;
        let sigma_size = BigUint::from(polys.len() + p.objects.len());
        for row in &rows {
            let product: BigUint = row.per_object.iter().map(|&d| BigUint::from(d + 1)).product();
            let bound = product.pow(objects) * sigma_size.pow(objects - 1);
            assert_eq!(row.bound, bound, "seed {seed} n={}", row.n);
            assert!(BigUint::from(row.total) <= bound);
            assert!(row.holds);
        }
        if p.relations.is_empty() {
            // Identities plus every path of length 1..n.
            let index = |o: &str| p.objects.iter().position(|x| x == o).unwrap();
            let arrows: Vec<(usize, usize)> = p.generators.iter().map(|g| (index(&g.src), index(&g.tgt))).collect();
            let counts = path_counts(p.objects.len(), &arrows, 8);
            let mut total = p.objects.len() as u64;
            let mut loops = vec![1u64; p.objects.len()];
            for row in &rows {
                total += counts[row.n - 1].iter().flatten().sum::<u64>();
                for (o, l) in loops.iter_mut().enumerate() {
                    *l += counts[row.n - 1][o][o];
                }
                assert_eq!(row.total as u64, total, "seed {seed} n={}", row.n);
                assert_eq!(row.per_object.iter().map(|&d| d as u64).collect::<Vec<_>>(), loops);
            }
        }
    }
}

#[test]
fn retracts_preserve_growth() {
    for seed in 0..10 {
        let inst = random_retract_instance(seed);
        let report = retract_transport(&inst.category, &inst.sigma, &inst.retracts, 8).unwrap();
        assert!(report.equal, "seed {seed}");
        let original: Vec<Block> = inst.sigma.iter().map(|v| block(&inst.category, v)).collect();
        let moved: Vec<Block> = report.transported.iter().map(|v| block(&inst.category, v)).collect();
        let oracle = matrix_word_dims(&original, 8);
        assert_eq!(report.original.dims, oracle, "seed {seed}");
        assert_eq!(report.transported_table.dims, matrix_word_dims(&moved, 8), "seed {seed}");
        assert_eq!(report.transported_table.dims, oracle);
    }
}

#[test]
fn truncation_is_flagged_exact_for_homogeneous_relations() {
    let p: Presentation = read("commutative2.json");
    let quiver = p.compile().unwrap();
    assert!(QuotientComposer::new(&quiver, 6, 2).is_exact());
    let sigma = SigmaSet {
        elements: vec![MorphismExpr::word(&["x", "y"]), MorphismExpr::word(&["y", "x"])],
    };
    // xy = yx, so Σ spans one line and words in it are powers of xy.
    let t = word_growth(&p, &sigma, 4).unwrap();
    assert_eq!(t.dims, [1, 2, 3, 4]);
}
