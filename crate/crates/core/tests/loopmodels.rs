mod common;

use common::closure_ball;

use algrowth::error::Error;
use algrowth::exactlin::int;
use algrowth::filt::{check_filtration_axiom, filtered_growth_profile, integer_grid};
use algrowth::fpcat::{classify_growth, GrowthTable, Verdict};
use algrowth::loopmodels::*;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small(v: &[BigUint]) -> Vec<u64> {
    v.iter().map(|x| x.to_u64().unwrap()).collect()
}

fn genus_two_relator() -> Vec<u8> {
    // a1 b1 A1 B1 a2 b2 A2 B2
    vec![0, 2, 1, 3, 4, 6, 5, 7]
}

/// Sphere sizes of the genus-2 surface group from the rational growth series
/// `(1 + 2t + 2t² + 2t³ + t⁴) / (1 - 6t - 6t² - 6t³ + t⁴)`.
fn genus_two_spheres(n: usize) -> Vec<i64> {
    let num = [1i64, 2, 2, 2, 1];
    let den = [1i64, -6, -6, -6, 1];
    let mut a = vec![0i64; n + 1];
    for i in 0..=n {
        let mut v = if i < num.len() { num[i] } else { 0 };
        for j in 1..den.len() {
            if i >= j {
                v -= den[j] * a[i - j];
            }
        }
        a[i] = v;
    }
    a
}

#[test]
fn tensor_series_and_hyperbolicity() {
    let s = tensor_hilbert(&[1, 1], 10).unwrap();
    assert_eq!(small(&s.coefficients), (0..=10).map(|j| 1u64 << j).collect::<Vec<_>>());
    let c = rational_hyperbolicity(&s, (1, 10)).unwrap();
    assert_eq!(c.verdict, Verdict::Exponential);
    assert!((c.rate_estimate - 2f64.ln()).abs() < 0.05);

    let poly = tensor_hilbert(&[2], 20).unwrap();
    let c = rational_hyperbolicity(&HilbertSeries::from_counts(vec![1; 21]), (1, 20)).unwrap();
    assert_eq!(c.verdict, Verdict::Polynomial);
    assert!(rational_hyperbolicity(&poly, (1, 20)).unwrap().verdict != Verdict::Exponential);

    let flat = HilbertSeries::from_counts([1, 0, 0, 0, 0, 0, 0, 0]);
    let c = rational_hyperbolicity(&flat, (1, 7)).unwrap();
    assert_eq!((c.verdict, c.rate_estimate), (Verdict::Polynomial, 0.0));
    assert!(rational_hyperbolicity(&flat, (1, 3)).is_err());
}

#[test]
fn witt_dims_for_two_odd_generators() {
    let t = graded_witt_dims(&[1, 1], 6).unwrap();
    assert_eq!(t.l(1), &BigUint::from(2u32));
    assert_eq!(t.l(2), &BigUint::from(3u32));
    assert!(t.to_tsv().starts_with("index\tvalue\n1\t2\n2\t3\n"));
}

fn mobius(n: u64) -> i64 {
    let (mut n, mut m, mut p) = (n, 1i64, 2u64);
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        -m
    } else {
        m
    }
}

#[test]
fn even_generators_follow_the_necklace_formula() {
    // With all generators in even degree 2 the graded Lie algebra is the
    // ordinary free Lie algebra, whose length-k part has Witt's dimension.
    for r in 1..=3u64 {
        let degrees = vec![2u32; r as usize];
        let t = graded_witt_dims(&degrees, 20).unwrap();
        for k in 1..=10u64 {
            let witt: i64 = (1..=k)
                .filter(|d| k % d == 0)
                .map(|d| mobius(d) * (r as i64).pow((k / d) as u32))
                .sum::<i64>()
                / k as i64;
            assert_eq!(t.l(2 * k as usize).to_i64().unwrap(), witt, "r={r} k={k}");
            assert_eq!(t.l(2 * k as usize - 1).to_i64().unwrap(), 0);
        }
    }
}

#[test]
fn pbw_round_trips_on_seeded_multisets() {
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let size = r.random_range(1..=6);
        let degrees: Vec<u32> = (0..size).map(|_| r.random_range(1..=6)).collect();
        assert_eq!(pbw_check(&degrees, 20).unwrap(), None, "{degrees:?}");
    }
    for degrees in [&[1, 1][..], &[1, 2, 3], &[2, 2, 4]] {
        assert_eq!(pbw_check(degrees, 20).unwrap(), None);
    }
}

#[test]
fn two_generators_always_grow_exponentially() {
    for a in 1..=4 {
        for b in a..=4 {
            let s = tensor_hilbert(&[a, b], 40).unwrap();
            assert_eq!(
                rational_hyperbolicity(&s, (8, 40)).unwrap().verdict,
                Verdict::Exponential,
                "{a},{b}"
            );
        }
    }
}

#[test]
fn free_group_balls() {
    assert_eq!(small(&free_group_ball(2, 3).unwrap().sizes), [1, 5, 17, 53]);
    assert_eq!(small(&free_group_ball(1, 5).unwrap().sizes), [1, 3, 5, 7, 9, 11]);
    assert!(matches!(free_group_ball(0, 3), Err(Error::Precondition(_))));
    let mut ball = GroupBall::new(GroupSpec::Free { rank: 2 }).unwrap();
    ball.grow_to(6).unwrap();
    assert_eq!(ball.sizes(), free_group_ball(2, 6).unwrap().sizes);
}

#[test]
fn genus_two_ball_matches_both_oracles() {
    let t = surface_group_ball(2, true, 7).unwrap();
    let b = small(&t.sizes);
    assert_eq!(&b[..3], [1, 9, 65]);
    let closure = closure_ball(4, &genus_two_relator(), 5);
    assert_eq!(&b[..6], closure.iter().map(|&x| x as u64).collect::<Vec<_>>());
    let spheres = genus_two_spheres(7);
    assert_eq!(small(&t.spheres()), spheres.iter().map(|&x| x as u64).collect::<Vec<_>>());

    let free = free_group_ball(4, 7).unwrap();
    assert!(t.sizes.iter().zip(&free.sizes).all(|(s, f)| s <= f));

    let table = GrowthTable::from_dims(b[1..].iter().map(|&x| x as usize).collect(), 8);
    assert_eq!(classify_growth(&table, (1, 6)).unwrap().verdict, Verdict::Exponential);
}

#[test]
fn non_orientable_genus_three_matches_closure() {
    // c1 c1 c2 c2 c3 c3
    let closure = closure_ball(3, &[0, 0, 2, 2, 4, 4], 7);
    let t = surface_group_ball(3, false, 7).unwrap();
    assert_eq!(small(&t.sizes), closure.iter().map(|&x| x as u64).collect::<Vec<_>>());
}

#[test]
fn genus_three_orientable_matches_closure() {
    let relator = [0, 2, 1, 3, 4, 6, 5, 7, 8, 10, 9, 11];
    let closure = closure_ball(6, &relator, 4);
    let t = surface_group_ball(3, true, 4).unwrap();
    assert_eq!(small(&t.sizes), closure.iter().map(|&x| x as u64).collect::<Vec<_>>());
}

#[test]
fn small_surfaces_are_rejected() {
    assert!(matches!(surface_group_ball(2, false, 3), Err(Error::Unsupported(_))));
    assert!(matches!(surface_group_ball(1, false, 3), Err(Error::Unsupported(_))));
    assert!(matches!(surface_group_ball(1, true, 3), Err(Error::Unsupported(_))));
}

#[test]
fn budget_overrun_keeps_complete_spheres() {
    let mut ball = GroupBall::with_budget(
        GroupSpec::Surface {
            genus: 2,
            orientable: true,
        },
        100,
    )
    .unwrap();
    let err = ball.grow_to(5).unwrap_err();
    assert!(matches!(&err, Error::Resource(m) if m.contains("partial sizes 1,9,65")), "{err}");
    assert_eq!(ball.radius(), 2);
    assert_eq!(small(&ball.sizes()), [1, 9, 65]);
}

#[test]
fn dehn_reduction_finds_relator_conjugates() {
    let p = Presentation::new(GroupSpec::Surface {
        genus: 2,
        orientable: true,
    })
    .unwrap();
    let r = genus_two_relator();
    assert!(p.dehn_reduce(&r).is_empty());
    // Conjugates and cyclic shifts of the relator are trivial too.
    let mut w = vec![2u8];
    w.extend(&r[3..]);
    w.extend(&r[..3]);
    w.push(3);
    assert!(p.dehn_reduce(&w).is_empty());
    // Five letters of the relator shorten to the inverse of the other three.
    assert_eq!(p.dehn_reduce(&r[..5]), [6, 5, 7].iter().rev().map(|&x| x ^ 1).collect::<Vec<u8>>());
    assert_eq!(p.word_name(&r[..4]), "a1b1A1B1");
}

#[test]
fn group_algebra_filtrations() {
    let mut free = GroupBall::new(GroupSpec::Free { rank: 2 }).unwrap();
    free.grow_to(6).unwrap();
    let (model, f) = group_algebra_as_filtered_category(&free).unwrap();
    let profile = filtered_growth_profile(&model, &f, 0, 0, &integer_grid(6)).unwrap();
    assert_eq!(
        profile.values,
        small(&free_group_ball(2, 6).unwrap().sizes[1..])
            .iter()
            .map(|&x| x as usize)
            .collect::<Vec<_>>()
    );
    assert!((profile.rate_estimate.unwrap() - 3f64.ln()).abs() < 0.1);
    assert_eq!(model.generators().len(), 4);

    let mut surface = GroupBall::new(GroupSpec::Surface {
        genus: 2,
        orientable: true,
    })
    .unwrap();
    surface.grow_to(3).unwrap();
    let (model, f) = group_algebra_as_filtered_category(&surface).unwrap();
    let report = check_filtration_axiom(&model, &f, 2).unwrap();
    assert!(report.is_ok());
    assert!(report.skipped > 0 && report.checked > 0);
    assert_eq!(f.level(model.generators()[0]), &int(1));

    let empty = GroupBall::new(GroupSpec::Free { rank: 1 }).unwrap();
    assert!(matches!(group_algebra_as_filtered_category(&empty), Err(Error::Precondition(_))));
}
