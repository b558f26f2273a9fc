use algrowth::bounds::*;
use algrowth::exactlin::{int, ratio, Scalar};
use algrowth::filt::{integer_grid, FilteredGrowthProfile};
use algrowth::fpcat::Verdict;
use algrowth::loopmodels::surface_group_ball;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn profile(values: Vec<usize>) -> FilteredGrowthProfile {
    FilteredGrowthProfile::from_values("K", "L", integer_grid(values.len()), values).unwrap()
}

fn f(x: &Scalar) -> f64 {
    x.to_f64().unwrap()
}

fn suite_profiles() -> Vec<FilteredGrowthProfile> {
    let mut out = vec![
        profile((1..=30).map(|n| n * n * n).collect()),
        profile((1..=30).map(|n| 1 << n).collect()),
        profile((1..=40).map(|n| (0.7 * n as f64).exp().ceil() as usize).collect()),
        profile((1..=20).map(|n| (1 << (n + 1)) - 2).collect()),
        profile(vec![1; 12]),
        profile(vec![0; 12]),
        profile((1..=25).collect()),
    ];
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let base: f64 = r.random_range(1.05..2.5);
        let deg = r.random_range(0..5);
        let len = r.random_range(8..30);
        out.push(profile((1..=len).map(|n| base.powi(n as i32).ceil() as usize).collect()));
        out.push(profile((1..=len).map(|n: usize| n.pow(deg) + r.random_range(0..3)).collect()));
    }
    out
}

#[test]
fn exponential_example_rate() {
    let s = BoundSettings::default();
    let values: Vec<usize> = (1..=40).map(|n| (0.7 * n as f64).exp().ceil() as usize).collect();
    // Independent evaluation of max_{21 ≤ n ≤ 40} ln(i(n))/n.
    let direct = (21..=40).map(|n| (values[n - 1] as f64).ln() / n as f64).fold(f64::MIN, f64::max);
    let r = entropy_lower_bound(&profile(values), &int(2), &s).unwrap();
    assert!((f(&r.bound) - direct / 2.0).abs() < 1e-12);
    assert!((f(&r.bound) - 0.35).abs() < 0.02, "{}", r.to_text());
    assert_eq!(r.verdict, BoundVerdict::PositiveEntropy);
    assert_eq!(r.window, ("21".into(), "40".into()));
}

#[test]
fn affine_examples() {
    let s = BoundSettings::default();
    let cubic = affine_consistency(&cubic_profile(), 6, &s).unwrap();
    assert_eq!(cubic.verdict, BoundVerdict::ConsistentWithAffine);
    assert!((f(&cubic.estimate) - 3.0).abs() < 1e-9);
    assert_eq!(cubic.threshold, ratio(13, 4));
    // The same cubic exceeds the bound for a 4-dimensional ambient space.
    assert_eq!(
        affine_consistency(&cubic_profile(), 4, &s).unwrap().verdict,
        BoundVerdict::ExceedsPolynomialBound
    );

    let exp = affine_consistency(&profile((1..=30).map(|n| 1 << n).collect()), 6, &s).unwrap();
    assert_eq!(exp.verdict, BoundVerdict::ExceedsPolynomialBound);
    assert_eq!(exp.growth, Verdict::Exponential);
    // Exponential with a tiny log-ratio on a short window is still refused.
    let slow = profile((1..=12).map(|n| 1 << n).collect());
    assert_eq!(
        affine_consistency(&slow, 20, &s).unwrap().verdict,
        BoundVerdict::ExceedsPolynomialBound
    );
}

fn cubic_profile() -> FilteredGrowthProfile {
    profile((1..=30).map(|n| n * n * n).collect())
}

#[test]
fn scaling_is_exact() {
    let s = BoundSettings::default();
    for p in suite_profiles() {
        for (m, lambda) in [(int(1), int(3)), (ratio(3, 2), int(2)), (int(2), ratio(7, 5))] {
            let a = entropy_lower_bound(&p, &m, &s).unwrap();
            let b = entropy_lower_bound(&p, &(&m * &lambda), &s).unwrap();
            assert_eq!(&b.bound * &lambda, a.bound);
        }
    }
}

#[test]
fn larger_profiles_never_lower_the_bound() {
    let s = BoundSettings::default();
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for p in suite_profiles() {
        let bigger: Vec<usize> = p.values.iter().map(|&v| v + r.random_range(0..=v.max(2))).collect();
        let q = profile(bigger);
        let a = entropy_lower_bound(&p, &int(1), &s).unwrap();
        let b = entropy_lower_bound(&q, &int(1), &s).unwrap();
        assert!(b.bound >= a.bound, "{:?} vs {:?}", p.values, q.values);
    }
}

#[test]
fn exponential_profiles_are_never_affine_consistent() {
    let s = BoundSettings::default();
    let mut exponential = 0;
    for p in suite_profiles() {
        for dim in [2, 6, 12] {
            let r = affine_consistency(&p, dim, &s).unwrap();
            if r.growth == Verdict::Exponential {
                exponential += 1;
                assert_eq!(r.verdict, BoundVerdict::ExceedsPolynomialBound, "{:?}", p.values);
            }
        }
    }
    assert!(exponential > 10);
}

#[test]
fn surface_profile_rate() {
    let ball = surface_group_ball(2, true, 7).unwrap();
    let b: Vec<f64> = ball.sizes.iter().map(|x| x.to_f64().unwrap()).collect();
    let spheres: Vec<f64> = b.iter().enumerate().map(|(n, x)| if n == 0 { *x } else { x - b[n - 1] }).collect();
    let asymptotic = (spheres[7] / spheres[6]).ln();
    let p = FilteredGrowthProfile::from_values("pt", "pt", vec![int(7)], vec![b[7] as usize]).unwrap();
    let r = entropy_lower_bound(&p, &int(1), &BoundSettings::default()).unwrap();
    assert!((f(&r.bound) - asymptotic).abs() < 0.05, "{} vs {asymptotic}", f(&r.bound));
    assert_eq!(r.verdict, BoundVerdict::PositiveEntropy);
}
