//! Numeric criteria on filtered growth profiles: a polynomial-growth
//! consistency test against the dimension bound for affine varieties, and a
//! topological-entropy lower bound from the exponential growth rate.
//!
//! Both estimators take the maximum over the upper half of the grid (indices
//! `≥ len/2`), the finite-window stand-in for a limsup. The entropy bound uses
//! `(1/n) ln i(n)`: the growth *rate* of `i`, not `i(n)/n`, which would diverge
//! on every exponential profile.

use std::fmt;
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactlin::{format_scalar, int, ratio, Scalar};
use crate::filt::{scalar_to_f64, FilteredGrowthProfile};
use crate::fpcat::{classify_log_samples, Verdict};

/// Thresholds shared by both criteria.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundSettings {
    /// Entropy is certified only when the rate estimate exceeds this.
    pub rate_floor: Scalar,
    /// Added to `ambient_dim / 2` before comparing the degree estimate.
    pub poly_slack: Scalar,
}

impl Default for BoundSettings {
    fn default() -> Self {
        BoundSettings {
            rate_floor: ratio(1, 20),
            poly_slack: ratio(1, 4),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    AffineConsistency,
    EntropyLowerBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVerdict {
    ConsistentWithAffine,
    ExceedsPolynomialBound,
    PositiveEntropy,
    NoEntropyCertified,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::AffineConsistency => "affine-consistency",
            Criterion::EntropyLowerBound => "entropy-lower-bound",
        })
    }
}

impl fmt::Display for BoundVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundVerdict::ConsistentWithAffine => "consistent with affine",
            BoundVerdict::ExceedsPolynomialBound => "inconsistent: exceeds the polynomial bound",
            BoundVerdict::PositiveEntropy => "positive entropy certified by profile",
            BoundVerdict::NoEntropyCertified => "no positive entropy certified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// `source→target` of the profile.
    pub profile: String,
    pub criterion: Criterion,
    /// Degree estimate, or the rate estimate Γ̂; the exact rational value of
    /// the computed float.
    #[serde(serialize_with = "as_text")]
    pub estimate: Scalar,
    /// Γ̂ / max f for the entropy bound; equal to `estimate` otherwise.
    #[serde(serialize_with = "as_text")]
    pub bound: Scalar,
    #[serde(serialize_with = "as_text")]
    pub threshold: Scalar,
    pub verdict: BoundVerdict,
    /// First and last grid points of the upper half.
    pub window: (String, String),
    /// The profile vanished on the whole window.
    pub degenerate: bool,
    /// Growth class of the profile from the exponential/polynomial fit.
    pub growth: Verdict,
    pub settings: Vec<(String, String)>,
}

fn as_text<S: serde::Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&decimal(x))
}

/// Fixed six-digit decimal rendering, stable across platforms.
pub fn decimal(x: &Scalar) -> String {
    let scaled = (x * int(1_000_000)).round().to_integer();
    let neg = scaled < Zero::zero();
    let digits = scaled.magnitude().to_string();
    let padded = format!("{digits:0>7}");
    let (whole, frac) = padded.split_at(padded.len() - 6);
    format!("{}{whole}.{frac}", if neg { "-" } else { "" })
}

impl BoundReport {
    fn fields(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("profile".to_string(), self.profile.clone()),
            ("criterion".into(), self.criterion.to_string()),
            ("estimate".into(), decimal(&self.estimate)),
            ("bound".into(), decimal(&self.bound)),
            ("threshold".into(), decimal(&self.threshold)),
            ("verdict".into(), self.verdict.to_string()),
            ("window".into(), format!("{}..{}", self.window.0, self.window.1)),
            ("degenerate".into(), self.degenerate.to_string()),
            ("growth".into(), self.growth.to_string()),
        ];
        out.extend(self.settings.iter().cloned());
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("field\tvalue\n");
        for (k, v) in self.fields() {
            let _ = writeln!(s, "{k}\t{v}");
        }
        s
    }
}

fn exact(x: f64) -> Result<Scalar> {
    Scalar::from_float(x).ok_or_else(|| Error::Internal(format!("non-finite estimate {x}")))
}

fn upper_half(profile: &FilteredGrowthProfile) -> Result<std::ops::Range<usize>> {
    let n = profile.grid.len();
    if n == 0 || n != profile.values.len() {
        return Err(Error::Precondition("profile has no grid points".into()));
    }
    if profile.grid[0] <= int(0) {
        return Err(Error::Precondition("grid points must be positive".into()));
    }
    Ok(n / 2..n)
}

fn window(profile: &FilteredGrowthProfile, range: &std::ops::Range<usize>) -> (String, String) {
    (
        format_scalar(&profile.grid[range.start]),
        format_scalar(&profile.grid[range.end - 1]),
    )
}

/// Exponential/polynomial fit over the whole grid, which must be integral.
fn growth_class(profile: &FilteredGrowthProfile) -> Option<Verdict> {
    let mut samples = Vec::new();
    for (x, &v) in profile.grid.iter().zip(&profile.values) {
        if !x.is_integer() {
            return None;
        }
        if v > 0 {
            samples.push((x.to_integer().to_usize()?, (v as f64).ln()));
        }
    }
    let lo = profile.grid.first()?.to_integer().to_usize()?;
    let hi = profile.grid.last()?.to_integer().to_usize()?;
    Some(classify_log_samples(&samples, (lo, hi)).verdict)
}

fn profile_label(profile: &FilteredGrowthProfile) -> String {
    format!("{}→{}", profile.source, profile.target)
}

/// Estimates the degree `max ln i(n) / ln n` over the upper half of an
/// integer grid and compares it with `ambient_dim / 2 + slack`. Profiles the
/// growth fit calls exponential are always inconsistent.
pub fn affine_consistency(profile: &FilteredGrowthProfile, ambient_dim: u32, settings: &BoundSettings) -> Result<BoundReport> {
    if ambient_dim < 2 || !ambient_dim.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "ambient dimension {ambient_dim} must be even and at least 2"
        )));
    }
    let range = upper_half(profile)?;
    let growth = growth_class(profile).ok_or_else(|| Error::Precondition("the affine test needs a profile on an integer grid".into()))?;
    let mut best: Option<f64> = None;
    let mut usable = 0;
    for k in range.clone() {
        let n = scalar_to_f64(&profile.grid[k]);
        if n <= 1.0 {
            continue;
        }
        usable += 1;
        let v = profile.values[k];
        if v > 0 {
            let e = (v as f64).ln() / n.ln();
            best = Some(best.map_or(e, |b: f64| b.max(e)));
        }
    }
    if usable == 0 {
        return Err(Error::Precondition("the upper half of the grid has no point n ≥ 2".into()));
    }
    let degenerate = best.is_none();
    let estimate = exact(best.unwrap_or(0.0))?;
    let threshold = ratio(ambient_dim as i64, 2) + &settings.poly_slack;
    let verdict = if growth != Verdict::Exponential && estimate <= threshold {
        BoundVerdict::ConsistentWithAffine
    } else {
        BoundVerdict::ExceedsPolynomialBound
    };
    Ok(BoundReport {
        profile: profile_label(profile),
        criterion: Criterion::AffineConsistency,
        bound: estimate.clone(),
        estimate,
        threshold,
        verdict,
        window: window(profile, &range),
        degenerate,
        growth,
        settings: vec![
            ("ambient_dim".into(), ambient_dim.to_string()),
            ("poly_slack".into(), format_scalar(&settings.poly_slack)),
        ],
    })
}

/// `Γ̂ = max (1/x) ln i(x)` over the upper half of the grid, divided by
/// `max_f ≥ 1`. Positive entropy is certified iff `Γ̂` exceeds the rate floor.
pub fn entropy_lower_bound(profile: &FilteredGrowthProfile, max_f: &Scalar, settings: &BoundSettings) -> Result<BoundReport> {
    if *max_f < int(1) {
        return Err(Error::validation(format!("max f = {} must be at least 1", format_scalar(max_f))));
    }
    let range = upper_half(profile)?;
    let best = range
        .clone()
        .filter(|&k| profile.values[k] > 0)
        .map(|k| (profile.values[k] as f64).ln() / scalar_to_f64(&profile.grid[k]))
        .fold(None, |acc: Option<f64>, e| Some(acc.map_or(e, |b| b.max(e))));
    let degenerate = best.is_none();
    let estimate = exact(best.unwrap_or(0.0))?;
    let bound = &estimate / max_f;
    let verdict = if estimate > settings.rate_floor {
        BoundVerdict::PositiveEntropy
    } else {
        BoundVerdict::NoEntropyCertified
    };
    Ok(BoundReport {
        profile: profile_label(profile),
        criterion: Criterion::EntropyLowerBound,
        estimate,
        bound,
        threshold: settings.rate_floor.clone(),
        verdict,
        window: window(profile, &range),
        degenerate,
        growth: growth_class(profile).unwrap_or(Verdict::Inconclusive),
        settings: vec![
            ("max_f".into(), format_scalar(max_f)),
            ("rate_floor".into(), format_scalar(&settings.rate_floor)),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filt::integer_grid;

    fn profile(values: Vec<usize>) -> FilteredGrowthProfile {
        FilteredGrowthProfile::from_values("K", "L", integer_grid(values.len()), values).unwrap()
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&ratio(7, 20)), "0.350000");
        assert_eq!(decimal(&ratio(-1, 3)), "-0.333333");
        assert_eq!(decimal(&int(12)), "12.000000");
        assert_eq!(decimal(&ratio(1, 3_000_000)), "0.000000");
    }

    #[test]
    fn constant_profiles() {
        let s = BoundSettings::default();
        let ones = profile(vec![1; 10]);
        let a = affine_consistency(&ones, 6, &s).unwrap();
        assert_eq!(a.verdict, BoundVerdict::ConsistentWithAffine);
        assert_eq!(a.estimate, int(0));
        assert!(!a.degenerate);
        let e = entropy_lower_bound(&ones, &int(1), &s).unwrap();
        assert_eq!(e.bound, int(0));
        assert_eq!(e.verdict, BoundVerdict::NoEntropyCertified);

        let zeros = profile(vec![0; 10]);
        let a = affine_consistency(&zeros, 2, &s).unwrap();
        assert!(a.degenerate);
        assert_eq!(a.verdict, BoundVerdict::ConsistentWithAffine);
        assert!(entropy_lower_bound(&zeros, &int(1), &s).unwrap().degenerate);
    }

    #[test]
    fn preconditions() {
        let s = BoundSettings::default();
        let p = profile(vec![1, 2, 3]);
        assert!(matches!(affine_consistency(&p, 3, &s), Err(Error::Precondition(_))));
        assert!(matches!(affine_consistency(&p, 0, &s), Err(Error::Precondition(_))));
        assert!(matches!(entropy_lower_bound(&p, &ratio(1, 2), &s), Err(Error::Validation(_))));
        let half = FilteredGrowthProfile::from_values("K", "K", vec![ratio(1, 2), int(1)], vec![1, 2]).unwrap();
        assert!(affine_consistency(&half, 2, &s).is_err());
        assert!(entropy_lower_bound(&half, &int(1), &s).is_ok());
    }

    #[test]
    fn report_layout() {
        let r = entropy_lower_bound(&profile(vec![1, 2, 4, 8]), &int(2), &BoundSettings::default()).unwrap();
        let tsv = r.to_tsv();
        assert!(tsv.starts_with("field\tvalue\nprofile\tK→L\ncriterion\tentropy-lower-bound\n"));
        assert!(r.to_text().contains("window: 3..4\n"));
        assert!(r.to_text().contains("max_f: 2\n"));
    }
}
