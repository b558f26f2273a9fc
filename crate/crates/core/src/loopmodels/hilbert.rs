use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fpcat::{classify_log_samples, GrowthClassification};

/// `c_0, ..., c_N` with `c_j` the dimension in degree `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSeries {
    pub coefficients: Vec<BigUint>,
}

impl HilbertSeries {
    pub fn from_counts(counts: impl IntoIterator<Item = u64>) -> Self {
        HilbertSeries {
            coefficients: counts.into_iter().map(BigUint::from).collect(),
        }
    }

    /// `b_{≤n} = Σ_{j ≤ n} c_j`.
    pub fn partial_sums(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        self.coefficients
            .iter()
            .map(|c| {
                acc += c;
                acc.clone()
            })
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        index_value_tsv(&self.coefficients)
    }
}

/// Dimensions `l_1..l_N` of the free graded Lie algebra on generators of
/// the given degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittTable {
    pub degrees: Vec<u32>,
    /// `lie_dims[j - 1] = l_j`.
    pub lie_dims: Vec<BigUint>,
}

impl WittTable {
    pub fn l(&self, j: usize) -> &BigUint {
        &self.lie_dims[j - 1]
    }

    /// Rows start at index 1.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("index\tvalue\n");
        for (j, l) in self.lie_dims.iter().enumerate() {
            let _ = writeln!(s, "{}\t{}", j + 1, l);
        }
        s
    }
}

pub(crate) fn index_value_tsv<T: std::fmt::Display>(values: &[T]) -> String {
    let mut s = String::from("index\tvalue\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{i}\t{v}");
    }
    s
}

fn check_degrees(degrees: &[u32]) -> Result<()> {
    if degrees.is_empty() {
        return Err(Error::Precondition("at least one generator degree is required".into()));
    }
    if degrees.contains(&0) {
        return Err(Error::Precondition("generator of degree 0: the series is not defined".into()));
    }
    Ok(())
}

/// Coefficients of `1/(1 - Σ t^{d_i})` through degree `n_max`.
pub fn tensor_hilbert(degrees: &[u32], n_max: usize) -> Result<HilbertSeries> {
    check_degrees(degrees)?;
    let mut c: Vec<BigUint> = Vec::with_capacity(n_max + 1);
    c.push(BigUint::one());
    for j in 1..=n_max {
        let mut v = BigUint::zero();
        for &d in degrees {
            if let Some(i) = j.checked_sub(d as usize) {
                v += &c[i];
            }
        }
        c.push(v);
    }
    Ok(HilbertSeries { coefficients: c })
}

/// Multiplies `series` in place by `(1 + t^j)^l` (odd `j`) or
/// `(1 - t^j)^{-l}` (even `j`), truncated at its length.
fn apply_factor(series: &mut [BigInt], j: usize, l: &BigInt) {
    let n = series.len() - 1;
    let odd = j % 2 == 1;
    // Binomial weights along the powers t^{jk}.
    let mut weights = vec![BigInt::one()];
    let mut k = 1usize;
    while j * k <= n {
        let prev = &weights[k - 1];
        let kk = BigInt::from(k);
        let next = if odd {
            prev * (l - &kk + 1) / &kk
        } else {
            prev * (l + &kk - 1) / &kk
        };
        weights.push(next);
        k += 1;
    }
    for deg in (0..=n).rev() {
        let mut v = BigInt::zero();
        for (k, w) in weights.iter().enumerate() {
            if j * k > deg {
                break;
            }
            if !w.is_zero() {
                v += w * &series[deg - j * k];
            }
        }
        series[deg] = v;
    }
}

fn pbw_product(lie_dims: &[BigInt], n_max: usize) -> Vec<BigInt> {
    let mut series = vec![BigInt::zero(); n_max + 1];
    series[0] = BigInt::one();
    for (i, l) in lie_dims.iter().enumerate() {
        if !l.is_zero() {
            apply_factor(&mut series, i + 1, l);
        }
    }
    series
}

/// Solves `Π_{j odd}(1+t^j)^{l_j} · Π_{j even}(1-t^j)^{-l_j} = 1/(1 - Σ t^{d_i})`
/// degree by degree.
pub fn graded_witt_dims(degrees: &[u32], n_max: usize) -> Result<WittTable> {
    let target = tensor_hilbert(degrees, n_max)?;
    let mut series = vec![BigInt::zero(); n_max + 1];
    series[0] = BigInt::one();
    let mut lie_dims = Vec::with_capacity(n_max);
    for j in 1..=n_max {
        // Factors for degrees > j do not touch the coefficient of t^j.
        let l = BigInt::from(target.coefficients[j].clone()) - &series[j];
        if l.is_negative() {
            return Err(Error::Internal(format!("negative Lie dimension {l} in degree {j}")));
        }
        if !l.is_zero() {
            apply_factor(&mut series, j, &l);
        }
        lie_dims.push(l.to_biguint().expect("checked nonnegative"));
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    Ok(WittTable { degrees: sorted, lie_dims })
}

/// Rebuilds the product side from the Witt table and compares it with the
/// tensor algebra. Returns the first mismatching degree, if any.
pub fn pbw_check(degrees: &[u32], n_max: usize) -> Result<Option<usize>> {
    let table = graded_witt_dims(degrees, n_max)?;
    let target = tensor_hilbert(degrees, n_max)?;
    let lie: Vec<BigInt> = table.lie_dims.iter().cloned().map(BigInt::from).collect();
    let product = pbw_product(&lie, n_max);
    Ok(product
        .iter()
        .zip(&target.coefficients)
        .position(|(p, t)| *p != BigInt::from(t.clone())))
}

/// Classifies the partial sums `b_{≤n}` over `window` (indices are degrees).
pub fn rational_hyperbolicity(series: &HilbertSeries, window: (usize, usize)) -> Result<GrowthClassification> {
    let (lo, hi) = window;
    let n = series.coefficients.len().saturating_sub(1);
    if lo < 1 || hi > n || hi < lo + 4 {
        return Err(Error::Precondition(format!(
            "window {lo}..{hi} must lie in 1..{n} and span at least 4 steps"
        )));
    }
    let sums = series.partial_sums();
    let samples: Vec<(usize, f64)> = (lo..=hi)
        .filter(|&i| !sums[i].is_zero())
        .map(|i| (i, biguint_ln(&sums[i])))
        .collect();
    Ok(classify_log_samples(&samples, window))
}

/// `ln x` for a positive big integer, exact enough for fitting.
pub(crate) fn biguint_ln(x: &BigUint) -> f64 {
    match x.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => {
            let bits = x.bits();
            let shift = bits - 64;
            (x >> shift).to_f64().unwrap_or(f64::MAX).ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(s: &HilbertSeries) -> Vec<u64> {
        s.coefficients.iter().map(|c| c.to_u64().unwrap()).collect()
    }

    #[test]
    fn tensor_series_examples() {
        assert_eq!(counts(&tensor_hilbert(&[1, 1], 4).unwrap()), [1, 2, 4, 8, 16]);
        assert_eq!(counts(&tensor_hilbert(&[2], 4).unwrap()), [1, 0, 1, 0, 1]);
        assert_eq!(counts(&tensor_hilbert(&[1, 2], 4).unwrap()), [1, 1, 2, 3, 5]);
        assert!(matches!(tensor_hilbert(&[0, 1], 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_generators() {
        let even = graded_witt_dims(&[2], 10).unwrap();
        let l: Vec<u64> = even.lie_dims.iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(l, [0, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        let odd = graded_witt_dims(&[3], 5).unwrap();
        let l: Vec<u64> = odd.lie_dims.iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(l, [0, 0, 1, 0, 0]);
        // x² = [x, x]/2 survives in degree 6.
        assert_eq!(graded_witt_dims(&[3], 6).unwrap().l(6), &BigUint::from(1u32));
    }

    #[test]
    fn huge_values_have_finite_logs() {
        let big = BigUint::from(3u32).pow(2000);
        assert!((biguint_ln(&big) - 2000.0 * 3f64.ln()).abs() < 1e-6);
    }
}
