use serde::{Deserialize, Serialize};

use super::growth::GrowthTable;
use crate::error::{Error, Result};

/// Exponential fits with a slope below this are never called exponential.
pub const RATE_FLOOR: f64 = 0.05;

/// Largest allowed drift between the degree fitted on the whole window and on
/// its upper half, relative to `max(1, degree)`.
pub const DEGREE_DRIFT: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Exponential,
    Polynomial,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Exponential => "exponential",
            Verdict::Polynomial => "polynomial",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthClassification {
    pub verdict: Verdict,
    /// Exponential rate α (for exponential) or degree γ (otherwise).
    pub rate_estimate: f64,
    pub window: (usize, usize),
    pub zero_table: bool,
}

impl GrowthClassification {
    pub fn trailer(&self) -> String {
        format!(
            "# classification\t{}\trate={:.6}\twindow={}..{}{}",
            self.verdict,
            self.rate_estimate,
            self.window.0,
            self.window.1,
            if self.zero_table { "\tzero_table" } else { "" }
        )
    }
}

/// Least-squares line through `(x, y)`; returns (slope, intercept, SSE).
pub(crate) fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    Some((slope, intercept, sse))
}

/// Classifies a sequence given as `(n, ln value)` samples with `value > 0`;
/// indices in the window with value zero are simply absent.
pub fn classify_log_samples(samples: &[(usize, f64)], window: (usize, usize)) -> GrowthClassification {
    let (lo, hi) = window;
    let inside: Vec<(usize, f64)> = samples.iter().copied().filter(|&(n, _)| n >= lo && n <= hi).collect();
    if inside.is_empty() {
        return GrowthClassification {
            verdict: Verdict::Polynomial,
            rate_estimate: 0.0,
            window,
            zero_table: true,
        };
    }
    let exp_pts: Vec<(f64, f64)> = inside.iter().map(|&(n, y)| (n as f64, y)).collect();
    let poly_pts: Vec<(f64, f64)> = inside.iter().map(|&(n, y)| ((n as f64).ln(), y)).collect();
    let (Some((alpha, _, sse_exp)), Some((gamma, _, sse_poly))) = (least_squares(&exp_pts), least_squares(&poly_pts)) else {
        return GrowthClassification {
            verdict: Verdict::Inconclusive,
            rate_estimate: 0.0,
            window,
            zero_table: false,
        };
    };

    // Residuals that agree to rounding count as a tie, which goes to the
    // polynomial reading.
    let tol = 1e-9 * (1.0 + sse_exp.abs().max(sse_poly.abs()));
    if alpha >= RATE_FLOOR && sse_exp + tol < sse_poly {
        return GrowthClassification {
            verdict: Verdict::Exponential,
            rate_estimate: alpha,
            window,
            zero_table: false,
        };
    }

    let mid = lo + (hi - lo) / 2;
    let upper: Vec<(f64, f64)> = poly_pts.iter().zip(&inside).filter(|(_, s)| s.0 >= mid).map(|(p, _)| *p).collect();
    let stable = match least_squares(&upper) {
        Some((g_upper, _, _)) => (g_upper - gamma).abs() <= DEGREE_DRIFT * gamma.abs().max(1.0),
        None => false,
    };
    let verdict = if stable { Verdict::Polynomial } else { Verdict::Inconclusive };
    let gamma = if gamma.abs() < 1e-12 { 0.0 } else { gamma };
    GrowthClassification {
        verdict,
        rate_estimate: gamma,
        window,
        zero_table: false,
    }
}

/// Fits `ln d_n ≈ αn + β` and `ln d_n ≈ γ ln n + δ` over the window.
pub fn classify_growth(t: &GrowthTable, window: (usize, usize)) -> Result<GrowthClassification> {
    let (lo, hi) = window;
    if lo < 1 || hi > t.n_max() || hi < lo + 4 {
        return Err(Error::Precondition(format!(
            "window {lo}..{hi} must lie in 1..{} and span at least 4 steps",
            t.n_max()
        )));
    }
    let samples: Vec<(usize, f64)> = (lo..=hi).filter(|&n| t.d(n) > 0).map(|n| (n, (t.d(n) as f64).ln())).collect();
    Ok(classify_log_samples(&samples, window))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(f: impl Fn(usize) -> usize, n: usize) -> GrowthTable {
        GrowthTable::from_dims((1..=n).map(f).collect(), 2)
    }

    #[test]
    fn free_algebra_is_exponential() {
        let c = classify_growth(&table(|n| (1 << (n + 1)) - 2, 14), (4, 14)).unwrap();
        assert_eq!(c.verdict, Verdict::Exponential);
        assert!((c.rate_estimate - 2f64.ln()).abs() < 0.05);
    }

    #[test]
    fn quadratic_is_polynomial() {
        let c = classify_growth(&table(|n| n * n, 20), (4, 20)).unwrap();
        assert_eq!(c.verdict, Verdict::Polynomial);
        assert!((c.rate_estimate - 2.0).abs() < 0.1);
    }

    #[test]
    fn constant_and_zero_tables() {
        let c = classify_growth(&table(|_| 1, 10), (2, 10)).unwrap();
        assert_eq!(c.verdict, Verdict::Polynomial);
        assert_eq!(c.rate_estimate, 0.0);

        let z = classify_growth(&table(|_| 0, 10), (2, 10)).unwrap();
        assert_eq!(z.verdict, Verdict::Polynomial);
        assert!(z.zero_table);
    }

    #[test]
    fn window_preconditions() {
        let t = table(|n| n, 10);
        assert!(classify_growth(&t, (1, 4)).is_err());
        assert!(classify_growth(&t, (0, 8)).is_err());
        assert!(classify_growth(&t, (5, 11)).is_err());
    }
}
