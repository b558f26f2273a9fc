use serde::{Deserialize, Serialize};

use super::{tw_filtration, FiltrationAssignment, Persistence, PersistenceCache, ReportRow, VerificationReport};
use crate::ainf::{mu_linear, AInfCategory, AInfFile, AInfStructure, Cohomology, Element, TwCategory, TwistedComplex, TwistedComplexFile};
use crate::error::{Error, Result};
use crate::exactlin::{format_scalar, int, Scalar};
use crate::fpcat::span_growth;

struct GrowthCheck {
    report: VerificationReport,
    b: Scalar,
    words: Vec<usize>,
}

fn growth_check<C: AInfStructure + ?Sized>(
    c: &C,
    f: &FiltrationAssignment,
    sigma: &[Element],
    object: usize,
    n_max: usize,
) -> Result<GrowthCheck> {
    f.matches(c)?;
    if n_max == 0 {
        return Err(Error::Precondition("empty grid: n_max must be at least 1".into()));
    }
    if sigma.is_empty() {
        return Err(Error::Precondition("Σ is empty".into()));
    }
    if object >= c.object_count() {
        return Err(Error::Precondition(format!("object index {object} out of range")));
    }
    for (i, s) in sigma.iter().enumerate() {
        match mu_linear(c, &[s]) {
            Some(d) if d.is_zero() => {}
            Some(_) => return Err(Error::Precondition(format!("Σ element {i} is not a cocycle"))),
            None => return Err(Error::Precondition(format!("μ¹ of Σ element {i} leaves the window"))),
        }
    }
    let b = sigma
        .iter()
        .filter_map(|s| f.element_level(s))
        .max()
        .ok_or_else(|| Error::Precondition("every Σ element is zero".into()))?;

    let h = Cohomology::new(c)?;
    let classes = sigma.iter().map(|s| h.class_of(s)).collect::<Result<Vec<_>>>()?;
    let layers = span_growth(&h, &classes, n_max)?;
    if h.overflowed() {
        return Err(Error::Precondition(format!(
            "products of {n_max} Σ elements leave the computed window; lower n_max"
        )));
    }
    let words = layers.at_object(object as u32);

    let label = c.object_label(object);
    let mut report = VerificationReport::new(
        "growth-to-filtration",
        format!("{} Σ elements at {label}", sigma.len()),
        "i_{L,L}(nB) >= dim W_Σ(n; L)",
    );
    report.constant("B", format_scalar(&b));
    report.constant("n_max", n_max);
    let p = Persistence::new(c, f, object, object)?;
    for (n, &w) in (1..=n_max).zip(&words) {
        let x = &b * int(n as i64);
        let i = p.dim_at(&x)?;
        report.push(ReportRow {
            x: format!("n={n} nB={}", format_scalar(&x)),
            lhs: i.to_string(),
            rhs: w.to_string(),
            witness: None,
            holds: i >= w,
        });
    }
    Ok(GrowthCheck { report, b, words })
}

/// For cocycles Σ with `B` their largest level, checks
/// `i_{L,L,Φ}(nB) ≥ dim W_Σ(n; L)` for `n = 1..=n_max`, the right side computed
/// in the cohomology category.
pub fn verify_growth_to_filtration<C: AInfStructure + ?Sized>(
    c: &C,
    f: &FiltrationAssignment,
    sigma: &[Element],
    object: usize,
    n_max: usize,
) -> Result<VerificationReport> {
    Ok(growth_check(c, f, sigma, object, n_max)?.report)
}

struct PairBound {
    q_dim: usize,
    best: usize,
    pair: (usize, usize),
}

fn pair_bounds<C: AInfStructure + ?Sized>(
    c: &C,
    f: &FiltrationAssignment,
    q: &TwistedComplex,
    c_val: &Scalar,
    grid: &[Scalar],
) -> Result<Vec<PairBound>> {
    if grid.is_empty() {
        return Err(Error::Precondition("empty grid".into()));
    }
    if q.is_empty() {
        return Err(Error::Precondition("twisted complex has no summands".into()));
    }
    let tw = TwCategory::new(c, vec![q.clone()])?;
    let tf = tw_filtration(&tw, f, c_val)?;
    let pq = Persistence::new(&tw, &tf, 0, 0)?;
    let m = q.len();
    let shift = c_val * int(m as i64 - 1);
    let mut base = PersistenceCache::new(c, f);
    let mut out = Vec::with_capacity(grid.len());
    for x in grid {
        let q_dim = pq.dim_at(x)?;
        let y = x + &shift;
        let mut best = (0, (0, 0));
        for j in 0..m {
            for k in 0..m {
                let (kj, kk) = (q.summands[j].object, q.summands[k].object);
                let v = base.dim_at(kj, kk, &y)?;
                if v > best.0 {
                    best = (v, (j, k));
                }
            }
        }
        out.push(PairBound {
            q_dim,
            best: best.0,
            pair: best.1,
        });
    }
    Ok(out)
}

fn pair_label<C: AInfStructure + ?Sized>(c: &C, q: &TwistedComplex, (j, k): (usize, usize)) -> String {
    format!(
        "({j},{k}) {}→{}",
        c.object_label(q.summands[j].object),
        c.object_label(q.summands[k].object)
    )
}

/// For an admissible complex `Q` with `m` summands, checks at every grid point
/// that some pair of summands satisfies
/// `2^{m+1} · i_{K_j,K_k,Φ}(x + (m-1)c) ≥ i_{Q,Q,Φ_c}(x)`, and records the
/// tightest ratio observed.
pub fn verify_tw_generator_bound<C: AInfStructure + ?Sized>(
    c: &C,
    f: &FiltrationAssignment,
    q: &TwistedComplex,
    c_val: &Scalar,
    grid: &[Scalar],
) -> Result<VerificationReport> {
    let rows = pair_bounds(c, f, q, c_val, grid)?;
    let m = q.len();
    let factor = 1usize << (m + 1);
    let mut report = VerificationReport::new(
        "tw-generator-bound",
        format!("{m}-summand complex at threshold {}", format_scalar(c_val)),
        "2^{m+1} i_{K_j,K_k}(x+(m-1)c) >= i_{Q,Q}(x) for some (j,k)",
    );
    report.constant("m", m);
    report.constant("c", format_scalar(c_val));
    report.constant("bound", format!("1/{factor}"));
    let mut tightest: Option<Scalar> = None;
    for (x, r) in grid.iter().zip(&rows) {
        if r.q_dim > 0 {
            let ratio = Scalar::new(r.best.into(), r.q_dim.into());
            if tightest.as_ref().is_none_or(|t| ratio < *t) {
                tightest = Some(ratio);
            }
        }
        report.push(ReportRow {
            x: format_scalar(x),
            lhs: format!("{factor}*{}", r.best),
            rhs: r.q_dim.to_string(),
            witness: Some(pair_label(c, q, r.pair)),
            holds: factor * r.best >= r.q_dim,
        });
    }
    report.constant("tightest", tightest.map_or("-".into(), |t| format_scalar(&t)));
    Ok(report)
}

/// Self-contained input of a generator-bound check, written out when a check
/// fails so it can be rerun from the file alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBoundInstance {
    pub category: AInfFile,
    pub complex: TwistedComplexFile,
    #[serde(with = "crate::serde_scalar")]
    pub threshold: Scalar,
    #[serde(with = "crate::serde_scalar::vec")]
    pub grid: Vec<Scalar>,
}

impl GeneratorBoundInstance {
    pub fn new(c: &AInfCategory, f: &FiltrationAssignment, q: &TwistedComplex, threshold: Scalar, grid: Vec<Scalar>) -> Self {
        GeneratorBoundInstance {
            category: c.to_file(Some(f.levels())),
            complex: q.to_file(c),
            threshold,
            grid,
        }
    }

    pub fn run(&self) -> Result<VerificationReport> {
        let (c, levels) = self.category.build()?;
        let levels = levels.ok_or_else(|| Error::validation("instance category carries no levels"))?;
        let q = self.complex.resolve(&c)?;
        verify_tw_generator_bound(&c, &FiltrationAssignment::new(levels), &q, &self.threshold, &self.grid)
    }
}

/// Σ inside a pool of admissible twisted complexes: elements are
/// combinations of basis ids of the pool's `TwCategory`.
#[derive(Clone, Debug)]
pub struct TwSigma {
    pub complexes: Vec<TwistedComplex>,
    pub threshold: Scalar,
    pub sigma: Vec<Element>,
    /// Index of the complex whose endomorphisms are measured.
    pub object: usize,
}

/// Chains the two checks: `dim W_Σ(n; P) ≤ i_{P,P,Φ_c}(nB)` in the twisted
/// pool, then `i_{P,P,Φ_c}(nB) ≤ 2^{m+1} i_{K_j,K_k,Φ}(nB + (m-1)c)` in the
/// base, exhibiting a base pair whose persistence dominates the word growth.
pub fn tw_pipeline<C: AInfStructure + ?Sized>(
    c: &C,
    f: &FiltrationAssignment,
    input: &TwSigma,
    n_max: usize,
) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(Error::Precondition("empty grid: n_max must be at least 1".into()));
    }
    let tw = TwCategory::new(c, input.complexes.clone())?;
    let tf = tw_filtration(&tw, f, &input.threshold)?;
    let growth = growth_check(&tw, &tf, &input.sigma, input.object, n_max)?;
    let q = &input.complexes[input.object];
    let grid: Vec<Scalar> = (1..=n_max).map(|n| &growth.b * int(n as i64)).collect();
    let pairs = pair_bounds(c, f, q, &input.threshold, &grid)?;
    let m = q.len();
    let factor = 1usize << (m + 1);

    let mut report = VerificationReport::new(
        "tw-pipeline",
        format!(
            "{} Σ elements at complex {} of a pool of {}",
            input.sigma.len(),
            input.object,
            input.complexes.len()
        ),
        "2^{m+1} i_{K_j,K_k}(nB+(m-1)c) >= i_{P,P}(nB) >= dim W_Σ(n; P)",
    );
    report.constant("B", format_scalar(&growth.b));
    report.constant("m", m);
    report.constant("c", format_scalar(&input.threshold));
    report.constant("growth_check", if growth.report.pass { "pass" } else { "fail" });
    for (n, (r, &w)) in pairs.iter().zip(&growth.words).enumerate() {
        let middle = r.q_dim;
        report.push(ReportRow {
            x: format!("n={}", n + 1),
            lhs: format!("{factor}*{}", r.best),
            rhs: format!("{middle} >= {w}"),
            witness: Some(pair_label(c, q, r.pair)),
            holds: factor * r.best >= middle && middle >= w,
        });
    }
    let last = pairs.last().expect("grid is nonempty");
    report.constant("pair", pair_label(c, q, last.pair));
    report.pass &= growth.report.pass;
    Ok(report)
}
