use serde::Serialize;

use super::category::{mu_linear, AInfStructure, Element, Memo};
use crate::error::Result;
use crate::exactlin::{sign, Scalar};
use crate::fpcat::parity;

/// Calls `f` on every composable basis tuple of length `d`, in lexicographic
/// id order. Stops early when `f` returns false.
pub(crate) fn for_each_tuple<C: AInfStructure + ?Sized>(c: &C, d: usize, f: &mut impl FnMut(&[usize]) -> bool) {
    let from: Vec<Vec<usize>> = (0..c.object_count()).map(|o| c.basis_from(o)).collect();
    let mut tuple = Vec::with_capacity(d);
    fn rec(
        from: &[Vec<usize>],
        targets: &dyn Fn(usize) -> usize,
        d: usize,
        t: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if t.len() == d {
            return f(t);
        }
        let next: &[usize] = match t.last() {
            Some(&b) => &from[targets(b)],
            None => return true,
        };
        for &b in next {
            t.push(b);
            let go = rec(from, targets, d, t, f);
            t.pop();
            if !go {
                return false;
            }
        }
        true
    }
    if d == 0 {
        return;
    }
    let target = |b: usize| c.target(b);
    for b in 0..c.basis_len() {
        tuple.push(b);
        let go = rec(&from, &target, d, &mut tuple, f);
        tuple.pop();
        if !go {
            return;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationViolation {
    pub inputs: Vec<String>,
    pub residual: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationReport {
    pub arity_bound: usize,
    pub checked: usize,
    /// Tuples skipped because some product left a truncated window.
    pub skipped: usize,
    pub violations: Vec<RelationViolation>,
}

impl RelationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn describe<C: AInfStructure + ?Sized>(c: &C, inputs: &[usize], residual: &Element) -> RelationViolation {
    RelationViolation {
        inputs: inputs.iter().map(|&b| c.basis_label(b)).collect(),
        residual: residual
            .iter()
            .map(|(&k, v)| (c.basis_label(k), crate::exactlin::format_scalar(v)))
            .collect(),
    }
}

/// `Σ (-1)^{✠_i} μ(x_1..x_i, μ^j(x_{i+1}..x_{i+j}), x_{i+j+1}..x_d)` with
/// `✠_i = Σ_{p ≤ i} (|x_p| - 1)`; `None` if a term is undefined.
pub fn relation_residual<C: AInfStructure + ?Sized>(c: &C, x: &[usize]) -> Result<Option<Element>> {
    let n = c.grading_modulus();
    let d = x.len();
    let k_max = c.max_arity();
    let units: Vec<Element> = x.iter().map(|&b| Element::unit(b)).collect();
    let mut total = Element::new();
    let mut dagger = 0i64;
    for i in 0..d {
        for j in 1..=d - i {
            if j > k_max || d - j + 1 > k_max {
                continue;
            }
            let Some(inner) = c.mu(&x[i..i + j]) else { return Ok(None) };
            if inner.is_zero() {
                continue;
            }
            let mut args: Vec<&Element> = units[..i].iter().collect();
            args.push(&inner);
            args.extend(&units[i + j..]);
            let Some(outer) = mu_linear(c, &args) else { return Ok(None) };
            total.add_scaled(&outer, &sign(dagger));
        }
        dagger += parity(n, c.degree(x[i]))? - 1;
    }
    Ok(Some(total))
}

/// Evaluates every A∞ relation of total arity ≤ `arity_bound` on every
/// composable basis tuple.
pub fn check_ainf<C: AInfStructure + ?Sized>(c: &C, arity_bound: usize) -> Result<RelationReport> {
    parity(c.grading_modulus(), 0)?;
    let c = &Memo::new(c);
    let mut report = RelationReport {
        arity_bound,
        checked: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    let mut failure = None;
    for d in 1..=arity_bound {
        for_each_tuple(c, d, &mut |x| match relation_residual(c, x) {
            Ok(Some(r)) => {
                report.checked += 1;
                if !r.is_zero() {
                    report.violations.push(describe(c, x, &r));
                }
                true
            }
            Ok(None) => {
                report.skipped += 1;
                true
            }
            Err(e) => {
                failure = Some(e);
                false
            }
        });
        if let Some(e) = failure.take() {
            return Err(e);
        }
    }
    Ok(report)
}

/// Strict unitality: `μ²(e, x) = x`, `μ²(x, e) = (-1)^{|x|} x`, `μ¹(e) = 0`
/// and `μ^k` vanishing on unit inputs for `3 ≤ k ≤ arity_bound`.
pub fn check_strict_units<C: AInfStructure + ?Sized>(c: &C, arity_bound: usize) -> Result<Vec<String>> {
    let n = c.grading_modulus();
    let mut out = Vec::new();
    for o in 0..c.object_count() {
        let Some(e) = c.unit(o) else {
            out.push(format!("object {} has no unit", c.object_label(o)));
            continue;
        };
        if mu_linear(c, &[&e]).is_some_and(|v| !v.is_zero()) {
            out.push(format!("μ¹ of the unit of {} is nonzero", c.object_label(o)));
        }
        for b in 0..c.basis_len() {
            let x = Element::unit(b);
            if c.source(b) == o {
                if let Some(v) = mu_linear(c, &[&e, &x]) {
                    if v != x {
                        out.push(format!("μ²(e_{}, {}) ≠ {}", c.object_label(o), c.basis_label(b), c.basis_label(b)));
                    }
                }
            }
            if c.target(b) == o {
                let expected = x.scaled(&sign(parity(n, c.degree(b))?));
                if let Some(v) = mu_linear(c, &[&x, &e]) {
                    if v != expected {
                        out.push(format!("μ²({}, e_{}) has the wrong sign", c.basis_label(b), c.object_label(o)));
                    }
                }
            }
        }
        for k in 3..=arity_bound.min(c.max_arity()) {
            for pos in 0..k {
                let mut bad = false;
                for_each_tuple(c, k - 1, &mut |t| {
                    let before = if pos == 0 { o } else { c.target(t[pos - 1]) };
                    let after = if pos == k - 1 { o } else { c.source(t[pos]) };
                    if before != o || after != o {
                        return true;
                    }
                    let units: Vec<Element> = t.iter().map(|&b| Element::unit(b)).collect();
                    let mut args: Vec<&Element> = units.iter().collect();
                    args.insert(pos, &e);
                    if mu_linear(c, &args).is_some_and(|v| !v.is_zero()) {
                        bad = true;
                        return false;
                    }
                    true
                });
                if bad {
                    out.push(format!(
                        "μ^{k} does not vanish with the unit of {} in slot {}",
                        c.object_label(o),
                        pos + 1
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// `(-1)^{|x|}` for a basis element.
pub(crate) fn degree_sign<C: AInfStructure + ?Sized>(c: &C, b: usize) -> Result<Scalar> {
    Ok(sign(parity(c.grading_modulus(), c.degree(b))?))
}
