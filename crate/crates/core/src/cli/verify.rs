//! The `verify` command: seeded or file-driven machine checks, each producing
//! a [`VerificationReport`]. Seeded jobs are first turned into the same
//! instance type a file would give, so a failure record replays through
//! exactly the code path that produced it.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::input::parse_json;
use crate::ainf::{
    check_ainf, mu_linear, tw_hom_complex, AInfCategory, AInfFile, AInfStructure, Element, OutTerm, TwCategory, TwistedComplex,
    TwistedComplexFile,
};
use crate::error::{Error, Result};
use crate::exactlin::{int, ratio, Scalar};
use crate::filt::{
    check_filtration_axiom, tw_filtration, tw_pipeline, verify_growth_to_filtration, FiltrationAssignment, GeneratorBoundInstance,
    ReportRow, TwSigma, VerificationReport,
};
use crate::fixtures::{
    generator_sigma, random_admissible_instance, random_filtered_dg, random_presentation, random_retract_instance, random_twisted_complex,
    rng,
};
use crate::fpcat::{category_to_object_bound, path_identities, retract_transport, Presentation, QuotientComposer, SigmaSet};
use crate::loopmodels::{group_algebra_as_filtered_category, GroupBall, GroupSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Check {
    FiltrationAxiom,
    GrowthToFiltration,
    TwGeneratorBound,
    TwPipeline,
    TwAinf,
    Retract,
    CategoryToObject,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::FiltrationAxiom => "filtration-axiom",
            Check::GrowthToFiltration => "growth-to-filtration",
            Check::TwGeneratorBound => "tw-generator-bound",
            Check::TwPipeline => "tw-pipeline",
            Check::TwAinf => "tw-ainf",
            Check::Retract => "retract",
            Check::CategoryToObject => "category-to-object",
        }
    }
}

/// Where the instances of a verify job come from.
#[derive(Clone, Debug)]
pub enum Source {
    File { label: String, text: String },
    Seeds { first: u64, count: u64 },
    Group { spec: String, radius: usize },
}

/// A finished check and, on failure, the record to replay it from.
pub struct Checked {
    pub report: VerificationReport,
    pub replay: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SeedOnly {
    seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupInstance {
    group: String,
    radius: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrowthInstance {
    category: AInfFile,
    sigma: Vec<Vec<OutTerm>>,
    object: String,
    n_max: usize,
}

/// One term of an element of `hom(P, P)` in a twisted pool: base element
/// `id` in block `(i, j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TwTerm {
    #[serde(with = "crate::serde_scalar")]
    coeff: Scalar,
    i: usize,
    j: usize,
    id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineInstance {
    category: AInfFile,
    complexes: Vec<TwistedComplexFile>,
    #[serde(with = "crate::serde_scalar")]
    threshold: Scalar,
    sigma: Vec<Vec<TwTerm>>,
    object: usize,
    n_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwAinfInstance {
    category: AInfFile,
    #[serde(default)]
    complexes: Vec<TwistedComplexFile>,
    #[serde(default = "default_arity")]
    arity: usize,
}

fn default_arity() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecompositionInstance {
    presentation: Presentation,
    sigma: SigmaSet,
    n_max: usize,
}

fn has_key(text: &str, key: &str) -> bool {
    serde_json::from_str::<Value>(text).is_ok_and(|v| v.get(key).is_some())
}

fn seed_only(text: &str) -> Option<u64> {
    serde_json::from_str::<SeedOnly>(text).ok().map(|s| s.seed)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("instances serialize")
}

fn levelled(file: &AInfFile) -> Result<(AInfCategory, FiltrationAssignment)> {
    let (c, levels) = file.build()?;
    let levels = levels.ok_or_else(|| Error::validation("every basis element needs a level"))?;
    Ok((c, FiltrationAssignment::new(levels)))
}

fn terms_of<C: AInfStructure + ?Sized>(c: &C, v: &Element) -> Vec<OutTerm> {
    v.iter()
        .map(|(&k, x)| OutTerm {
            coeff: x.clone(),
            id: c.basis_label(k),
        })
        .collect()
}

fn element_of(c: &AInfCategory, terms: &[OutTerm]) -> Result<Element> {
    let mut v = Element::new();
    for t in terms {
        v.add_term(c.basis_index(&t.id)?, t.coeff.clone());
    }
    Ok(v)
}

pub fn parse_group(spec: &str) -> Result<GroupSpec> {
    let bad = || Error::validation(format!("group {spec:?}: expected free:R, surface:G or nonorientable:G"));
    let (kind, n) = spec.split_once(':').ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    match kind {
        "free" => Ok(GroupSpec::Free { rank: n }),
        "surface" => Ok(GroupSpec::Surface {
            genus: n,
            orientable: true,
        }),
        "nonorientable" => Ok(GroupSpec::Surface {
            genus: n,
            orientable: false,
        }),
        _ => Err(bad()),
    }
}

fn group_ball(g: &GroupInstance) -> Result<GroupBall> {
    let mut ball = GroupBall::new(parse_group(&g.group)?)?;
    ball.grow_to(g.radius)?;
    Ok(ball)
}

/// Runs `check` on every instance of `source`.
pub fn run(check: Check, source: &Source, arity: usize) -> Result<Vec<Checked>> {
    match source {
        Source::Seeds { first, count } => (*first..first + count).map(|seed| run_seed(check, seed, arity)).collect(),
        Source::File { label, text } => Ok(vec![run_file(check, label, text, arity)?]),
        Source::Group { spec, radius } => {
            let g = GroupInstance {
                group: spec.clone(),
                radius: *radius,
            };
            let report = match check {
                Check::FiltrationAxiom => group_filtration(&g, arity)?,
                Check::GrowthToFiltration => group_growth(&g)?,
                _ => return Err(Error::validation(format!("{} has no group fixture", check.name()))),
            };
            Ok(vec![finish(report, to_value(&g))])
        }
    }
}

fn finish(report: VerificationReport, instance: Value) -> Checked {
    let replay = (!report.pass).then_some(instance);
    Checked { report, replay }
}

fn run_file(check: Check, label: &str, text: &str, arity: usize) -> Result<Checked> {
    if let Some(seed) = seed_only(text) {
        return run_seed(check, seed, arity);
    }
    let mut checked = match check {
        Check::FiltrationAxiom if has_key(text, "group") => {
            let g: GroupInstance = parse_json(text)?;
            finish(group_filtration(&g, arity)?, to_value(&g))
        }
        Check::FiltrationAxiom => {
            let file: AInfFile = parse_json(text)?;
            finish(filtration(&file, arity)?, to_value(&file))
        }
        Check::GrowthToFiltration if has_key(text, "group") => {
            let g: GroupInstance = parse_json(text)?;
            finish(group_growth(&g)?, to_value(&g))
        }
        Check::GrowthToFiltration => {
            let inst: GrowthInstance = parse_json(text)?;
            finish(growth(&inst)?, to_value(&inst))
        }
        Check::TwGeneratorBound => {
            let inst: GeneratorBoundInstance = parse_json(text)?;
            finish(inst.run()?, to_value(&inst))
        }
        Check::TwPipeline => {
            let inst: PipelineInstance = parse_json(text)?;
            finish(pipeline(&inst)?, to_value(&inst))
        }
        Check::TwAinf => {
            let inst: TwAinfInstance = if has_key(text, "category") {
                parse_json(text)?
            } else {
                TwAinfInstance {
                    category: parse_json(text)?,
                    complexes: Vec::new(),
                    arity,
                }
            };
            finish(tw_ainf(&inst)?, to_value(&inst))
        }
        Check::CategoryToObject => {
            let inst: DecompositionInstance = parse_json(text)?;
            finish(decomposition(&inst)?, to_value(&inst))
        }
        Check::Retract => {
            return Err(Error::validation("retract instances are given as {\"seed\": N}"));
        }
    };
    checked.report.instance = format!("{label}: {}", checked.report.instance);
    Ok(checked)
}

fn run_seed(check: Check, seed: u64, arity: usize) -> Result<Checked> {
    let mut checked = match check {
        Check::FiltrationAxiom => {
            let fx = random_filtered_dg(seed, 3, 3);
            let file = fx.category.to_file(Some(&fx.levels));
            finish(filtration(&file, arity)?, to_value(&file))
        }
        Check::GrowthToFiltration => {
            let inst = seeded_growth(seed);
            finish(growth(&inst)?, to_value(&inst))
        }
        Check::TwGeneratorBound => {
            let inst = random_admissible_instance(seed, 4);
            let grid: Vec<Scalar> = (0..=12).map(|k| ratio(k, 2)).collect();
            let f = FiltrationAssignment::new(inst.fixture.levels.clone());
            let g = GeneratorBoundInstance::new(&inst.fixture.category, &f, &inst.complex, inst.threshold, grid);
            finish(g.run()?, to_value(&g))
        }
        Check::TwPipeline => {
            let inst = seeded_pipeline(seed)?;
            finish(pipeline(&inst)?, to_value(&inst))
        }
        Check::TwAinf => {
            let inst = seeded_tw_ainf(seed, arity);
            finish(tw_ainf(&inst)?, to_value(&inst))
        }
        Check::Retract => finish(retract(seed)?, to_value(&SeedOnly { seed })),
        Check::CategoryToObject => {
            let p = random_presentation(seed, 4);
            let inst = DecompositionInstance {
                sigma: generator_sigma(&p),
                presentation: p,
                n_max: 6,
            };
            finish(decomposition(&inst)?, to_value(&inst))
        }
    };
    checked.report.constants.insert(0, ("seed".into(), seed.to_string()));
    Ok(checked)
}

fn axiom_report<C: AInfStructure + ?Sized>(c: &C, f: &FiltrationAssignment, arity: usize, instance: String) -> Result<VerificationReport> {
    let r = check_filtration_axiom(c, f, arity)?;
    let mut report = VerificationReport::new("filtration-axiom", instance, "level(μ^k(x_1..x_k)) <= Σ level(x_i)");
    report.constant("arity", arity);
    report.constant("checked", r.checked);
    report.constant("skipped", r.skipped);
    for v in &r.violations {
        report.push(ReportRow {
            x: v.inputs.join(","),
            lhs: v.bound.clone(),
            rhs: v.level.clone(),
            witness: Some(v.output.clone()),
            holds: false,
        });
    }
    Ok(report)
}

fn filtration(file: &AInfFile, arity: usize) -> Result<VerificationReport> {
    let (c, f) = levelled(file)?;
    let label = format!("{} objects, {} basis elements", c.object_count(), c.basis_len());
    axiom_report(&c, &f, arity, label)
}

fn group_filtration(g: &GroupInstance, arity: usize) -> Result<VerificationReport> {
    let ball = group_ball(g)?;
    let (model, f) = group_algebra_as_filtered_category(&ball)?;
    axiom_report(
        &model,
        &f,
        arity.min(2),
        format!("group algebra of {} on the radius {} ball", g.group, g.radius),
    )
}

fn group_growth(g: &GroupInstance) -> Result<VerificationReport> {
    let ball = group_ball(g)?;
    let (model, f) = group_algebra_as_filtered_category(&ball)?;
    let sigma: Vec<Element> = model.generators().into_iter().map(Element::unit).collect();
    let mut r = verify_growth_to_filtration(&model, &f, &sigma, 0, g.radius)?;
    r.instance = format!("{} generators of {}", sigma.len(), g.group);
    Ok(r)
}

fn seeded_growth(seed: u64) -> GrowthInstance {
    let fx = random_filtered_dg(seed, 3, 3);
    let c = &fx.category;
    let mut sigma = vec![c.unit(0).expect("dg fixtures are unital")];
    let mut cocycles: Vec<usize> = c
        .hom_basis(0, 0)
        .into_iter()
        .filter(|&b| fx.levels[b] > int(0) && c.mu(&[b]).is_none_or(|d| d.is_zero()))
        .collect();
    cocycles.sort_by(|a, b| fx.levels[*b].cmp(&fx.levels[*a]).then(a.cmp(b)));
    sigma.extend(cocycles.into_iter().take(2).map(Element::unit));
    GrowthInstance {
        category: c.to_file(Some(&fx.levels)),
        sigma: sigma.iter().map(|v| terms_of(c, v)).collect(),
        object: c.object_label(0),
        n_max: 3,
    }
}

fn growth(inst: &GrowthInstance) -> Result<VerificationReport> {
    let (c, f) = levelled(&inst.category)?;
    let sigma = inst.sigma.iter().map(|t| element_of(&c, t)).collect::<Result<Vec<_>>>()?;
    verify_growth_to_filtration(&c, &f, &sigma, c.object_index(&inst.object)?, inst.n_max)
}

fn seeded_pipeline(seed: u64) -> Result<PipelineInstance> {
    let inst = random_admissible_instance(seed, 3);
    let c = &inst.fixture.category;
    let f = FiltrationAssignment::new(inst.fixture.levels.clone());
    let complexes = vec![inst.complex.clone(), TwistedComplex::single(inst.complex.summands[0].object)];
    let tw = TwCategory::new(c, complexes.clone())?;
    let tf = tw_filtration(&tw, &f, &inst.threshold)?;
    let mut candidates: Vec<usize> = (0..tw.tw_basis().len())
        .filter(|&b| {
            let t = tw.tw_basis()[b];
            t.p == 0 && t.q == 0 && mu_linear(&tw, &[&Element::unit(b)]).is_some_and(|d| d.is_zero())
        })
        .collect();
    candidates.sort_by(|a, b| tf.level(*b).cmp(tf.level(*a)).then(a.cmp(b)));
    let sigma = candidates
        .into_iter()
        .take(2)
        .map(|b| {
            let t = tw.tw_basis()[b];
            vec![TwTerm {
                coeff: int(1),
                i: t.i,
                j: t.j,
                id: c.basis_label(t.b),
            }]
        })
        .collect();
    Ok(PipelineInstance {
        category: c.to_file(Some(&inst.fixture.levels)),
        complexes: complexes.iter().map(|t| t.to_file(c)).collect(),
        threshold: inst.threshold,
        sigma,
        object: 0,
        n_max: 2,
    })
}

fn pipeline(inst: &PipelineInstance) -> Result<VerificationReport> {
    let (c, f) = levelled(&inst.category)?;
    let complexes = inst.complexes.iter().map(|t| t.resolve(&c)).collect::<Result<Vec<_>>>()?;
    if inst.object >= complexes.len() {
        return Err(Error::validation(format!("object {} is not in the pool", inst.object)));
    }
    let tw = TwCategory::new(&c, complexes.clone())?;
    let mut sigma = Vec::with_capacity(inst.sigma.len());
    for terms in &inst.sigma {
        let mut v = Element::new();
        for t in terms {
            let b = Element::unit(c.basis_index(&t.id)?);
            v.add_scaled(&tw.block_element(inst.object, inst.object, t.i, t.j, &b)?, &t.coeff);
        }
        sigma.push(v);
    }
    let input = TwSigma {
        complexes,
        threshold: inst.threshold.clone(),
        sigma,
        object: inst.object,
    };
    tw_pipeline(&c, &f, &input, inst.n_max)
}

fn seeded_tw_ainf(seed: u64, arity: usize) -> TwAinfInstance {
    let fx = random_filtered_dg(seed, 2, 2);
    let c = &fx.category;
    let mut r = rng(seed ^ 0x7a1f);
    let unbounded = int(1_000);
    let mut pool: Vec<TwistedComplex> = (0..2)
        .map(|_| {
            let m = rand::Rng::random_range(&mut r, 2..=3);
            random_twisted_complex(&mut r, c, &fx.levels, m, &unbounded)
        })
        .collect();
    pool.push(TwistedComplex::single(0));
    pool.push(TwistedComplex::cone_of_identity(c, 0).expect("dg fixtures are unital"));
    TwAinfInstance {
        category: c.to_file(Some(&fx.levels)),
        complexes: pool.iter().map(|t| t.to_file(c)).collect(),
        arity,
    }
}

/// A∞ relations on the pool (every object alone when no complexes are
/// given), and acyclicity of `Cone(id)` for every unital object.
fn tw_ainf(inst: &TwAinfInstance) -> Result<VerificationReport> {
    let (c, _) = inst.category.build()?;
    let mut pool = inst.complexes.iter().map(|t| t.resolve(&c)).collect::<Result<Vec<_>>>()?;
    if pool.is_empty() {
        pool = (0..c.object_count()).map(TwistedComplex::single).collect();
    }
    let cones: Vec<(usize, TwistedComplex)> = (0..c.object_count())
        .filter_map(|o| TwistedComplex::cone_of_identity(&c, o).ok().map(|t| (o, t)))
        .collect();
    let size = pool.len();
    let tw = TwCategory::new(&c, pool)?;
    let rel = check_ainf(&tw, inst.arity)?;
    let mut report = VerificationReport::new(
        "tw-ainf",
        format!("pool of {size} twisted complexes over {} objects", c.object_count()),
        "A∞ relations vanish on every composable basis tuple; Cone(id) is acyclic",
    );
    report.constant("arity", inst.arity);
    report.constant("checked", rel.checked);
    report.constant("skipped", rel.skipped);
    for v in &rel.violations {
        let residual: Vec<String> = v.residual.iter().map(|(id, x)| format!("{x}*{id}")).collect();
        report.push(ReportRow {
            x: v.inputs.join(","),
            lhs: residual.join(" + "),
            rhs: "0".into(),
            witness: None,
            holds: false,
        });
    }
    for (o, cone) in &cones {
        let h = tw_hom_complex(&c, cone, cone)?.complex.cohomology_dim();
        report.push(ReportRow {
            x: format!("Cone(id_{})", c.object_label(*o)),
            lhs: h.to_string(),
            rhs: "0".into(),
            witness: None,
            holds: h == 0,
        });
    }
    Ok(report)
}

fn retract(seed: u64) -> Result<VerificationReport> {
    let inst = random_retract_instance(seed);
    let n_max = 8;
    let r = retract_transport(&inst.category, &inst.sigma, &inst.retracts, n_max)?;
    let mut report = VerificationReport::new(
        "retract",
        format!("{} Σ elements, {} retractions", inst.sigma.len(), inst.retracts.len()),
        "dim W_Σ(n) = dim W_φ(Σ)(n)",
    );
    report.constant("n_max", n_max);
    for n in 1..=n_max {
        let (a, b) = (r.original.d(n), r.transported_table.d(n));
        report.push(ReportRow {
            x: n.to_string(),
            lhs: a.to_string(),
            rhs: b.to_string(),
            witness: None,
            holds: a == b,
        });
    }
    Ok(report)
}

fn decomposition(inst: &DecompositionInstance) -> Result<VerificationReport> {
    let quiver = inst.presentation.compile()?;
    let polys = quiver.resolve_sigma(&inst.presentation, &inst.sigma)?;
    let longest = polys.iter().map(crate::fpcat::max_len).max().unwrap_or(1).max(1);
    let composer = QuotientComposer::new(&quiver, inst.n_max * longest, 2);
    let rows = category_to_object_bound(&composer, &polys, &path_identities(&quiver), inst.n_max)?;
    let mut report = VerificationReport::new(
        "category-to-object",
        format!("{} objects, {} Σ elements", quiver.objects.len(), polys.len()),
        "(Π_i (dim W(n; L_i) + 1))^m |Σ|^{m-1} >= dim W(n)",
    );
    report.constant("n_max", inst.n_max);
    report.constant("exact", composer.is_exact());
    for row in rows {
        let per: Vec<String> = row.per_object.iter().map(|d| d.to_string()).collect();
        report.push(ReportRow {
            x: row.n.to_string(),
            lhs: row.bound.to_string(),
            rhs: row.total.to_string(),
            witness: Some(per.join(",")),
            holds: row.holds,
        });
    }
    Ok(report)
}
