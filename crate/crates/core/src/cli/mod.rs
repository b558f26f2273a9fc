//! Batch front end. [`run`] parses arguments, validates every parameter, runs
//! one job and returns its output and exit code without touching the process,
//! so the binary, the tests and the Python bindings share one entry point.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 parse error, 3
//! validation error, 4 unsupported input, 5 resource limit.

mod input;
mod verify;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use input::{parse_grid, parse_json, parse_profile, parse_window};
pub use verify::{parse_group, Check};

use crate::ainf::{check_ainf, check_strict_units, AInfFile, TwCategory, TwistedComplex, TwistedComplexFile};
use crate::bounds::{affine_consistency, entropy_lower_bound, BoundSettings};
use crate::error::{Error, Result};
use crate::exactlin::{format_scalar, parse_scalar, Scalar};
use crate::filt::{filtered_growth_profile, tw_filtration, FiltrationAssignment};
use crate::fpcat::{classify_growth, word_growth, word_growth_at_object, Presentation, SigmaSet};
use crate::loopmodels::{free_group_ball, graded_witt_dims, pbw_check, surface_group_ball, tensor_hilbert};
use input::{parse_degrees, read_json, read_text};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_RESOURCE: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_PARSE,
        Error::Validation(_) | Error::Precondition(_) | Error::DimensionMismatch(_) => EXIT_VALIDATION,
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        Error::Resource(_) => EXIT_RESOURCE,
        Error::InvariantViolation(_) | Error::Internal(_) => EXIT_FAILED,
    }
}

#[derive(Debug, Parser)]
#[command(name = "algrowth", version, about = "Exact algebraic growth invariants and filtered A∞ checks")]
pub struct Cli {
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Word growth dim W_Σ(n) of a presented category, with a growth class.
    Growth(GrowthArgs),
    /// Loop-space models: tensor Hilbert series, graded Witt dimensions,
    /// PBW round trips and group balls.
    #[command(subcommand)]
    Loop(LoopCommand),
    /// Checks the A∞ relations and strict units of a category file.
    AinfCheck(AinfCheckArgs),
    /// Validates twisted complexes and checks the A∞ relations of their pool.
    Tw(TwArgs),
    /// The persistence profile x ↦ i_{K,L}(x) of a filtered category.
    FilteredGrowth(FilteredGrowthArgs),
    /// Machine-checks an inequality on a file instance or seeded fixtures.
    Verify(VerifyArgs),
    /// Affine-consistency and entropy reports for a growth profile.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    pub presentation: PathBuf,
    pub sigma: PathBuf,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long)]
    pub at_object: Option<String>,
    /// Classification window `lo..hi`; defaults to the upper two thirds.
    #[arg(long)]
    pub window: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum LoopCommand {
    Hilbert(DegreesArgs),
    Witt(DegreesArgs),
    PbwCheck(DegreesArgs),
    Ball(BallArgs),
}

#[derive(Debug, Args)]
pub struct DegreesArgs {
    /// Generator degrees, comma separated.
    #[arg(long)]
    pub degrees: String,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[arg(long, conflicts_with = "free_rank")]
    pub surface_genus: Option<usize>,
    /// With --surface-genus: the non-orientable surface of that genus.
    #[arg(long, requires = "surface_genus")]
    pub non_orientable: bool,
    #[arg(long)]
    pub free_rank: Option<usize>,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct AinfCheckArgs {
    pub category: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub arity: usize,
}

#[derive(Debug, Args)]
pub struct TwArgs {
    pub category: PathBuf,
    /// Twisted complex files forming the pool.
    #[arg(long = "complex", required = true)]
    pub complexes: Vec<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub arity: usize,
}

#[derive(Debug, Args)]
pub struct FilteredGrowthArgs {
    /// A∞ file with a level on every basis element.
    pub category: PathBuf,
    #[arg(long)]
    pub source: String,
    #[arg(long)]
    pub target: String,
    /// `a..b`, `a..b:step` or a comma list of rationals.
    #[arg(long)]
    pub grid: String,
    /// Measure in the pool of these twisted complexes; `--source` and
    /// `--target` are then pool indices.
    #[arg(long = "complex")]
    pub complexes: Vec<PathBuf>,
    /// Admissibility threshold c for the pool.
    #[arg(long)]
    pub threshold: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub check: Check,
    /// Instance file; `{"seed": N}` replays a seeded instance.
    #[arg(long, conflicts_with_all = ["seed", "group"])]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1, requires = "seed")]
    pub count: u64,
    /// Group-algebra fixture: `free:R`, `surface:G` or `nonorientable:G`.
    #[arg(long, conflicts_with = "seed", requires = "radius")]
    pub group: Option<String>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub arity: usize,
    /// Directory for replay records of failing instances.
    #[arg(long, default_value = ".")]
    pub failure_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Tsv,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Profile TSV (`x, i`) or growth table TSV (`n, dim, exact_flag`).
    pub profile: PathBuf,
    #[arg(long, default_value = "1")]
    pub max_f: String,
    #[arg(long, default_value_t = 2)]
    pub ambient_dim: u32,
    #[arg(long, default_value = "1/20")]
    pub rate_floor: String,
    #[arg(long, default_value = "1/4")]
    pub slack: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(e: &Error) -> Self {
        Outcome {
            code: exit_code(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the job.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => return Outcome::error(&e),
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &outcome.stdout) {
            return Outcome::error(&Error::Precondition(format!("cannot write {}: {e}", path.display())));
        }
        outcome.stdout.clear();
    }
    outcome
}

fn ok(stdout: String) -> Outcome {
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Growth(a) => growth(a),
        Command::Loop(l) => loop_command(l),
        Command::AinfCheck(a) => ainf_check(a),
        Command::Tw(a) => tw(a),
        Command::FilteredGrowth(a) => filtered_growth(a),
        Command::Verify(a) => verify_command(a),
        Command::Bounds(a) => bounds(a),
    }
}

fn flag_scalar(flag: &str, s: &str) -> Result<Scalar> {
    parse_scalar(s).map_err(|_| Error::validation(format!("--{flag} {s:?}: not an exact rational")))
}

fn growth(a: &GrowthArgs) -> Result<Outcome> {
    if a.n_max == 0 {
        return Err(Error::validation("--n-max must be at least 1"));
    }
    let window = a.window.as_deref().map(parse_window).transpose()?;
    if let Some((_, hi)) = window {
        if hi > a.n_max {
            return Err(Error::validation(format!("--window ends past --n-max {}", a.n_max)));
        }
    }
    let p: Presentation = read_json(&a.presentation)?;
    let sigma: SigmaSet = read_json(&a.sigma)?;
    let table = match &a.at_object {
        Some(o) => word_growth_at_object(&p, &sigma, o, a.n_max)?,
        None => word_growth(&p, &sigma, a.n_max)?,
    };
    let mut out = table.to_tsv();
    let window = window.or_else(|| {
        let lo = (a.n_max / 3).max(1);
        (a.n_max >= lo + 4).then_some((lo, a.n_max))
    });
    if let Some(w) = window {
        out.push_str(&classify_growth(&table, w)?.trailer());
        out.push('\n');
    }
    let stderr: String = table.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    Ok(Outcome {
        code: EXIT_OK,
        stdout: out,
        stderr,
    })
}

fn loop_command(l: &LoopCommand) -> Result<Outcome> {
    match l {
        LoopCommand::Hilbert(d) => Ok(ok(tensor_hilbert(&parse_degrees(&d.degrees)?, d.n)?.to_tsv())),
        LoopCommand::Witt(d) => Ok(ok(graded_witt_dims(&parse_degrees(&d.degrees)?, d.n)?.to_tsv())),
        LoopCommand::PbwCheck(d) => {
            let degrees = parse_degrees(&d.degrees)?;
            Ok(match pbw_check(&degrees, d.n)? {
                None => ok(format!("pbw\tok\tdegrees={}\tn={}\n", d.degrees, d.n)),
                Some(k) => Outcome {
                    code: EXIT_FAILED,
                    stdout: format!("pbw\tmismatch\tdegrees={}\tn={}\tdegree={k}\n", d.degrees, d.n),
                    stderr: String::new(),
                },
            })
        }
        LoopCommand::Ball(b) => {
            let table = match (b.surface_genus, b.free_rank) {
                (Some(g), None) => surface_group_ball(g, !b.non_orientable, b.n)?,
                (None, Some(r)) => free_group_ball(r, b.n)?,
                _ => return Err(Error::validation("give exactly one of --surface-genus and --free-rank")),
            };
            Ok(ok(table.to_tsv()))
        }
    }
}

fn ainf_check(a: &AinfCheckArgs) -> Result<Outcome> {
    let file: AInfFile = read_json(&a.category)?;
    let (c, _) = file.build()?;
    let rel = check_ainf(&c, a.arity)?;
    let units = check_strict_units(&c, a.arity)?;
    let mut out = format!(
        "relations\tchecked={}\tskipped={}\tviolations={}\n",
        rel.checked,
        rel.skipped,
        rel.violations.len()
    );
    for v in &rel.violations {
        let residual: Vec<String> = v.residual.iter().map(|(id, x)| format!("{x}*{id}")).collect();
        let _ = writeln!(out, "violation\t{}\t{}", v.inputs.join(","), residual.join(" + "));
    }
    for u in &units {
        let _ = writeln!(out, "unit\t{u}");
    }
    let code = if rel.is_ok() && units.is_empty() { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome {
        code,
        stdout: out,
        stderr: String::new(),
    })
}

fn read_complexes(paths: &[PathBuf], c: &crate::ainf::AInfCategory) -> Result<Vec<TwistedComplex>> {
    paths.iter().map(|p| read_json::<TwistedComplexFile>(p)?.resolve(c)).collect()
}

fn tw(a: &TwArgs) -> Result<Outcome> {
    let file: AInfFile = read_json(&a.category)?;
    let (c, _) = file.build()?;
    let complexes = read_complexes(&a.complexes, &c)?;
    let tw = TwCategory::new(&c, complexes)?;
    let rel = check_ainf(&tw, a.arity)?;
    let mut out = String::from("complex\tsummands\thom_dim\tcohomology_dim\n");
    for p in 0..tw.complexes().len() {
        let h = crate::ainf::tw_hom_complex(&c, &tw.complexes()[p], &tw.complexes()[p])?;
        let _ = writeln!(
            out,
            "{p}\t{}\t{}\t{}",
            tw.complexes()[p].len(),
            h.ids.len(),
            h.complex.cohomology_dim()
        );
    }
    let _ = writeln!(
        out,
        "# relations\tchecked={}\tskipped={}\tviolations={}",
        rel.checked,
        rel.skipped,
        rel.violations.len()
    );
    for v in &rel.violations {
        let _ = writeln!(out, "# violation\t{}", v.inputs.join(","));
    }
    let code = if rel.is_ok() { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome {
        code,
        stdout: out,
        stderr: String::new(),
    })
}

fn filtered_growth(a: &FilteredGrowthArgs) -> Result<Outcome> {
    let grid = parse_grid(&a.grid)?;
    let threshold = a.threshold.as_deref().map(|t| flag_scalar("threshold", t)).transpose()?;
    let file: AInfFile = read_json(&a.category)?;
    let (c, levels) = file.build()?;
    let f = FiltrationAssignment::new(levels.ok_or_else(|| Error::validation("every basis element needs a level"))?);
    let profile = if a.complexes.is_empty() {
        filtered_growth_profile(&c, &f, c.object_index(&a.source)?, c.object_index(&a.target)?, &grid)?
    } else {
        let threshold = threshold.ok_or_else(|| Error::validation("--threshold is required with --complex"))?;
        let complexes = read_complexes(&a.complexes, &c)?;
        let index = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .ok()
                .filter(|&i| i < complexes.len())
                .ok_or_else(|| Error::validation(format!("{s:?} is not a pool index")))
        };
        let (s, t) = (index(&a.source)?, index(&a.target)?);
        let tw = TwCategory::new(&c, complexes.clone())?;
        let tf = tw_filtration(&tw, &f, &threshold)?;
        filtered_growth_profile(&tw, &tf, s, t, &grid)?
    };
    let mut out = profile.to_tsv();
    if let Some(r) = profile.rate_estimate {
        let _ = writeln!(out, "# rate\t{r:.6}");
    }
    Ok(ok(out))
}

fn verify_command(a: &VerifyArgs) -> Result<Outcome> {
    let source = match (&a.instance, a.seed, &a.group) {
        (Some(path), None, None) => verify::Source::File {
            label: display_name(path),
            text: read_text(path)?,
        },
        (None, Some(first), None) => verify::Source::Seeds { first, count: a.count },
        (None, None, Some(spec)) => {
            let radius = a.radius.ok_or_else(|| Error::validation("--group needs --radius"))?;
            parse_group(spec)?;
            verify::Source::Group {
                spec: spec.clone(),
                radius,
            }
        }
        _ => return Err(Error::validation("give one of --instance, --seed or --group")),
    };
    if a.arity == 0 {
        return Err(Error::validation("--arity must be at least 1"));
    }
    let checked = verify::run(a.check, &source, a.arity)?;
    let mut out = String::new();
    let mut stderr = String::new();
    let mut failed = 0;
    for (k, c) in checked.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&c.report.to_text());
        if let Some(record) = &c.replay {
            failed += 1;
            let tag = c.report.constant_value("seed").map_or(format!("{k}"), |s| format!("seed{s}"));
            let path = a.failure_dir.join(format!("{}-{tag}.json", a.check.name()));
            let text = serde_json::to_string_pretty(record).expect("records serialize") + "\n";
            std::fs::write(&path, text).map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?;
            let _ = writeln!(stderr, "failing instance written to {}", path.display());
        }
    }
    let _ = writeln!(
        out,
        "\nsummary\t{}\tpassed={}\tfailed={failed}",
        a.check.name(),
        checked.len() - failed
    );
    let code = if failed == 0 { EXIT_OK } else { EXIT_FAILED };
    Ok(Outcome { code, stdout: out, stderr })
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn bounds(a: &BoundsArgs) -> Result<Outcome> {
    let max_f = flag_scalar("max-f", &a.max_f)?;
    let settings = BoundSettings {
        rate_floor: flag_scalar("rate-floor", &a.rate_floor)?,
        poly_slack: flag_scalar("slack", &a.slack)?,
    };
    if max_f < crate::exactlin::int(1) {
        return Err(Error::validation(format!("--max-f {} must be at least 1", format_scalar(&max_f))));
    }
    let profile = parse_profile(&read_text(&a.profile)?)?;
    let reports = [
        affine_consistency(&profile, a.ambient_dim, &settings)?,
        entropy_lower_bound(&profile, &max_f, &settings)?,
    ];
    let out = reports
        .iter()
        .map(|r| match a.format {
            Format::Text => r.to_text(),
            Format::Tsv => r.to_tsv(),
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(ok(out))
}
