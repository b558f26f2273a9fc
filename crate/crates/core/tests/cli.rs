use std::path::PathBuf;

use algrowth::ainf::{AInfCategory, AInfStructure};
use algrowth::cli::{run, Outcome};
use algrowth::exactlin::int;
use algrowth::fixtures::random_filtered_dg;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn algrowth(args: &[&str]) -> Outcome {
    run(std::iter::once("algrowth").chain(args.iter().copied()))
}

fn column(out: &str, k: usize) -> Vec<String> {
    out.lines()
        .skip(1)
        .take_while(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split('\t').nth(k).unwrap().to_string())
        .collect()
}

#[test]
fn free_algebra_growth() {
    let o = algrowth(&["growth", &data("free2.json"), &data("xy_sigma.json"), "--n-max", "10"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let expected: Vec<String> = (1..=10).map(|n| ((1u64 << (n + 1)) - 2).to_string()).collect();
    assert_eq!(column(&o.stdout, 1), expected);
    assert!(o.stdout.contains("exponential"), "{}", o.stdout);
}

#[test]
fn commutative_growth_is_polynomial() {
    let o = algrowth(&["growth", &data("commutative2.json"), &data("xy_sigma.json"), "--n-max", "12"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    // Monomials of degree 1..n in two commuting letters.
    let expected: Vec<String> = (1..=12).map(|n: u64| ((n + 1) * (n + 2) / 2 - 1).to_string()).collect();
    assert_eq!(column(&o.stdout, 1), expected);
    assert!(o.stdout.contains("polynomial"), "{}", o.stdout);
}

#[test]
fn exit_codes() {
    let bad = algrowth(&["growth", &data("bad_relation.json"), &data("xy_sigma.json"), "--n-max", "3"]);
    assert_eq!(bad.code, 3);
    assert!(bad.stderr.contains("relation 1"), "{}", bad.stderr);

    let dir = scratch("exit_codes");
    let broken = dir.join("broken.json");
    std::fs::write(&broken, "{\"objects\": [\n  \"pt\",\n").unwrap();
    let o = algrowth(&["growth", broken.to_str().unwrap(), &data("xy_sigma.json"), "--n-max", "3"]);
    assert_eq!(o.code, 2, "{}", o.stderr);
    assert!(o.stderr.contains("line"), "{}", o.stderr);

    assert_eq!(algrowth(&["growth"]).code, 2);
    assert_eq!(
        algrowth(&["loop", "ball", "--surface-genus", "2", "--non-orientable", "--n", "3"]).code,
        4
    );
    assert_eq!(algrowth(&["loop", "ball", "--surface-genus", "1", "--n", "3"]).code, 4);
    assert_eq!(algrowth(&["verify", "retract", "--seed", "1", "--arity", "0"]).code, 3);
}

#[test]
fn loop_models() {
    let h = algrowth(&["loop", "hilbert", "--degrees", "1,1", "--n", "6"]);
    assert_eq!(h.code, 0);
    assert_eq!(column(&h.stdout, 1), ["1", "2", "4", "8", "16", "32", "64"]);
    let w = algrowth(&["loop", "witt", "--degrees", "1,1", "--n", "6"]);
    assert_eq!(w.code, 0);
    assert_eq!(column(&w.stdout, 1), ["2", "3", "2", "3", "6", "11"]);
    let p = algrowth(&["loop", "pbw-check", "--degrees", "1,2", "--n", "8"]);
    assert_eq!(p.code, 0, "{}", p.stdout);
    let ball = algrowth(&["loop", "ball", "--surface-genus", "2", "--n", "4"]);
    assert_eq!(column(&ball.stdout, 1), ["1", "9", "65", "457", "3193"]);
    let free = algrowth(&["loop", "ball", "--free-rank", "2", "--n", "3"]);
    assert_eq!(column(&free.stdout, 1), ["1", "5", "17", "53"]);
}

#[test]
fn verify_seeded_checks() {
    let dir = scratch("seeded");
    let o = algrowth(&[
        "verify",
        "tw-generator-bound",
        "--seed",
        "7",
        "--count",
        "30",
        "--failure-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(
        o.stdout.ends_with("summary\ttw-generator-bound\tpassed=30\tfailed=0\n"),
        "{}",
        o.stdout
    );
    let g = algrowth(&["verify", "filtration-axiom", "--group", "surface:2", "--radius", "3"]);
    assert_eq!(g.code, 0, "{}", g.stdout);
    assert_eq!(
        algrowth(&["verify", "filtration-axiom", "--group", "surface:1", "--radius", "3"]).code,
        4
    );
}

#[test]
fn corrupted_signs_fail_and_replay() {
    let odd_product = |c: &AInfCategory| {
        c.table()
            .iter()
            .find(|(k, v)| k.len() == 2 && !v.is_zero() && c.degree(k[0]) != 0)
            .map(|(k, v)| (k.clone(), v.clone()))
    };
    let fx = (0..)
        .map(|s| random_filtered_dg(s, 2, 2))
        .find(|f| odd_product(&f.category).is_some())
        .unwrap();
    let c = &fx.category;
    let (inputs, value) = odd_product(c).unwrap();
    let broken = c.with_entry(inputs, value.scaled(&int(-1))).unwrap();
    let dir = scratch("corrupted");
    let file = dir.join("broken.json");
    std::fs::write(&file, serde_json::to_string_pretty(&broken.to_file(Some(&fx.levels))).unwrap()).unwrap();

    let first = algrowth(&[
        "verify",
        "tw-ainf",
        "--instance",
        file.to_str().unwrap(),
        "--failure-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(first.code, 1, "{}", first.stdout);
    let replay = dir.join("tw-ainf-0.json");
    assert!(first.stderr.contains("tw-ainf-0.json"), "{}", first.stderr);
    let rerun_dir = scratch("corrupted_rerun");
    let second = algrowth(&[
        "verify",
        "tw-ainf",
        "--instance",
        replay.to_str().unwrap(),
        "--failure-dir",
        rerun_dir.to_str().unwrap(),
    ]);
    assert_eq!(second.code, 1);
    let body = |o: &Outcome| {
        o.stdout
            .lines()
            .filter(|l| !l.starts_with("instance"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&first), body(&second));
}

#[test]
fn bounds_command() {
    let dir = scratch("bounds");
    let file = dir.join("cubic.tsv");
    let rows: String = (1..=30).map(|n: u64| format!("{n}\t{}\n", n * n * n)).collect();
    std::fs::write(&file, format!("x\ti\n{rows}")).unwrap();
    let path = file.to_str().unwrap();
    let o = algrowth(&["bounds", path, "--ambient-dim", "6"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("consistent with affine"), "{}", o.stdout);
    let tsv = algrowth(&["bounds", path, "--ambient-dim", "4", "--format", "tsv"]);
    assert!(tsv.stdout.starts_with("field\tvalue"), "{}", tsv.stdout);
    assert!(tsv.stdout.contains("exceeds the polynomial bound"));
    assert_eq!(algrowth(&["bounds", path, "--max-f", "1/2"]).code, 3);
}

#[test]
fn search_budget_is_a_resource_error() {
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_algrowth"))
        .args(["loop", "ball", "--surface-genus", "2", "--n", "6"])
        .env("ALGROWTH_BFS_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(5), "{}", String::from_utf8_lossy(&o.stderr));
}
