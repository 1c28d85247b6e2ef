use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freecurrents")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("freecurrents-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn apply_bundled_automorphism() {
    assert_eq!(ok(&["word", "apply", "--auto", "tribonacci.af", "--input", "c"]), "a\n");
    assert_eq!(ok(&["word", "apply", "--auto", "tribonacci-inverse", "--input", "ab"]), "a\n");
}

#[test]
fn word_commands() {
    assert_eq!(ok(&["word", "reduce", "--input", "abBc"]), "ac\n");
    assert_eq!(ok(&["word", "invert", "--input", "abC"]), "cBA\n");
    assert_eq!(ok(&["word", "occurrences", "--input", "aaa", "--pattern", "aa"]), "2\n");
    assert_eq!(ok(&["word", "occurrences", "--input", "ab", "--pattern", "ba", "--cyclic"]), "1\n");
}

#[test]
fn rational_current_dump() {
    let out = ok(&["current", "rational", "--word", "ab", "--depth", "3"]);
    assert!(out.starts_with("rank=2\ndepth=3\n"));
    assert!(out.lines().any(|l| l == "ab\t1/1"));
}

#[test]
fn json_round_trips_through_the_parsers() {
    let json = ok(&["current", "rational", "--word", "abb", "--depth", "3", "--format", "json"]);
    let tsv = ok(&["current", "rational", "--word", "abb", "--depth", "3"]);
    let a = scratch("abb.json", &json);
    let b = scratch("abb.txt", &tsv);
    assert_eq!(ok(&["current", "distance", "--current", a.to_str().unwrap(), "--other", b.to_str().unwrap()]), "distance\t0/1\n");
    let support = ok(&["current", "support", "--current", a.to_str().unwrap(), "--format", "json"]);
    let l = scratch("support.json", &support);
    let back = ok(&["current", "support", "--current", b.to_str().unwrap()]);
    let m = scratch("support.txt", &back);
    let sub = ok(&["lang", "sublanguage", "--language", l.to_str().unwrap(), "--other", m.to_str().unwrap()]);
    assert_eq!(sub, "sublanguage\ttrue\n");
}

#[test]
fn push_and_combine() {
    let mu = scratch("a3.txt", &ok(&["--rank", "3", "current", "rational", "--word", "ab", "--depth", "3"]));
    let pushed = ok(&["current", "push", "--auto", "tribonacci", "--current", mu.to_str().unwrap(), "--depth", "2"]);
    let expected = ok(&["--rank", "3", "current", "rational", "--word", "abac", "--depth", "2"]);
    assert_eq!(pushed, expected);
    let intervals = ok(&["current", "push", "--auto", "tribonacci-inverse", "--current", mu.to_str().unwrap(), "--depth", "1"]);
    assert!(intervals.lines().any(|l| l == "a\t1/1\t0/1"), "{intervals}");
    let half = ok(&["current", "combine", "--term", &format!("1/2:{}", mu.display())]);
    assert!(half.lines().any(|l| l == "ab\t1/2"));
}

#[test]
fn check_flags_violations() {
    let bad = scratch("bad.txt", "rank=2\ndepth=2\na\t1\nA\t1\naa\t1/2\nAA\t1/2\n");
    let out = run(&["current", "check", "--current", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("valid\tfalse\n"));
    let counting = scratch("z.txt", &ok(&["current", "counting", "--word", "aab", "--depth", "2"]));
    ok(&["current", "check", "--current", counting.to_str().unwrap()]);
}

#[test]
fn lp_on_a_leaf() {
    let leaf = scratch("leaf.toml", "kind = \"eventually_periodic\"\nrank = 2\nleft = \"a\"\ncenter = \"b\"\nright = \"a\"\n");
    let lang = scratch("leaf.txt", &ok(&["lang", "leaf", "--leaf", leaf.to_str().unwrap(), "--depth", "4"]));
    let out = ok(&["lp", "max-mass", "--language-file", lang.to_str().unwrap(), "--target", "b"]);
    assert!(out.starts_with("objective\t1/8\n"));
    let smaller = ok(&["lp", "max-mass", "--language-file", lang.to_str().unwrap(), "--target", "b", "--depth", "2"]);
    assert!(smaller.starts_with("objective\t1/4\n"));
    let witness = ok(&["lp", "witness", "--language-file", lang.to_str().unwrap()]);
    assert!(witness.starts_with("rank=2\ndepth=4\n"));
}

#[test]
fn spectral_tables() {
    let pf = ok(&["spectral", "pf", "--auto", "tribonacci"]);
    assert!(pf.starts_with("# alpha=tribonacci\tlambda=1.839286755"));
    let growth = ok(&["spectral", "growth", "--auto", "tribonacci-inverse", "--letter", "a", "--n", "40"]);
    assert!(growth.contains("estimate=1.39"));
    let attract = ok(&["spectral", "attract", "--auto", "tribonacci", "--depth", "2", "--n", "12"]);
    assert!(attract.lines().nth(1) == Some("rank=3"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["word", "reduce", "--input", "a?"]).status.code(), Some(1));
    assert_eq!(run(&["current", "check", "--current", "/nonexistent/file"]).status.code(), Some(1));
    assert_eq!(run(&["spectral", "pf", "--auto", "tribonacci-inverse"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn repro_is_deterministic() {
    let first = ok(&["repro", "lp-decay"]);
    assert!(first.contains("VERDICT\t5\tPASS\t"));
    assert!(first.lines().any(|l| l == "6\t1/12\t1/12"));
    let a = ok(&["repro", "counting", "--seed", "4"]);
    assert_eq!(a, ok(&["repro", "counting", "--seed", "4"]));
    let tri = ok(&["repro", "tribonacci"]);
    assert_eq!(tri.lines().filter(|l| l.starts_with("VERDICT\t") && l.contains("\tPASS\t")).count(), 2);
    let json: serde_json::Value = serde_json::from_str(&ok(&["repro", "noncontinuity", "--format", "json"])).unwrap();
    assert_eq!(json["reports"][0]["verdicts"][0]["pass"], true);
}

#[test]
fn repro_all_passes() {
    let out = ok(&["repro", "all"]);
    let verdicts: Vec<&str> = out.lines().filter(|l| l.starts_with("VERDICT\t")).collect();
    assert_eq!(verdicts.len(), 11);
    assert!(verdicts.iter().all(|l| l.split('\t').nth(2) == Some("PASS")), "{verdicts:?}");
}
