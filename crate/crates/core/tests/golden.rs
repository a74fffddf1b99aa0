//! Regression files for deterministic output. Set `PERMPOLY_BLESS=1` to rewrite them.

use std::path::PathBuf;

fn check(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("PERMPOLY_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs; rerun with PERMPOLY_BLESS=1 if intended");
}

fn cli(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("permpoly").chain(args.iter().copied());
    permpoly::cli::main_with_args(argv, &mut out, &mut err);
    String::from_utf8(out).unwrap()
}

#[test]
fn witness_polynomials_m4() {
    let text: String = (1..=12)
        .map(|n| cli(&["build", "--family", &format!("g{n}"), "--m", "4"]))
        .collect();
    check("witness_polys_m4.jsonl", &text);
}

#[test]
fn witness_report_m6() {
    check("witness_report_m6.json", &cli(&["witness", "--m", "6"]));
}

#[test]
fn thm4_scan_m4() {
    check(
        "thm4_scan_m4.csv",
        &cli(&["scan", "--family", "thm4", "--m", "4", "--k", "1..3", "--s", "-1..1", "--u", "0..1", "--i", "1..2", "--format", "csv"]),
    );
}

#[test]
fn fractions_m4() {
    let text: String = ["frac1", "frac14", "frac27", "frac31", "lem4", "lem5"]
        .iter()
        .map(|f| cli(&["build", "--family", f, "--m", "4", "--k", "2", "--s", "1"]))
        .collect();
    check("fractions_m4.jsonl", &text);
}
