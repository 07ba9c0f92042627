use std::fs;
use std::path::{Path, PathBuf};

use mctin::cli::{run, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn mctin(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("mctin").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn example(dir: &Path, alpha: &str, beta: &str) -> PathBuf {
    let path = dir.join(format!("net_{}_{}.json", alpha.replace('/', "_"), beta.replace('/', "_")));
    let r = mctin(&["example", "--alpha", alpha, "--beta", beta, "-o", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_reports_regimes() {
    let dir = tempfile::tempdir().unwrap();
    let r = mctin(&["classify", s(&example(dir.path(), "1/2", "2/5"))]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.starts_with("CTIN: yes, TIN: no\n"), "{}", r.out);
    assert!(r.out.contains("TIN violations"));

    let r = mctin(&["classify", s(&example(dir.path(), "2/5", "1/5"))]);
    assert_eq!(r.out, "CTIN: yes, TIN: yes\n");

    let r = mctin(&["classify", s(&example(dir.path(), "3/5", "1/10"))]);
    assert!(r.out.starts_with("CTIN: no, TIN: no\n"));
    assert!(r.out.contains("CTIN violations"));
}

#[test]
fn classify_notes_reordering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("swapped.json");
    fs::write(
        &path,
        r#"{"cells": 2, "users": [2, 1],
            "alpha": [[["1", "1/10"], ["1/2", "0"]], [["0", "1"]]]}"#,
    )
    .unwrap();
    let r = mctin(&["classify", s(&path)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.starts_with("note: users reordered"), "{}", r.out);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let r = mctin(&["classify", s(&dir.path().join("missing.json"))]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.starts_with("error: cannot read"));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"cells": 1, "users": [1], "alpha": [[["-1/2"]]]}"#).unwrap();
    assert_eq!(mctin(&["classify", s(&bad)]).code, EXIT_INPUT);

    let net = example(dir.path(), "1/2", "2/5");
    let r = mctin(&["query", s(&net), "member", "--values", "0,0,0"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("dimension mismatch"), "{}", r.err);
    assert_eq!(mctin(&["query", s(&net), "member"]).code, EXIT_INPUT);
    assert_eq!(mctin(&["example", "--alpha", "1/5", "--beta", "2/5"]).code, EXIT_INPUT);
    assert_eq!(mctin(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(mctin(&["sweep", "--alpha-step", "0"]).code, EXIT_INPUT);
}

#[test]
fn region_lists_every_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let net = example(dir.path(), "1/2", "2/5");
    let r = mctin(&["region", s(&net)]);
    assert_eq!(r.code, EXIT_OK);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], "provenance,d_1_1,d_1_2,d_2_1,d_2_2,bound");
    // 4 single-cell bounds and 2 x 2 rank tuples on the only cycle
    assert_eq!(lines.len(), 1 + 8);
    assert!(lines.contains(&"single[cell=1 rank=2],1,1,0,0,1/1"));
    assert!(lines.contains(&"cycle[1->2 ranks=2 2],1,1,1,1,6/5"));

    let file = dir.path().join("region.csv");
    assert_eq!(mctin(&["region", s(&net), "-o", s(&file)]).code, EXIT_OK);
    assert_eq!(fs::read_to_string(file).unwrap(), r.out);
}

#[test]
fn query_member_and_maxsum() {
    let dir = tempfile::tempdir().unwrap();
    let net = example(dir.path(), "1/2", "2/5");
    let r = mctin(&["query", s(&net), "maxsum"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out.lines().next(), Some("6/5"));
    assert!(r.out.contains("argmax: ("));

    let r = mctin(&["query", s(&net), "member", "--values", "0,3/5,0,3/5"]);
    assert_eq!(r.out, "member\n");
    let r = mctin(&["query", s(&net), "member", "--values", "0,0.7,0,0.6"]);
    assert!(r.out.starts_with("not member"), "{}", r.out);
    assert!(r.out.contains("cycle[1->2 ranks=2 2]: 13/10 > 6/5"), "{}", r.out);

    let r = mctin(&["query", s(&net), "maxsum", "--values", "1,0,0,0"]);
    assert_eq!(r.out.lines().next(), Some("1"));
}

#[test]
fn sweep_emits_rows() {
    let r = mctin(&[
        "sweep", "--alpha-min", "1/2", "--alpha-max", "1/2", "--beta-min", "0", "--beta-max", "1/2",
        "--beta-step", "1/10",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines.len(), 1 + 6);
    assert_eq!(lines[0], "alpha,beta,ctin,tin,sum_gdof,ia_gap");
    assert_eq!(lines[5], "0.5,0.4,yes,no,1.2,2/15");
    assert_eq!(lines[1], "0.5,0,yes,yes,2,-2/3");

    let r = mctin(&["sweep", "--alpha-step", "1/2", "--beta-step", "1/2", "--outputs", "regime"]);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines.contains(&"0.5,0.5,yes,no,n/a,n/a"));
    assert!(lines.contains(&"0,1,n/a,n/a,n/a,n/a"));
}

#[test]
fn verify_passes_on_ctin_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (a, b) in [("1/2", "2/5"), ("2/5", "1/5")] {
        let net = example(dir.path(), a, b);
        let r = mctin(&["verify", s(&net), "--all"]);
        assert_eq!(r.code, EXIT_OK, "{}\n{}", r.out, r.err);
        for check in ["inclusion: pass", "support: pass", "duality: pass", "converse-steps: pass"] {
            assert!(r.out.contains(check), "{check} missing from\n{}", r.out);
        }
        assert!(r.out.ends_with("all checks passed\n"));
    }
}

#[test]
fn verify_flags_injected_point() {
    let dir = tempfile::tempdir().unwrap();
    let net = example(dir.path(), "1/2", "2/5");
    let r = mctin(&["verify", s(&net), "--inclusion", "--step", "1/10", "--inject-point", "0,0.7,0,0.6"]);
    assert_eq!(r.code, EXIT_CHECK_FAILED);
    assert!(r.out.contains("inclusion: FAIL"), "{}", r.out);
    assert!(r.out.contains("cycle[1->2 ranks=2 2]"), "{}", r.out);
    assert!(r.out.contains("failed: inclusion"), "{}", r.out);
}

#[test]
fn verify_warns_outside_ctin() {
    let dir = tempfile::tempdir().unwrap();
    let net = example(dir.path(), "3/5", "1/10");
    let r = mctin(&["verify", s(&net), "--converse-steps"]);
    assert!(r.out.starts_with("warning: network is outside the CTIN regime"), "{}", r.out);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let net = example(dir.path(), "1/2", "7/20");
    let a = mctin(&["verify", s(&net), "--support", "--duality", "--step", "1/10"]);
    let b = mctin(&["verify", s(&net), "--support", "--duality", "--step", "1/10"]);
    assert_eq!(a.out, b.out);
    assert_eq!(a.code, b.code);
}
