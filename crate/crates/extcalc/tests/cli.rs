//! End-to-end runs of the binary: the documented flag combinations, the
//! exit-code contract, and output determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_extcalc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

#[test]
fn resolve_is_deterministic_across_runs() {
    let args = [
        "resolve", "--p", "5", "--module", "sphere", "--max-s", "2", "--max-t", "30", "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        a.stdout, b.stdout,
        "identical flags must give identical bytes"
    );
    assert!(stdout(&a).contains("\"alpha_2\""));
}

#[test]
fn resolve_moore_module_has_bottom_class() {
    let out = run(&[
        "resolve", "--p", "5", "--module", "m", "--max-s", "1", "--max-t", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"s\": 0"));
    assert!(text.contains("\"dim\": 1"));
}

#[test]
fn resolve_rejects_even_prime() {
    let out = run(&[
        "resolve", "--p", "4", "--module", "sphere", "--max-s", "1", "--max-t", "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resolve_store_roundtrip_and_extension() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("sphere.res.json");
    let store_str = store.to_str().unwrap();
    let small = run(&[
        "resolve", "--p", "5", "--module", "sphere", "--max-s", "1", "--max-t", "20", "--store",
        store_str,
    ]);
    assert_eq!(small.status.code(), Some(0));
    assert!(store.exists());
    let extended = run(&[
        "resolve", "--p", "5", "--module", "sphere", "--max-s", "2", "--max-t", "30", "--store",
        store_str,
    ]);
    assert_eq!(extended.status.code(), Some(0));
    let fresh = run(&[
        "resolve", "--p", "5", "--module", "sphere", "--max-s", "2", "--max-t", "30",
    ]);
    assert_eq!(
        stdout(&extended),
        stdout(&fresh),
        "extension must match fresh run"
    );
    // the store now holds the extended resolution; a mismatched request errors
    let clash = run(&[
        "resolve", "--p", "5", "--module", "k", "--max-s", "1", "--max-t", "10", "--store",
        store_str,
    ]);
    assert_eq!(clash.status.code(), Some(2));
}

#[test]
fn store_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("env.res.json");
    let out = bin()
        .env("EXTCALC_STORE", store.as_os_str())
        .args([
            "resolve", "--p", "5", "--module", "sphere", "--max-s", "1", "--max-t", "10",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(
        store.exists(),
        "EXTCALC_STORE must be used as the store path"
    );
}

#[test]
fn may_scan_expect_empty_contract() {
    let ok = run(&[
        "may",
        "--p",
        "5",
        "--s",
        "5",
        "--t",
        "p^n*q+(p+2)*q",
        "--n",
        "3..10",
        "--expect-empty",
    ]);
    assert_eq!(ok.status.code(), Some(0));

    // h_0 lives at (1, q), so expecting emptiness there must fail
    let fail = run(&["may", "--p", "5", "--s", "1", "--t", "8", "--expect-empty"]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn may_scan_witnesses_at_k0_bidegree() {
    let out = run(&["may", "--p", "5", "--s", "2", "--t", "88"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("h_{1,1} h_{2,0}"), "got: {text}");
    assert!(text.contains("\"empty\": false"));
}

#[test]
fn may_scan_empty_low_degree() {
    let out = run(&["may", "--p", "5", "--s", "0", "--t", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"empty\": true"));
}

#[test]
fn may_rejects_malformed_formula() {
    let out = run(&["may", "--p", "5", "--s", "1", "--t", "p%q"]);
    assert_eq!(out.status.code(), Some(2));
    let missing_n = run(&["may", "--p", "5", "--s", "1", "--t", "p^n*q"]);
    assert_eq!(missing_n.status.code(), Some(2));
}

#[test]
fn les_replays_all_pass() {
    let out = run(&["les", "--proposition", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for id in ["2.2", "2.3", "2.5", "2.6", "2.7"] {
        assert!(text.contains(&format!("replay {id}")), "missing {id}");
    }
    assert!(text.contains("PASS"));
}

#[test]
fn les_single_replay_json() {
    let out = run(&["les", "--proposition", "2.6", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("beta_* i'_* i_* (h_n)"));
    assert!(text.contains("\"passed\": true"));
}

#[test]
fn les_unknown_proposition_is_usage_error() {
    let out = run(&["les", "--proposition", "3.14"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn les_accepts_shipped_fact_base_file() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fact_base_p5.json");
    let out = run(&["les", "--fact-base", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn product_a0_g0_vanishes() {
    let out = run(&["product", "--p", "5", "--left", "a_0", "--right", "g_0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"is_zero\": true"), "got: {text}");
    assert!(text.contains("\"t\": 57"));
}

#[test]
fn product_a0_squared_nonzero() {
    let out = run(&["product", "--p", "5", "--left", "1,1", "--right", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"is_zero\": false"));
}

#[test]
fn verify_ext1_suite_passes() {
    let out = run(&["verify", "--suite", "ext1", "--p", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS 1"));
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    let out = run(&["verify", "--suite", "everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_renders_svg_and_text() {
    let dir = tempfile::tempdir().unwrap();
    let chart = dir.path().join("chart.json");
    let out = run(&[
        "resolve",
        "--p",
        "5",
        "--module",
        "sphere",
        "--max-s",
        "2",
        "--max-t",
        "20",
        "--output",
        chart.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let svg_path = dir.path().join("chart.svg");
    let out = run(&[
        "export",
        "--input",
        chart.to_str().unwrap(),
        "--format",
        "svg",
        "--output",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_svg_well_formed(&svg);

    let out = run(&[
        "export",
        "--input",
        chart.to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("s= 2"));

    // JSON export round-trips through the loader
    let out = run(&[
        "export",
        "--input",
        chart.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).trim(),
        std::fs::read_to_string(&chart).unwrap().trim()
    );
}

#[test]
fn export_rejects_malformed_chart() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ nope").unwrap();
    let out = run(&[
        "export",
        "--input",
        bad.to_str().unwrap(),
        "--format",
        "svg",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

/// Minimal well-formedness scan: XML declaration, balanced tags.
fn assert_svg_well_formed(svg: &str) {
    assert!(svg.starts_with("<?xml"));
    let mut stack: Vec<String> = Vec::new();
    let mut rest = svg;
    while let Some(start) = rest.find('<') {
        rest = &rest[start + 1..];
        if rest.starts_with('?') {
            continue;
        }
        let end = rest.find('>').expect("unclosed tag");
        let tag = &rest[..end];
        rest = &rest[end + 1..];
        if let Some(name) = tag.strip_prefix('/') {
            let open = stack
                .pop()
                .unwrap_or_else(|| panic!("stray closing </{name}>"));
            assert_eq!(open, name, "mismatched tag");
        } else if !tag.ends_with('/') {
            let name: String = tag
                .split_whitespace()
                .next()
                .unwrap()
                .chars()
                .take_while(|c| c.is_alphanumeric())
                .collect();
            stack.push(name);
        }
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}
