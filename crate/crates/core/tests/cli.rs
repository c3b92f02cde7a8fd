use std::path::PathBuf;

use zeroctl::cli::run_cli;
use zeroctl::io::{parse_pattern_file, serialize_pattern_file};
use zeroctl::report::AnalysisReportDocument;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("zeroctl").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn temp_file(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("zeroctl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analyze_example1() {
    let (code, out, err) = run(&["analyze", &fixture("example1.pat")]);
    assert_eq!(code, 1, "{err}");
    assert!(out.contains("verdict: not generically zero controllable"));
    assert!(out.contains("G_u: ({x5}, {(x5,x5)})"));
    assert!(out.contains("cycle witness: (x5,x5)"));

    let (code, out, _) = run(&["analyze", &fixture("example1_no_a55.pat")]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: generically zero controllable"));
}

#[test]
fn analyze_json_round_trips() {
    let (code, out, _) = run(&["analyze", &fixture("example1.pat"), "--format", "json"]);
    assert_eq!(code, 1);
    let doc = AnalysisReportDocument::from_json(&out).unwrap();
    let a = doc.analysis.as_ref().unwrap();
    assert_eq!(a.unreachable, ["x5"]);
    assert_eq!(
        a.cycle_witness.as_deref(),
        Some(&["(x5,x5)".to_string()][..])
    );
    assert_eq!(doc.to_json() + "\n", out);
}

#[test]
fn analyze_acyclic_without_inputs() {
    let path = temp_file("acyclic.pat", "n 3\na 2 1\na 3 2\n");
    let (code, out, _) = run(&["analyze", &path]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: generically zero controllable"));
}

#[test]
fn analyze_with_drivers_overrides_b() {
    let (code, _, _) = run(&["analyze", &fixture("example2.pat")]);
    assert_eq!(code, 1);
    let (code, out, _) = run(&["analyze", &fixture("example2.pat"), "--drivers", "x4,x8"]);
    assert_eq!(code, 0);
    assert!(out.contains("system: n = 11, m = 2"));
    let (_, out, _) = run(&[
        "analyze",
        &fixture("example2.pat"),
        "--drivers",
        "x4,x8",
        "--b-mode",
        "shared",
    ]);
    assert!(out.contains("system: n = 11, m = 1"));
}

#[test]
fn select_enumerates_example2() {
    let (code, out, _) = run(&["select", &fixture("example2.pat"), "--enumerate"]);
    assert_eq!(code, 0);
    assert!(out.contains("minimum driver set size: 2 (exact)"));
    for set in ["{x4, x8}", "{x4, x9}", "{x4, x10}", "{x4, x11}"] {
        assert!(
            out.contains(&format!("  {set}\n")),
            "{set} missing from\n{out}"
        );
    }
    assert!(out.contains("minimal driver sets (4):"));

    let (_, out, _) = run(&[
        "select",
        &fixture("example2.pat"),
        "--enumerate",
        "--limit",
        "2",
        "--format",
        "json",
    ]);
    let doc = AnalysisReportDocument::from_json(&out).unwrap();
    let d = doc.drivers.unwrap();
    assert!(d.truncated);
    assert_eq!(d.enumerated.unwrap().len(), 2);
    assert_eq!(d.b_entries, [(4, 1), (8, 2)]);
}

#[test]
fn select_cap_fallback() {
    let (code, out, _) = run(&["select", &fixture("example2.pat"), "--exact-cap", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("(greedy upper bound)"));
    let (code, out, err) = run(&[
        "select",
        &fixture("example2.pat"),
        "--exact-cap",
        "1",
        "--enumerate",
    ]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("cap"));
}

#[test]
fn verify_reports_agreement() {
    let (code, out, _) = run(&[
        "verify",
        &fixture("example2.pat"),
        "--drivers",
        "x4,x8",
        "--trials",
        "30",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("agree 30/30"));
    let (code, _, _) = run(&["verify", &fixture("example1.pat"), "--trials", "30"]);
    assert_eq!(code, 1);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "verify",
        &fixture("example1.pat"),
        "--trials",
        "25",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let first = run(&args);
    assert_eq!(first, run(&args));
    let sim = [
        "simulate",
        &fixture("example2.pat"),
        "--drivers",
        "x4,x8",
        "--seed",
        "3",
    ];
    assert_eq!(run(&sim), run(&sim));
    let dot = ["export-dot", &fixture("example2.pat"), "--drivers", "x4,x8"];
    assert_eq!(run(&dot), run(&dot));
}

#[test]
fn simulate_steers_to_origin() {
    let (code, out, _) = run(&[
        "simulate",
        &fixture("example2.pat"),
        "--drivers",
        "x4,x8",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let s = AnalysisReportDocument::from_json(&out)
        .unwrap()
        .steering
        .unwrap();
    assert_eq!(s.horizon, 11);
    assert!(s.final_norm <= 1e-6, "{}", s.final_norm);
    assert!(s.formula_residual <= 1e-9);
    let norm: f64 = s.x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-12);

    let (code, out, _) = run(&[
        "simulate",
        &fixture("example1.pat"),
        "--x0",
        "0,0,0,0,0",
        "--horizon",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("final norm: 0e0"), "{out}");
}

#[test]
fn export_dot_example1() {
    let (code, out, _) = run(&["export-dot", &fixture("example1.pat")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph system {"));
    assert!(out.contains("subgraph cluster_4"));
    assert!(out.contains("x5 [style=\"filled,dashed\""));
    assert!(out.contains("  x5 -> x5;"));
}

#[test]
fn usage_errors_exit_2_without_stdout() {
    let bad = temp_file("bad.pat", "n 5\na 6 1\n");
    for args in [
        vec!["analyze", bad.as_str()],
        vec!["analyze", "/nonexistent/file.pat"],
        vec!["frobnicate"],
        vec!["analyze"],
        vec!["select", bad.as_str(), "--limit", "x"],
        vec!["verify", bad.as_str(), "--tol", "-1"],
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty(), "{args:?} printed {out}");
        assert!(!err.is_empty());
    }
    let (_, _, err) = run(&["analyze", &bad]);
    assert!(err.contains("line 2: row 6 exceeds n=5"), "{err}");

    let example = fixture("example1.pat");
    for args in [
        vec!["verify", example.as_str(), "--tol", "0"],
        vec!["verify", example.as_str(), "--trials", "0"],
        vec!["simulate", example.as_str(), "--x0", "1,2"],
        vec!["simulate", example.as_str(), "--horizon", "0"],
        vec!["analyze", example.as_str(), "--drivers", "x9"],
        vec!["select", example.as_str(), "--enumerate", "--limit", "0"],
    ] {
        let (code, out, _) = run(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
    }
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("export-dot"));
}

#[test]
fn fixtures_round_trip() {
    for name in ["example1.pat", "example1_no_a55.pat", "example2.pat"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let parsed = parse_pattern_file(&text).unwrap();
        let again = parse_pattern_file(&serialize_pattern_file(&parsed)).unwrap();
        assert_eq!(parsed, again, "{name}");
    }
}
