use std::fs;
use std::process::{Command, Output};

fn chipfire(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chipfire")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Output up to the timing section.
fn body(o: &Output) -> String {
    let s = stdout(o);
    s.split("--- timings").next().unwrap().to_string()
}

const FOUR_VERTEX: &str = r#"{"num_vertices":4,"edges":[[0,1],[1,3],[0,3],[2,3],[1,2]]}"#;

#[test]
fn fires_four_vertex_example_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let d = dir.path().join("d.json");
    fs::write(&g, FOUR_VERTEX).unwrap();
    fs::write(&d, r#"{"values":[4,-1,0,5]}"#).unwrap();
    let o = chipfire(&["fire", g.to_str().unwrap(), d.to_str().unwrap(), "--vertex", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(body(&o).contains("-> (5,0,1,2)"), "{}", stdout(&o));
}

#[test]
fn zero_divisor_has_rank_zero() {
    let o = chipfire(&["rank", "family:petersen", "0,0,0,0,0,0,0,0,0,0", "--format", "machine", "--no-timings"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["rank"], 0);
}

#[test]
fn petersen_report_lists_clean_pairs() {
    let o = chipfire(&["bn-check", "family:petersen"]);
    assert_eq!(o.status.code(), Some(0));
    let b = body(&o);
    assert!(b.contains("general"));
    assert!(b.contains("r=1 d=3 rho=-2: clean"));
    assert!(b.contains("r=2 d=5 rho=-3: clean"));
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cp6.json");
    let o = chipfire(&["gen", "c-prime:6", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let marks: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cp6.marks.json")).unwrap()).unwrap();
    assert!(marks["marks"].is_object());
    let o = chipfire(&["hyperelliptic", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(body(&o).starts_with("hyperelliptic: "));
    let dot = dir.path().join("cp6.dot");
    let o = chipfire(&["export-dot", out.to_str().unwrap(), "-o", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(dot).unwrap().starts_with("graph G {"));
}

#[test]
fn refuted_certificate_exits_one() {
    let o = chipfire(&["verify", "family:petersen", "1,0,0,0,0,0,0,0,0,0", "--rank", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = chipfire(&["verify", "family:genus7-max", "0,1,0,0,0,0,0,0,0,0,0,3", "--rank", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    for args in [
        vec!["rank", bad.to_str().unwrap(), "0"],
        vec!["rank", "/definitely/missing.json", "0"],
        vec!["rank", "family:cone", "1,2"],
        vec!["reduce", "family:cone", "1,0,0", "--base", "9"],
        vec!["gen", "no-such-family:3"],
        vec!["frobnicate"],
        vec!["verify-claims", "--genus", "9..3"],
        vec!["bn-check", "family:heawood", "--max-classes", "3"],
    ] {
        let o = chipfire(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["bn-check", "family:c-prime:7"],
        vec!["aut", "family:k23", "--list", "--involutions"],
        vec!["verify-claims", "--genus", "3..8"],
        vec!["reduce", "family:cube", "3,-2,0,1,0,5,0,-1"],
    ] {
        let a = chipfire(&args);
        let b = chipfire(&args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(body(&a), body(&b), "{args:?}");
        let mut quiet = args.clone();
        quiet.extend(["--format", "machine", "--no-timings"]);
        assert_eq!(chipfire(&quiet).stdout, chipfire(&quiet).stdout, "{args:?}");
    }
}

#[test]
fn claim_filter_selects_single_claim() {
    let o = chipfire(&["verify-claims", "--claim", "fire-example", "--format", "machine", "--no-timings"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["total"], 1);
    assert_eq!(v["result"]["claims"][0]["passed"], true);
    let o = chipfire(&["verify-claims", "--claim", "cycle-script-n5"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn equivalence_and_reduction_agree() {
    let o = chipfire(&["equiv", "family:tetrahedron", "3,0,0,0", "0,1,1,1", "--no-timings"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("equivalent: true"));
    let o = chipfire(&["fire", "family:tetrahedron", "3,0,0,0", "--script", "1,0,0,0", "--no-timings"]);
    assert!(stdout(&o).contains("-> (0,1,1,1)"));
}
