use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const K4: &str = r#"{"kind":"graph","vertices":["a","b","c","d"],
  "edges":[["a","b"],["a","c"],["a","d"],["b","c"],["b","d"],["c","d"]]}"#;
const C4: &str = r#"{"kind":"graph","vertices":["0","1","2","3"],"edges":[["0","1"],["1","2"],["2","3"],["3","0"]]}"#;
const COLLINEAR: &str = r#"{"kind":"metric","points":["x","y","z"],"d":[["0","1","2"],["1","0","1"],["2","1","0"]]}"#;
const EQUILATERAL: &str = r#"{"kind":"metric","points":["p","q","r"],"d":[["0","1","1"],["1","0","1"],["1","1","0"]]}"#;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn freeiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeiso")).args(args).env_remove("FREEISO_CAPS").output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = freeiso(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn rigidity_of_k4() {
    let f = Fixture::new();
    let k4 = f.file("k4.json", K4);
    let r = ok_json(&["rigidity", path(&k4)]);
    assert_eq!(r["rigid"], true);
    assert_eq!(r["sigma_count"], 48);
}

#[test]
fn norm_of_elementary_molecule_is_one() {
    let f = Fixture::new();
    let space = f.file("s.json", COLLINEAR);
    let m = f.file("m.json", r#"{"coeffs":{"x":"1/2","z":"-1/2"}}"#);
    assert_eq!(ok_json(&["norm", path(&space), "--molecule", path(&m)])["norm"], "1");
    let m = f.file("m2.json", r#"{"coeffs":{"x":"1","y":"-2","z":"1"}}"#);
    assert_eq!(ok_json(&["norm", path(&space), "--molecule", path(&m)])["norm"], "2");
}

#[test]
fn isogroup_of_c4() {
    let f = Fixture::new();
    let c4 = f.file("c4.json", C4);
    let r = ok_json(&["isogroup", path(&c4)]);
    assert_eq!(r["order"], "48");
    assert_eq!(r["structure"], "S_4 x Z2");
    assert_eq!(r["rigid"], false);
    assert!(r["witness"]["sigma"].is_array());
}

#[test]
fn output_is_byte_stable() {
    let f = Fixture::new();
    let c4 = f.file("c4.json", C4);
    for cmd in ["isogroup", "cycles", "whitney", "sigma", "l1check"] {
        let a = freeiso(&[cmd, path(&c4), "--seed", "5"]);
        let b = freeiso(&[cmd, path(&c4), "--seed", "5"]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert_eq!(a.stderr, b.stderr, "{cmd}");
    }
}

#[test]
fn constructed_spaces_round_trip() {
    let f = Fixture::new();
    let a = f.file("a.json", EQUILATERAL);
    let b = f.file("b.json", EQUILATERAL);
    let out = freeiso(&["construct", "union-bounded", path(&a), path(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["recipe"]["kind"], "UnionBounded");
    let u = f.file("u.json", &String::from_utf8(out.stdout).unwrap());
    assert_eq!(ok_json(&["validate", path(&u)])["points"], 6);
    let first = ok_json(&["rigidity", path(&u)]);
    assert_eq!(first["rigid"], true);

    // Re-emitting through the document form changes nothing downstream.
    let again = f.file("u2.json", &serde_json::to_string(&doc).unwrap());
    assert_eq!(ok_json(&["rigidity", path(&again)]), first);

    let g = freeiso(&["construct", "three-clique", "--cliques", "11,12,13", "--connectors", "0,3,4;5,0,6;7,8,0"]);
    assert_eq!(g.status.code(), Some(0));
    let gp = f.file("g.json", &String::from_utf8(g.stdout).unwrap());
    let conn = ok_json(&["connectivity", path(&gp)]);
    assert_eq!(conn["two_connected"]["connected"], true);
    assert_eq!(conn["three_connected"]["connected"], false);
}

#[test]
fn lp_sum_with_irrational_distances_is_flagged() {
    let f = Fixture::new();
    let a = f.file("a.json", COLLINEAR);
    let b = f.file("b.json", EQUILATERAL);
    let r = ok_json(&["construct", "lp-sum", path(&a), path(&b), "--p", "2"]);
    assert_eq!(r["exact"], false);
    assert_eq!(r["points"].as_array().unwrap().len(), 9);
    let r = ok_json(&["construct", "lp-sum", path(&a), path(&b), "--p", "1"]);
    assert_eq!(r["exact"], true);
}

#[test]
fn malformed_input_exits_2_with_location() {
    let f = Fixture::new();
    let bad = f.file("bad.json", "{\"kind\":\"metric\",\n\"points\": [");
    let out = freeiso(&["validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("line 2"));
    assert!(out.stdout.is_empty());

    let tri = f.file("tri.json", r#"{"kind":"metric","points":["a","b","c"],"d":[["0","1","3"],["1","0","1"],["3","1","0"]]}"#);
    let out = freeiso(&["validate", path(&tri)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "TriangleViolation");
}

#[test]
fn cap_exhaustion_exits_3_with_partial_report() {
    let f = Fixture::new();
    let k4 = f.file("k4.json", K4);
    let out = freeiso(&["cycles", path(&k4), "--max-cycles", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["incomplete"], true);
    assert_eq!(r["count"], 3);

    let out = freeiso(&["sigma", path(&k4), "--cap-search", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["incomplete"], true);
}

#[test]
fn caps_from_environment() {
    let f = Fixture::new();
    let k4 = f.file("k4.json", K4);
    let out = Command::new(env!("CARGO_BIN_EXE_freeiso"))
        .args(["cycles", path(&k4)])
        .env("FREEISO_CAPS", "max_cycles=2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["settings"]["caps"]["max_cycles"], 2);
}

#[test]
fn sigma_checks_and_maps_a_molecule() {
    let f = Fixture::new();
    let c4 = f.file("c4.json", C4);
    // Rotation by one step.
    let s = f.file(
        "s.json",
        r#"{"sigma":[[["0","1"],["1","2"]],[["1","2"],["2","3"]],[["2","3"],["3","0"]],[["3","0"],["0","1"]]]}"#,
    );
    let m = f.file("m.json", r#"{"coeffs":{"0":"1","2":"-1"}}"#);
    let r = ok_json(&["sigma", path(&c4), "--sigma", path(&s), "--molecule", path(&m)]);
    assert_eq!(r["passes"], true);
    assert_eq!(r["image"]["coeffs"]["1"], "1");
    assert_eq!(r["image"]["coeffs"]["3"], "-1");
    assert_eq!(r["norm"], r["image_norm"]);

    // C4 is not 3-connected, so the vertex map is not determined.
    let out = freeiso(&["whitney", path(&c4), "--sigma", path(&s)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn whitney_recovers_the_vertex_map() {
    let f = Fixture::new();
    let k4 = f.file("k4.json", K4);
    // Induced by the transposition of a and b.
    let s = f.file(
        "s.json",
        r#"{"sigma":[[["a","b"],["b","a"]],[["a","c"],["b","c"]],[["a","d"],["b","d"]],
            [["b","c"],["a","c"]],[["b","d"],["a","d"]],[["c","d"],["c","d"]]]}"#,
    );
    let w = ok_json(&["whitney", path(&k4), "--sigma", path(&s)]);
    assert_eq!(w["cycle_preserving"], true);
    assert_eq!(w["vertex_map"]["a"], "b");
    assert_eq!(w["vertex_map"]["c"], "c");

    let stars = ok_json(&["whitney", path(&k4), "--exhaustive-bases"]);
    assert_eq!(stars["star_complements"]["a"]["is_star_complement"], true);
}

#[test]
fn float_mode_agrees_on_verdicts() {
    let f = Fixture::new();
    let eq = f.file("eq.json", EQUILATERAL);
    let exact = ok_json(&["prague", path(&eq)]);
    let approx = ok_json(&["prague", path(&eq), "--tol", "1e-9"]);
    assert_eq!(exact["class"], approx["class"]);
    assert_eq!(approx["settings"]["arithmetic"]["tolerance"], 1e-9);
}
