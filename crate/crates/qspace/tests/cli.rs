use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qspace::{dump_structure, load_structure, parse_structure};
use serde_json::Value;

const FIXTURES: [&str; 4] = ["classical", "lattice1d", "epsilon", "n2twist"];

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn qspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspace")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn validate_classical_matches_golden() {
    let out = qspace(&["validate", &fixture("classical")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("validate_classical.txt"));
    assert!(stdout(&out).contains("6/6 checks passed"));
}

#[test]
fn dims_text_and_json() {
    let f = fixture("classical");
    let text = qspace(&["dims", &f, "--max-degree", "5"]);
    assert_eq!(text.status.code(), Some(0));
    assert_eq!(stdout(&text), golden("dims_classical.txt"));
    let js = qspace(&["--json", "dims", &f, "--max-degree", "5"]);
    assert_eq!(stdout(&js), golden("dims_classical.json"));

    let table: Vec<Vec<usize>> = stdout(&text)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    let rows = json(&js)["rows"].as_array().unwrap().clone();
    assert_eq!(table.len(), rows.len());
    for (t, r) in table.iter().zip(&rows) {
        let r: Vec<usize> = ["n", "size", "rank"].iter().map(|k| r[k].as_u64().unwrap() as usize).collect();
        assert_eq!(t, &r);
    }
    let ranks: Vec<usize> = table.iter().map(|t| t[2]).collect();
    assert_eq!(ranks, [1, 4, 6, 4, 1, 0]);
}

#[test]
fn report_json_mirrors_text() {
    let f = fixture("lattice1d");
    let text = qspace(&["identities", &f]);
    let js = qspace(&["--json", "identities", &f]);
    assert_eq!(text.status.code(), Some(1));
    assert_eq!(js.status.code(), Some(1));
    let v = json(&js);
    let mut from_json = Vec::new();
    for section in v["sections"].as_array().unwrap() {
        from_json.push(section["title"].as_str().unwrap().to_string());
        for c in section["checks"].as_array().unwrap() {
            let status = if c["passed"].as_bool().unwrap() { "PASS" } else { "FAIL" };
            let mut line = format!("{status}  {}", c["name"].as_str().unwrap());
            if let Some(w) = c["witness"].as_str() {
                line.push_str(&format!("  [{w}]"));
            }
            from_json.push(line);
        }
        from_json.push(format!("{}/{} checks passed", section["passed"], section["total"]));
    }
    let from_text: Vec<String> = stdout(&text).lines().map(String::from).collect();
    assert_eq!(from_text, from_json);
}

#[test]
fn derive_prints_polynomial() {
    let out = qspace(&["derive", &fixture("lattice1d"), "x0*x0*x0", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "(1/4) + (3/2)*x0 + (3)*x0*x0\n");
    let out = qspace(&["--json", "derive", &fixture("epsilon"), "(3/2+1/2i)*x0*x2*x1", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["i"], 2);
    assert!(v["result"].as_str().unwrap().contains("x0*x1"), "{v}");
}

#[test]
fn dispersion_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("o.csv");
    let csv_s = csv.to_string_lossy().into_owned();
    let args = ["dispersion", &fixture("epsilon"), "--grid", "0:2:5,0:2:5,0,0", "--mass", "1", "--out", &csv_s];
    let out = qspace(&[&args[..], &["--emit-gnuplot"]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let body = fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("p0,p1,p2,p3,m2,re_prop,im_prop"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 25);
    // p = (1, 0, 0, 0) sits on the mass shell.
    assert!(rows[10][5].is_nan() && rows[10][6].is_nan());
    assert!(rows.iter().filter(|r| r[5].is_nan()).count() == 1);
    assert!(dir.path().join("o.gp").exists());
    assert!(stdout(&out).starts_with("wrote 25 rows"));

    let first = body.clone();
    let js = qspace(&[&["--json"], &args[..]].concat());
    assert_eq!(fs::read_to_string(&csv).unwrap(), first);
    let v = json(&js);
    assert_eq!(v["rows"], 25);
    assert_eq!(v["poles"], 1);
}

#[test]
fn dispersion_rejects_bad_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("o.csv").to_string_lossy().into_owned();
    for grid in ["0:2:5,0,0", "0:2", "0:1:x,0,0,0"] {
        let out = qspace(&["dispersion", &fixture("epsilon"), "--grid", grid, "--out", &out_path]);
        assert_eq!(out.status.code(), Some(2), "{grid}");
    }
    let out = qspace(&["dispersion", &fixture("epsilon"), "--grid", "0,0,0,0", "--out", "/nonexistent/dir/o.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn dump_round_trips_fixtures() {
    for name in FIXTURES {
        let path = fixture(name);
        let out = qspace(&["--dump", "validate", &path]);
        assert_eq!(out.status.code(), Some(0));
        let dumped = stdout(&out);
        assert_eq!(parse_structure(&dumped).unwrap(), load_structure(Path::new(&path)).unwrap(), "{name}");
        assert_eq!(dumped, fs::read_to_string(&path).unwrap(), "{name} fixture is not canonical");
        assert_eq!(dump_structure(&parse_structure(&dumped).unwrap()), dumped);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(qspace(&["--help"]).status.code(), Some(0));
    assert_eq!(qspace(&[]).status.code(), Some(2));
    assert_eq!(qspace(&["validate", &fixture("classical"), "--bogus"]).status.code(), Some(2));
    assert_eq!(qspace(&["derive", &fixture("classical"), "x9", "0"]).status.code(), Some(2));
    assert_eq!(qspace(&["verify-series", &fixture("classical"), "--n-max", "5"]).status.code(), Some(2));

    let missing = qspace(&["validate", "/nonexistent.json"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(stderr(&missing).starts_with("error: /nonexistent.json"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 1}").unwrap();
    assert_eq!(qspace(&["validate", &bad.to_string_lossy()]).status.code(), Some(3));
    let singular = fs::read_to_string(fixture("lattice1d")).unwrap().replace("[\"1\"]\n  ],\n  \"degree", "[\"0\"]\n  ],\n  \"degree");
    fs::write(&bad, singular).unwrap();
    let out = qspace(&["validate", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("singular"), "{}", stderr(&out));

    assert_eq!(qspace(&["identities", &fixture("lattice1d")]).status.code(), Some(1));
    assert_eq!(qspace(&["verify-series", &fixture("lattice1d"), "--n-max", "6"]).status.code(), Some(0));
}

#[test]
fn fock_check_with_braid_file() {
    let f = fixture("n2twist");
    let dir = tempfile::tempdir().unwrap();
    let braid = dir.path().join("braid.json");
    let flip = r#"{"n": 2, "b": [["1","0","0","0"],["0","0","1","0"],["0","1","0","0"],["0","0","0","1"]]}"#;
    fs::write(&braid, flip).unwrap();
    let with_file = qspace(&["fock-check", &f, "--braid", &braid.to_string_lossy(), "-n", "3"]);
    assert_eq!(with_file.status.code(), Some(0), "{}", stdout(&with_file));
    assert_eq!(stdout(&with_file), stdout(&qspace(&["fock-check", &f, "-n", "3"])));

    fs::write(&braid, flip.replace("\"1\"", "\"2\"")).unwrap();
    let doubled = qspace(&["fock-check", &f, "--braid", &braid.to_string_lossy()]);
    assert_eq!(doubled.status.code(), Some(1));
    assert!(stdout(&doubled).contains("FAIL"));
}

#[test]
fn seed_is_reproducible() {
    let f = fixture("n2twist");
    let a = qspace(&["identities", &f, "--seed", "7", "--degree", "3"]);
    let b = qspace(&["identities", &f, "--seed", "7", "--degree", "3"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
}
