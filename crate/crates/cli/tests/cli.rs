use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use braidshelf::matched::{ActionFamily, MatchedProductSystem};
use braidshelf::solution::{Solution, SolutionFile};
use braidshelf::theorem::TheoremReport;
use braidshelf::{OperationTable, Permutation};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidshelf"))
        .args(args)
        .env("BRAIDSHELF_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const CONSTANT_B: &str = r#"{"size":2,"lambda":[[0,1],[0,1]],"rho":[[0,0],[1,1]]}"#;

fn system_json(alpha: &str, beta: &str) -> String {
    format!(r#"{{"r_s":{CONSTANT_B},"r_t":{CONSTANT_B},"alpha":{alpha},"beta":{beta}}}"#)
}

#[test]
fn identity_system_passes_left_left_check() {
    let dir = TempDir::new().unwrap();
    let sys = write(
        &dir,
        "system_identity.json",
        &system_json("[[0,1],[0,1]]", "[[0,1],[0,1]]"),
    );
    let out = run(&["mp-check", "--case", "ll", arg(&sys)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["valid"], true);
}

#[test]
fn constant_action_product_entry() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "example.json", &system_json("[[1,0],[1,0]]", "[[0,1],[0,1]]"));
    let target = dir.path().join("product.json");
    let out = run(&["mp-build", arg(&sys), "--out", arg(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("matched product on 4 elements"));
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.ends_with('\n'));
    let file: SolutionFile = serde_json::from_str(&text).unwrap();
    let enc = file.pair_encoding.expect("annotated");
    assert_eq!(enc.t_size, 2);
    let product = file.into_unchecked().unwrap();
    assert_eq!(
        product.apply(enc.encode(0, 0), enc.encode(1, 1)),
        (enc.encode(0, 1), enc.encode(1, 1))
    );
    // the emitted file re-parses as a checked solution
    let reparsed: Solution = serde_json::from_str(&text).unwrap();
    assert_eq!(reparsed, product);
}

#[test]
fn invalid_system_reports_violations() {
    let dir = TempDir::new().unwrap();
    let triv = r#"{"size":3,"lambda":[[0,1,2],[0,1,2],[0,1,2]],"rho":[[0,0,0],[1,1,1],[2,2,2]]}"#;
    let text =
        format!(r#"{{"r_s":{triv},"r_t":{triv},"alpha":[[1,0,2],[0,2,1],[0,1,2]],"beta":[[0,1,2],[0,1,2],[0,1,2]]}}"#);
    // r(x,y) = (y, x) is the solution of the trivial shelf
    let text = text.replace(
        r#""rho":[[0,0,0],[1,1,1],[2,2,2]]"#,
        r#""rho":[[0,1,2],[0,1,2],[0,1,2]]"#,
    );
    let sys = write(&dir, "bad.json", &text);
    let out = run(&["mp-check", arg(&sys)]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["valid"], false);
    assert_eq!(report["violations"][0]["condition"], "s1");
    assert_eq!(report["violations"][0]["witness"], serde_json::json!([0, 1]));
    let verbose = run(&["mp-check", "--verbose", arg(&sys)]);
    let all: serde_json::Value = serde_json::from_str(&stdout(&verbose)).unwrap();
    assert!(all["violations"].as_array().unwrap().len() > report["violations"].as_array().unwrap().len());
    let build = run(&["mp-build", arg(&sys)]);
    assert_eq!(build.status.code(), Some(1));
    let ll = run(&["mp-check", "--case", "ll", arg(&sys)]);
    let ll: serde_json::Value = serde_json::from_str(&stdout(&ll)).unwrap();
    assert_eq!(ll["violations"][0]["condition"], "l1");
}

#[test]
fn case_mismatch_and_bad_input_exit_two() {
    let dir = TempDir::new().unwrap();
    let sys = write(&dir, "sys.json", &system_json("[[0,1],[0,1]]", "[[0,1],[0,1]]"));
    let out = run(&["mp-check", "--case", "rr", arg(&sys)]);
    assert_eq!(out.status.code(), Some(2));
    let broken = write(&dir, "broken.json", "{\"size\": 2, \"table\": [[0, 1],\n [1, 5]]}");
    let out = run(&["verify-shelf", arg(&broken)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("table[1][1]"));
    let truncated = write(&dir, "truncated.json", "{\"size\": 2,\n \"table\": [[0, 1]");
    let out = run(&["verify-shelf", arg(&truncated)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let missing = run(&["verify-shelf", "/nonexistent/table.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let big = run(&["enum", "shelves", "--max-n", "5"]);
    assert_eq!(big.status.code(), Some(2));
}

#[test]
fn shelf_and_solution_verification() {
    let dir = TempDir::new().unwrap();
    let rack = write(&dir, "rack.json", r#"{"size":2,"table":[[1,0],[1,0]]}"#);
    let out = run(&["verify-shelf", arg(&rack)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["rack"], true);
    let not_shelf = write(&dir, "ns.json", r#"{"size":2,"table":[[1,0],[0,0]]}"#);
    assert_eq!(run(&["verify-shelf", arg(&not_shelf)]).status.code(), Some(1));
    assert_eq!(
        run(&["verify-shelf", "--side", "right", arg(&rack)]).status.code(),
        Some(1)
    );
    let right_rack = write(&dir, "right.json", r#"{"size":2,"table":[[1,1],[0,0]]}"#);
    assert_eq!(
        run(&["verify-shelf", "--side", "right", arg(&right_rack)])
            .status
            .code(),
        Some(0)
    );

    let non_solution = write(
        &dir,
        "nonsol.json",
        r#"{"size":2,"lambda":[[1,0],[0,0]],"rho":[[0,0],[0,0]]}"#,
    );
    let out = run(&["verify-solution", arg(&non_solution)]);
    assert_eq!(out.status.code(), Some(1));
    let flip = write(
        &dir,
        "flip.json",
        r#"{"size":2,"lambda":[[0,1],[0,1]],"rho":[[0,1],[0,1]]}"#,
    );
    let out = run(&["verify-solution", arg(&flip)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["properties"]["involutive"], true);
}

#[test]
fn structure_shelf_and_derive() {
    let dir = TempDir::new().unwrap();
    // r(x, y) = (1 - y, x)
    let sol = write(
        &dir,
        "sol.json",
        r#"{"size":2,"lambda":[[1,0],[1,0]],"rho":[[0,1],[0,1]]}"#,
    );
    let out = run(&["structure-shelf", arg(&sol)]);
    assert_eq!(out.status.code(), Some(0));
    let table: OperationTable = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(table, OperationTable::new(vec![vec![1, 0], vec![1, 0]]).unwrap());
    let out = run(&["derive", arg(&sol)]);
    let derived: Solution = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(derived, Solution::from_map_unchecked(2, |x, y| (y, 1 - x)).unwrap());
    let degenerate = write(
        &dir,
        "deg.json",
        r#"{"size":2,"lambda":[[0,0],[0,0]],"rho":[[0,0],[0,0]]}"#,
    );
    let out = run(&["structure-shelf", arg(&degenerate)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn enumeration_counts() {
    let out = run(&["enum", "shelves", "--max-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let blocks: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(blocks[1]["count"], 9);
    let racks = run(&["enum", "racks", "--max-n", "2"]);
    let blocks: serde_json::Value = serde_json::from_str(&stdout(&racks)).unwrap();
    assert_eq!(blocks[1]["count"], 2);
    let sols = run(&["enum", "solutions", "--max-n", "2"]);
    let blocks: serde_json::Value = serde_json::from_str(&stdout(&sols)).unwrap();
    assert_eq!(blocks[1]["count"], 43);
    let classes = run(&["enum", "shelves", "--max-n", "2", "--up-to-iso"]);
    let blocks: serde_json::Value = serde_json::from_str(&stdout(&classes)).unwrap();
    assert_eq!(blocks[1]["count"], 6);
}

#[test]
fn search_outputs_parse_as_systems() {
    let dir = TempDir::new().unwrap();
    let r = write(&dir, "r.json", CONSTANT_B);
    let out = run(&["search", arg(&r), arg(&r), "--case", "ll"]);
    assert_eq!(out.status.code(), Some(0));
    let found: Vec<MatchedProductSystem> = serde_json::from_str(&stdout(&out)).unwrap();
    let swap = Permutation::new(vec![1, 0]).unwrap();
    for theta in [Permutation::identity(2), swap.clone()] {
        for eta in [Permutation::identity(2), swap.clone()] {
            let alpha = ActionFamily::constant(2, theta.clone()).unwrap();
            let beta = ActionFamily::constant(2, eta.clone()).unwrap();
            assert!(found.iter().any(|s| s.alpha() == &alpha && s.beta() == &beta));
        }
    }
    let sampled = run(&[
        "search",
        arg(&r),
        arg(&r),
        "--mode",
        "sampled",
        "--samples",
        "50",
        "--seed",
        "3",
    ]);
    assert_eq!(
        sampled.stdout,
        run(&[
            "search",
            arg(&r),
            arg(&r),
            "--mode",
            "sampled",
            "--samples",
            "50",
            "--seed",
            "3"
        ])
        .stdout
    );
}

#[test]
fn theorem_suite_passes() {
    let out = run(&["check-theorems", "--max-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let reports: Vec<TheoremReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 10);
    assert!(reports.iter().all(|r| r.counterexample.is_none()));
    assert!(String::from_utf8_lossy(&out.stderr)
        .lines()
        .all(|l| l.starts_with("PASS")));
    let one = run(&[
        "check-theorems",
        "--max-n",
        "3",
        "--theorem",
        "T5.1",
        "--mode",
        "sampled",
        "--samples",
        "500",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(run(&["check-theorems", "--theorem", "X9"]).status.code(), Some(2));
}

#[test]
fn invalid_worker_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_braidshelf"))
        .args(["enum", "shelves", "--max-n", "1"])
        .env("BRAIDSHELF_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
