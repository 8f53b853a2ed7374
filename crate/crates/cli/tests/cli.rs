use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn foodn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foodn")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_reports_counts() {
    let o = foodn(&["validate", "--kb", path(&fixture("example7.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2 classes, 2 objects, 0 violations\n");
}

#[test]
fn validate_names_the_violated_rule() {
    let o = foodn(&["validate", "--kb", path(&fixture("example7_inconsistent.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("2 classes, 2 objects, 1 violation\n"), "{out}");
    assert!(out.contains("A.p6: rule `angles-equal`"), "{out}");
}

#[test]
fn broken_documents_exit_2_with_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = std::fs::read_to_string(fixture("example7.json")).unwrap();
    std::fs::write(&bad, text.replacen("\"class\": \"T(A)\"", "\"class\": \"T(Z)\"", 1)).unwrap();
    let o = foodn(&["validate", "--kb", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("$.objects.A.class"), "{}", stderr(&o));
    std::fs::write(&bad, "{ not json").unwrap();
    let o = foodn(&["--machine", "validate", "--kb", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "Parse");
    assert_eq!(foodn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(foodn(&["op", "union", "A", "--kb", "/no/such/file"]).status.code(), Some(2));
}

#[test]
fn union_report_lists_core_and_projections() {
    let o = foodn(&["op", "union", "A", "B", "--kb", path(&fixture("example7.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("members: A, B"));
    assert!(out.contains("class union(T(A),T(B))#1"));
    assert!(out.contains("core: 3 properties, 1 method\n"));
    assert!(out.contains("projection A: 3 properties, 1 method\n"));
    assert!(out.contains("projection B: 3 properties, 1 method\n"));
    assert!(out.contains("  p2 = ({2.9/0.95 + 3/1 + 3.4/0.75}"));
}

#[test]
fn machine_union_is_deterministic_json() {
    let kb = fixture("example7.json");
    let args = ["--machine", "op", "union", "A", "B", "--kb", path(&kb)];
    let first = stdout(&foodn(&args));
    let second = stdout(&foodn(&args));
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["class"]["name"], "union(T(A),T(B))#1");
    assert_eq!(v["class"]["value"]["core"]["properties"].as_array().unwrap().len(), 3);
    assert_eq!(v["class"]["value"]["projections"].as_array().unwrap().len(), 2);
    assert_eq!(v["members"], serde_json::json!(["A", "B"]));
}

#[test]
fn domain_errors_exit_1_and_name_the_error() {
    let kb = fixture("example7.json");
    let o = foodn(&["op", "diff", "A", "A", "--kb", path(&kb)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("EmptyResult"));
    let o = foodn(&["op", "symdiff", "A", "--kb", path(&kb)]);
    assert_eq!(o.status.code(), Some(2));
    let o = foodn(&["--machine", "op", "union", "A", "A", "--kb", path(&kb)]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "DuplicateId");
}

#[test]
fn clone_writes_only_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let kb = fixture("example7.json");
    let before = std::fs::read(&kb).unwrap();
    let out = dir.path().join("cloned.json");
    let o = foodn(&["op", "clone", "A", "1", "--kb", path(&kb), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "new object: A₁ of class T(A)\n");
    assert_eq!(std::fs::read(&kb).unwrap(), before);
    let o = foodn(&["op", "clone", "A", "1", "--kb", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("IdCollision"));
    let o = foodn(&["op", "clone", "A", "1", "--kb", out.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_area_perimeter_and_growth() {
    let kb = fixture("example4.json");
    let o = foodn(&["eval", "--kb", path(&kb), "A", "S"]);
    assert_eq!(stdout(&o), "{4/0.9 + 4.84/1 + 5.76/0.9}, cm^2\n");
    let o = foodn(&["eval", "--kb", path(&kb), "A", "P", "--bind", "a={3/1}, cm"]);
    assert_eq!(stdout(&o), "{12/1}, cm\n");
    let o = foodn(&["eval", "--kb", path(&kb), "A", "H", "--bind", "h=1"]);
    assert_eq!(stdout(&o), "{3/0.9 + 3.2/1 + 3.4/0.9}, cm\n");
    let o = foodn(&["eval", "--kb", path(&kb), "A", "H"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("UnboundParameter"));
    let o = foodn(&["eval", "--kb", path(&kb), "A", "P", "--bind", "a"]);
    assert_eq!(o.status.code(), Some(2));
    let o = foodn(&["--machine", "eval", "--kb", path(&kb), "A", "S"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"]["type"], "fuzzy1");
    assert_eq!(v["result"]["unit"], "cm^2");
}

#[test]
fn modify_then_eval_the_dropped_area() {
    let dir = tempfile::tempdir().unwrap();
    let kb = fixture("example7.json");
    let before = std::fs::read(&kb).unwrap();
    let out = dir.path().join("modified.json");
    let o = foodn(&[
        "modify",
        "--kb",
        path(&kb),
        "A",
        "--modifier",
        path(&fixture("example8_modifier.json")),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("successor: A₁\n"));
    assert!(text.contains("generated class: modify(T(A))#1\n"));
    assert!(text.contains("dropped: f2\n"));
    assert!(text.contains("changed: p6 = 0.85\n"));
    assert_eq!(std::fs::read(&kb).unwrap(), before);
    let o = foodn(&["eval", "--kb", out.to_str().unwrap(), "A₁", "f2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("GuardFailed"), "{}", stderr(&o));
    let o = foodn(&["eval", "--kb", out.to_str().unwrap(), "A₁", "f1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = foodn(&["validate", "--kb", out.to_str().unwrap()]);
    assert_eq!(stdout(&o), "3 classes, 3 objects, 0 violations\n");
}

#[test]
fn strict_mode_rejects_and_auto_mode_reflects() {
    let kb = fixture("example7.json");
    let m = fixture("unequal_sides_modifier.json");
    let o = foodn(&["modify", "--kb", path(&kb), "A", "--modifier", path(&m)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ReflectionViolation"));
    assert!(stderr(&o).contains("sides-equal"));
    let o = foodn(&["modify", "--kb", path(&kb), "A", "--modifier", path(&m), "--mode", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reflected: p5\n"));
    let o = foodn(&["modify", "--kb", path(&kb), "A", "--modifier", path(&m), "--mode", "lenient"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hedges_and_empty_modifier() {
    let kb = fixture("example7.json");
    let o = foodn(&["modify", "--kb", path(&kb), "B", "--modifier", path(&fixture("dilute_p6.json"))]);
    assert!(stdout(&o).contains("changed: p6 = 0.894427191\n"));
    let o = foodn(&["modify", "--kb", path(&kb), "B", "--modifier", path(&fixture("concentrate_p6.json"))]);
    assert!(stdout(&o).contains("changed: p6 = 0.64\n"));
    let o = foodn(&["modify", "--kb", path(&kb), "A", "--modifier", path(&fixture("empty_modifier.json"))]);
    assert_eq!(stdout(&o), "successor: A₁\nclass: T(A) (unchanged)\n");
}

#[test]
fn saved_output_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let kb = fixture("example7.json");
    foodn(&["op", "intersect", "A", "B", "--kb", path(&kb), "--out", a.to_str().unwrap()]);
    foodn(&["op", "clone", "B", "2", "--kb", a.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    let twice = dir.path().join("c.json");
    foodn(&["op", "clone", "B", "2", "--kb", a.to_str().unwrap(), "--out", twice.to_str().unwrap()]);
    assert_eq!(std::fs::read(&b).unwrap(), std::fs::read(&twice).unwrap());
    let o = foodn(&["validate", "--kb", b.to_str().unwrap(), "--strict"]);
    assert_eq!(stdout(&o), "3 classes, 3 objects, 0 violations\n");
}

#[test]
fn empty_knowledge_base_is_valid() {
    let o = foodn(&["validate", "--kb", path(&fixture("empty.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 classes, 0 objects, 0 violations\n");
}
