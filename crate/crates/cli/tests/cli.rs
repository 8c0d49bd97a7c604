use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dynlis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynlis")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_reports_final_length() {
    let dir = TempDir::new().unwrap();
    let trace = "# values 3 1 4 1 5 9 2 6\n\
        append v=3\nappend v=1\nappend v=4\nappend v=1\n\
        append v=5\nappend v=9\nappend v=2\nappend v=6\nquery\nextract\n";
    let path = write(&dir, "pi.trace", trace);
    let out = dynlis(&["verify", "--trace", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("op 8: query -> 4"), "{text}");
    assert!(text.contains("final_length=4"), "{text}");
    assert!(text.trim_end().ends_with("status: ok"), "{text}");

    let out = dynlis(&["verify", "--trace", &path, "--mode", "length_only"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_empty_trace() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "empty.trace", "");
    let out = dynlis(&["verify", "--trace", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("final_length=0"));
}

#[test]
fn verify_absent_key_fails() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.trace", "insert_key k=1 v=5\ndelete_key k=2\n");
    let out = dynlis(&["verify", "--trace", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("IndexNotFound"), "{}", stdout(&out));
}

#[test]
fn malformed_trace_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "junk.trace", "append v=1\nshuffle\n");
    let out = dynlis(&["verify", "--trace", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_trace_is_io_error() {
    let out = dynlis(&["verify", "--trace", "/nonexistent/dir/x.trace"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gen_append_only() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("w.trace");
    let p = path.to_str().unwrap();
    let out = dynlis(&["gen", "--seed", "7", "--n", "100", "--mix", "append-only", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 100);
    assert!(text.lines().all(|l| l.starts_with("append ")));

    let again = dynlis(&["gen", "--seed", "7", "--n", "100", "--mix", "append-only"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn gen_adversarial_then_verify() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("inc.trace");
    let p = path.to_str().unwrap();
    let out = dynlis(&["gen", "--adversarial", "increasing", "--n", "50", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let out = dynlis(&["verify", "--trace", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("final_length=50"));
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(dynlis(&["gen", "--mix", "append=0.5"]).status.code(), Some(2));
    assert_eq!(dynlis(&["gen", "--adversarial", "zigzag"]).status.code(), Some(2));
    assert_eq!(dynlis(&["verify"]).status.code(), Some(2));
    assert_eq!(dynlis(&["verify", "--trace", "x", "--mode", "partial"]).status.code(), Some(2));
}

fn check_csv(path: &Path, rows: usize) {
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "op_index,op_kind,n_before,r_before,tree_ops,side_ops,ns");
    let data: Vec<&&str> = lines[1..].iter().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), rows);
    assert!(data.iter().all(|l| l.split(',').count() == 7));
    assert!(text.contains("# cost_constant="));
    assert!(text.contains("# max_insert_ratio="));
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("b.csv");
    let out = dynlis(&["bench", "--seed", "3", "--n", "400", "--mix", "append-only", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    check_csv(&csv, 400);

    let trace = write(&dir, "t.trace", "append v=2\nquery\ninsert_front v=1\ndelete_pos p=0\n");
    let csv = dir.path().join("t.csv");
    let out = dynlis(&["bench", "--trace", &trace, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    check_csv(&csv, 3);
}
