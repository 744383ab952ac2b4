use std::io::Write;
use std::process::{Command, Output, Stdio};

fn geocycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocycle")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_k3() {
    let o = geocycle(&["lattice", "--kind", "k3", "--classify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r#"{"signature":[3,19],"parity":"even","unimodular":true}"#);
}

#[test]
fn signs_example() {
    let o = geocycle(&["signs", "--p", "3", "--q", "3", "--v", "1/3,2/3,2/3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r#"{"matrix":[[-1,0,0],[0,-1,0],[0,0,1]],"det":1,"claim_holds":true}"#);
}

#[test]
fn arrange_csv_and_plot_data() {
    let plot = std::env::temp_dir().join(format!("geocycle-plot-{}.csv", std::process::id()));
    let o = geocycle(&[
        "arrange",
        "--p",
        "2",
        "--q",
        "3",
        "--n",
        "5",
        "--auto-params",
        "--csv",
        "--emit-plot-data",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for (l, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 6);
        assert_eq!(row[l], "P");
        assert!(row[l + 1..].iter().all(|c| *c == "E"));
        assert!(row.iter().all(|c| ["E", "P", "D"].contains(c)));
    }
    assert!(!csv.contains('\r'));
    let data = std::fs::read_to_string(&plot).unwrap();
    std::fs::remove_file(&plot).ok();
    let mut lines = data.lines();
    assert_eq!(lines.next(), Some("k,tan,lower,upper"));
    assert_eq!(lines.next(), Some("1,-20/99,-8,-1/8"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn arrange_pattern_failure_exits_one() {
    // m = 0 leaves no room for the inequality, so F_k meets H_0 off the diagonal
    let o = geocycle(&["arrange", "--p", "2", "--q", "3", "--n", "3", "--m", "0", "--t", "1/10", "--csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(geocycle(&["signs", "--p", "2", "--q", "2", "--v", "1,0"]).status.code(), Some(2));
    assert_eq!(geocycle(&["lattice", "--kind", "nope"]).status.code(), Some(2));
    assert_eq!(geocycle(&["lattice", "--kind", "bpq", "--classify"]).status.code(), Some(2));
    assert_eq!(geocycle(&["frobnicate"]).status.code(), Some(2));
    let o = geocycle(&["spinor", "--matrix", "1,1;0,1", "--kind", "h"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn spinor_from_flags_and_stdin() {
    let o = geocycle(&["spinor", "--matrix", "5/4,3/4;3/4,5/4", "--kind", "bpq", "--p", "1", "--q", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r#"{"class":2,"real_sign":1}"#);

    let iso = r#"{"matrix":[["-1","0"],["0","1"]],"lattice":{"kind":"bpq","p":1,"q":1},"det":"-1"}"#;
    let mut child = Command::new(env!("CARGO_BIN_EXE_geocycle"))
        .args(["spinor", "--isometry", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(iso.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), r#"{"class":1,"real_sign":1}"#);
}

#[test]
fn congruence_membership() {
    let o = geocycle(&["congruence", "--matrix", "4,3;3,4", "--kind", "bpq", "--p", "1", "--q", "1", "--modulus", "3"]);
    // not an isometry of B_{1,1}
    assert_eq!(o.status.code(), Some(2));
    let o = geocycle(&["congruence", "--matrix", "1,0;0,1", "--kind", "h", "--modulus", "5"]);
    assert_eq!(stdout(&o).trim(), r#"{"modulus":5,"member":true}"#);
    let o = geocycle(&["congruence", "--matrix", "-1,0;0,-1", "--kind", "h", "--modulus", "3"]);
    assert_eq!(stdout(&o).trim(), r#"{"modulus":3,"member":false}"#);
    let o = geocycle(&["congruence", "--matrix", "-1,0;0,-1", "--kind", "h", "--modulus", "2"]);
    assert_eq!(stdout(&o).trim(), r#"{"modulus":2,"member":true}"#);
    assert_eq!(geocycle(&["congruence", "--matrix", "1,0;0,1", "--kind", "h", "--modulus", "0"]).status.code(), Some(2));
}

#[test]
fn roots_json_and_block() {
    let o = geocycle(&["roots", "--kind", "h", "--bound", "1"]);
    assert_eq!(stdout(&o).trim(), "[[-1,1],[1,-1]]");
    assert!(String::from_utf8_lossy(&o.stderr).contains("2 roots"));
    let o = geocycle(&["roots", "--lattice", "k3", "--bound", "6", "--block", "e8:1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let roots = v.as_array().unwrap();
    assert_eq!(roots.len(), 240);
    assert!(roots.iter().all(|r| r.as_array().unwrap().len() == 22));
}

#[test]
fn stdout_is_deterministic() {
    let args = ["arrange", "--p", "3", "--q", "3", "--n", "4", "--auto-params"];
    let a = geocycle(&args);
    let b = geocycle(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = ["verify-all", "--only", "1", "--seed", "7"];
    assert_eq!(geocycle(&v).stdout, geocycle(&v).stdout);
}

#[test]
fn verify_all_single_check() {
    let o = geocycle(&["verify-all", "--only", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["checks"][0]["name"], "lattice-classes");
    assert_eq!(geocycle(&["verify-all", "--only", "9"]).status.code(), Some(2));
}

#[test]
fn thread_cap_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_geocycle"))
        .args(["roots", "--kind", "e8_neg", "--bound", "6"])
        .env("GEOCYCLE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap().as_array().unwrap().len(), 240);
}
