use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
}

fn bcn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = bcn(&full);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(name: &str) -> String {
    model(name).to_string_lossy().into_owned()
}

fn partition(v: &Value) -> Vec<Vec<u64>> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn convert_three_state_all_forms() {
    for f in [
        "three_state.bcn",
        "three_state.json",
        "three_state_matrix.json",
    ] {
        let out = stdout(&bcn(&["convert", &path(f)]));
        assert!(out.contains("L_1 = δ_8[3,1,3,1,1,3,1,3]"), "{f}: {out}");
        assert!(out.contains("L_2 = δ_8[4,5,4,5,4,5,4,5]"), "{f}: {out}");
        assert!(out.contains("H = δ_2[2,1,1,1,1,1,1,2]"), "{f}: {out}");
    }
}

#[test]
fn convert_identity_and_shift_register() {
    let out = stdout(&bcn(&["convert", &path("identity.bcn")]));
    assert!(
        out.contains("L_1 = δ_2[1,2]") && out.contains("H = δ_2[1,2]"),
        "{out}"
    );
    let v = json(&["convert", &path("shift3.bcn")]);
    assert_eq!(
        v["L"],
        serde_json::json!([[1, 3, 5, 7, 1, 3, 5, 7], [2, 4, 6, 8, 2, 4, 6, 8]])
    );
    assert_eq!(v["H"], serde_json::json!([1, 1, 1, 1, 2, 2, 2, 2]));
}

#[test]
fn converted_matrix_file_gives_identical_analyses() {
    let converted = stdout(&bcn(&["--json", "convert", &path("three_state.bcn")]));
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(converted.as_bytes()).unwrap();
    let tmp = file.path().to_string_lossy().into_owned();
    for cmd in ["obsmat", "decompose"] {
        assert_eq!(
            json(&[cmd, &path("three_state.bcn")]),
            json(&[cmd, &tmp]),
            "{cmd}"
        );
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["--json", "decompose", "--all"],
        vec!["--json", "obsmat"],
        vec!["decompose"],
    ] {
        let mut a = args.clone();
        let p = path("nonunique.json");
        a.push(&p);
        assert_eq!(bcn(&a).stdout, bcn(&a).stdout);
    }
}

#[test]
fn obsmat_reports() {
    let v = json(&["obsmat", &path("three_state.bcn")]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["rows"][3]["word"], serde_json::json!([1, 2]));
    assert_eq!(
        partition(&v["observability_partition"]),
        vec![vec![1, 8], vec![2, 4, 5, 7], vec![3, 6]]
    );
    assert_eq!(v["observable_columns"], false);
    assert_eq!(v["undecomposable_by_parity"], false);

    let v = json(&["obsmat", &path("odd_block.json")]);
    assert_eq!(
        partition(&v["observability_partition"]),
        vec![vec![1, 2, 3], vec![4]]
    );
    assert_eq!(v["undecomposable_by_parity"], true);

    let v = json(&["obsmat", &path("shift3.bcn")]);
    assert_eq!(v["observable_columns"], true);
    assert_eq!(v["observability_partition"].as_array().unwrap().len(), 8);

    let v = json(&["obsmat", "--max-rows", "2", &path("three_state.bcn")]);
    assert!(v["rows"].is_null());
}

#[test]
fn decompose_three_state() {
    let v = json(&["decompose", &path("three_state.bcn")]);
    assert_eq!(v["order"], 1);
    assert_eq!(v["s"], 2);
    assert_eq!(
        partition(&v["partition"]),
        vec![vec![1, 8], vec![2, 7], vec![3, 6], vec![4, 5]]
    );
    assert_eq!(v["alternatives"], 0);
    assert_eq!(v["equations"]["update"].as_array().unwrap().len(), 3);
    let t: Vec<u64> = serde_json::from_value(v["T"].clone()).unwrap();
    let t = t
        .iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let check = json(&["verify", &path("three_state.bcn"), "--t", &t, "--s", "2"]);
    assert_eq!(check["passed"], true);
}

#[test]
fn decompose_lists_all_partitions() {
    let v = json(&["decompose", "--all", &path("nonunique.json")]);
    assert_eq!(v["order"], 1);
    let all: Vec<Vec<Vec<u64>>> = serde_json::from_value(v["all_partitions"].clone()).unwrap();
    assert!(all.contains(&vec![vec![1, 7], vec![2, 6], vec![3, 5], vec![4, 8]]));
    assert!(all.contains(&vec![vec![1, 7], vec![2, 4], vec![3, 5], vec![6, 8]]));
    assert_eq!(v["alternatives"].as_u64().unwrap() + 1, all.len() as u64);
}

#[test]
fn decompose_undecomposable_is_success() {
    for f in ["shift3.bcn", "shift4.bcn", "odd_block.json"] {
        let o = bcn(&["decompose", &path(f)]);
        assert!(o.status.success());
        assert!(
            stdout(&o).contains("undecomposable with respect to outputs"),
            "{f}"
        );
    }
}

#[test]
fn decompose_fixed_order() {
    let v = json(&["decompose", "--order", "2", &path("three_state.bcn")]);
    assert!(v["order"].is_null());
    let v = json(&["decompose", "--order", "1", &path("three_state.bcn")]);
    assert_eq!(v["order"], 1);
    assert_eq!(
        bcn(&["decompose", "--order", "9", &path("three_state.bcn")])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_reports() {
    let ex1 = path("three_state.bcn");
    let v = json(&["verify", &ex1, "--t", "3,6,1,8,7,2,5,4", "--s", "2"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["M"], serde_json::json!([1, 2, 1, 1]));

    let v = json(&["verify", &ex1, "--t", "1,2,3,4,5,6,7,8", "--s", "2"]);
    assert_eq!(v["passed"], false);
    let failures = v["failures"].as_array().unwrap();
    assert!(failures[0]["quotient"]
        .as_str()
        .unwrap()
        .starts_with("Q L_1"));
    assert_eq!(
        failures[0]["entries"],
        serde_json::json!([[1, "1/2"], [2, "1/2"]])
    );

    let v = json(&["verify", &ex1, "--t", "δ_8[1,2,3,4,5,6,7,8]", "--s", "3"]);
    assert_eq!(v["passed"], true);

    assert_eq!(
        bcn(&["verify", &ex1, "--t", "1,1,3,4,5,6,7,8", "--s", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        bcn(&["verify", &ex1, "--t", "1,2,x", "--s", "2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn simulate_reports() {
    let v = json(&[
        "simulate",
        &path("three_state.bcn"),
        "--x0",
        "1",
        "--inputs",
        "1,1",
    ]);
    assert_eq!(v["states"], serde_json::json!([1, 3, 3]));
    assert_eq!(v["outputs"], serde_json::json!([2, 1, 1]));

    let v = json(&[
        "simulate",
        &path("three_state.bcn"),
        "--x0",
        "5",
        "--steps",
        "0",
    ]);
    assert_eq!(v["states"], serde_json::json!([5]));
    assert_eq!(v["outputs"].as_array().unwrap().len(), 1);

    let v = json(&[
        "simulate",
        &path("shift3.bcn"),
        "--x0",
        "8",
        "--inputs",
        "1,1,1",
        "--bits",
    ]);
    assert_eq!(v["states"], serde_json::json!([8, 7, 5, 1]));
    assert_eq!(
        v["state_bits"],
        serde_json::json!(["000", "001", "011", "111"])
    );

    let o = bcn(&[
        "simulate",
        &path("three_state.bcn"),
        "--x0",
        "9",
        "--inputs",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = bcn(&[
        "simulate",
        &path("three_state.bcn"),
        "--x0",
        "1",
        "--steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn regularity_reports() {
    let b = path("nonunique.json");
    let v = json(&[
        "regularity",
        &b,
        "--t1",
        "3,5,1,7,2,6,4,8",
        "--t2",
        "3,5,1,6,2,7,4,8",
        "--s",
        "2",
    ]);
    assert_eq!(v["R"]["denominator"], 4);
    assert_eq!(v["R"]["numerators"], serde_json::json!([[3, 1], [1, 3]]));
    assert_eq!(v["verdict"], "NotRegular");

    let v = json(&[
        "regularity",
        &b,
        "--t1",
        "3,5,1,7,2,6,4,8",
        "--t2",
        "3,5,1,7,2,6,4,8",
        "--s",
        "2",
    ]);
    assert_eq!(v["R"]["numerators"], serde_json::json!([[1, 0], [0, 1]]));
    assert_eq!(v["verdict"], "Inconclusive");

    let ex1 = path("three_state.bcn");
    let v = json(&[
        "regularity",
        &ex1,
        "--t1",
        "1,3,5,7,8,6,4,2",
        "--t2",
        "2,4,6,8,7,5,3,1",
        "--s",
        "2",
    ]);
    assert_eq!(v["verdict"], "Inconclusive");

    let o = bcn(&[
        "regularity",
        &ex1,
        "--t1",
        "1,2,3,4,5,6,7,8",
        "--t2",
        "2,4,6,8,7,5,3,1",
        "--s",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(
        bcn(&["convert", "/nonexistent/model.bcn"]).status.code(),
        Some(1)
    );
    assert_eq!(
        bcn(&["--max-n", "3", "convert", &path("shift4.bcn")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(bcn(&["frobnicate"]).status.code(), Some(1));

    let mut child = Command::new(env!("CARGO_BIN_EXE_bcn"))
        .args(["convert", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"x' = x &\ny = x\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn quiet_and_timing_flags() {
    let o = stdout(&bcn(&["--quiet", "decompose", &path("three_state.bcn")]));
    assert_eq!(o.lines().count(), 1);
    let o = stdout(&bcn(&["--timing", "convert", &path("three_state.bcn")]));
    assert!(o.lines().last().unwrap().starts_with("elapsed:"));
    let o = stdout(&bcn(&[
        "--timing",
        "--json",
        "convert",
        &path("three_state.bcn"),
    ]));
    assert!(!o.contains("elapsed"));
}
