use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn frustration(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frustration"))
        .args(args)
        .env_remove("FRUSTRATION_ORACLE_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn bound<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["bounds"].as_array().unwrap().iter().find(|b| b["name"] == name).unwrap_or_else(|| panic!("no {name}"))
}

#[test]
fn moments_only_report() {
    let path = data("four_var_unique.cnf");
    let r = json(&frustration(&["bounds", "--json", path.to_str().unwrap()]));
    let basic = bound(&r, "basic");
    assert_eq!(basic["value"], "5/23");
    assert_eq!(basic["value_num"], "5");
    assert_eq!(basic["value_den"], "23");
    assert_eq!(basic["sound"], true);
    assert_eq!(r["max_solutions"]["basic"], "3");
    assert_eq!(r["verdict"], "SAT-possible");
    assert!(r.get("exact_count").is_none());
    assert!(r["bounds"].as_array().unwrap().iter().all(|b| b["inputs"] == "moments_only"));
}

#[test]
fn exact_report_adds_cutoff_bounds() {
    let path = data("four_var_unique.cnf");
    let r = json(&frustration(&["bounds", "--exact", "--json", path.to_str().unwrap()]));
    let opt = bound(&r, "optimized_cutoff");
    assert_eq!(opt["value"], "3/38");
    assert_eq!(opt["max_solutions"], "1");
    assert_eq!(opt["params"]["M"], 1);
    assert_eq!(r["exact_count"], 1);
    assert_eq!(bound(&r, "medium_cutoff")["params"]["a"], "23/12");
    assert_eq!(r["moments"]["variance"], "5/8");
}

#[test]
fn unsat_variant_is_certified() {
    let path = data("four_var_unsat.cnf");
    let r = json(&frustration(&["bounds", "--exact", "--json", path.to_str().unwrap()]));
    assert_eq!(r["verdict"], "UNSAT-certified");
    assert_eq!(bound(&r, "optimized_cutoff")["value"], "3/136");
    assert_eq!(r["exact_count"], 0);
    let r = json(&frustration(&["bounds", "--json", path.to_str().unwrap()]));
    assert_eq!(r["verdict"], "SAT-possible");
}

#[test]
fn table_output_rounds_up() {
    let path = data("four_var_unique.cnf");
    let o = frustration(&["bounds", "--exact", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    // 5/23 = 0.2173913...
    assert!(text.contains("0.217392"), "{text}");
    assert!(text.contains("verdict: SAT-possible"));
    assert!(text.contains("exact count: 1"));
}

#[test]
fn float_mode() {
    let path = data("three_clause.cnf");
    let r = json(&frustration(&["bounds", "--float", "--json", path.to_str().unwrap()]));
    assert_eq!(r["mode"], "float");
    assert!((r["basic"].as_f64().unwrap() - 0.375).abs() < 1e-12);
}

#[test]
fn external_estimates_are_conditional() {
    let path = data("four_var_unique.cnf");
    let r = json(&frustration(&["bounds", "--json", "--v1", "1/2", "--v-le", "0.5", path.to_str().unwrap()]));
    let opt = bound(&r, "optimized_cutoff");
    assert_eq!(opt["soundness"], "conditional");
    assert_eq!(opt["sound"], false);
    assert_eq!(opt["value"], "3/38");
    assert!(r["max_solutions"].get("optimized_cutoff").is_none());
}

#[test]
fn parse_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.cnf");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(frustration(&["bounds", empty.to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.path().join("bad.cnf");
    std::fs::write(&bad, "p cnf 2 1\n1 x 0\n").unwrap();
    assert_eq!(frustration(&["count", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn count_and_dist() {
    let o = frustration(&["count", data("three_clause.cnf").to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "3");
    let d = json(&frustration(&["dist", data("four_var_unique.cnf").to_str().unwrap()]));
    assert_eq!(d["n"], 4);
    assert_eq!(d["counts"][0], 1);
    let total: u64 = d["counts"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 16);
}

#[test]
fn oracle_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.cnf");
    let o = frustration(&["gen", "--vars", "40", "--clauses", "100", "--seed", "1", "--out", big.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(frustration(&["count", big.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(frustration(&["bounds", "--exact", big.to_str().unwrap()]).status.code(), Some(3));
    // Moments alone have no cap.
    assert!(frustration(&["bounds", big.to_str().unwrap()]).status.success());

    let o = Command::new(env!("CARGO_BIN_EXE_frustration"))
        .args(["count", data("four_var_unique.cnf").to_str().unwrap()])
        .env("FRUSTRATION_ORACLE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gen_is_reproducible() {
    let args = ["gen", "--vars", "12", "--clauses", "30", "--width", "2-3", "--seed", "7"];
    let a = stdout(&frustration(&args));
    assert_eq!(a, stdout(&frustration(&args)));
    assert!(a.contains("p cnf 12 30"));
    assert_eq!(frustration(&["gen", "--vars", "2", "--clauses", "1", "--width", "3"]).status.code(), Some(1));
}

#[test]
fn slim_writes_formula_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.json");
    let out = dir.path().join("slim.cnf");
    let src = dir.path().join("src.cnf");
    let o = frustration(&["gen", "--vars", "10", "--clauses", "40", "--width", "2-5", "--seed", "3", "--out", src.to_str().unwrap()]);
    assert!(o.status.success());
    let o = frustration(&["slim", src.to_str().unwrap(), "--out", out.to_str().unwrap(), "--log", log.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let log: Value = serde_json::from_str(&std::fs::read_to_string(&log).unwrap()).unwrap();
    assert!(log["count_preserving"].is_boolean());
    assert_eq!(log["log"]["input_vars"], 10);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("p cnf"));
    // The output is itself a valid input.
    assert!(frustration(&["bounds", out.to_str().unwrap()]).status.success());
}

#[test]
fn compare_ensemble() {
    let o = frustration(&["compare", "--ensemble", "--vars", "10", "--clauses", "30", "--width", "3", "--seeds", "100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 100);
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(&row[col("id")], format!("seed{i}"));
        assert_eq!(&row[col("soundness_violations")], "0");
        assert_eq!(&row[col("error")], "");
    }
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("instances=100 errors=0 soundness_violations=0"), "{stderr}");
}

#[test]
fn compare_directory_reproduces_hand_values() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["three_clause.cnf", "four_var_unique.cnf"] {
        std::fs::copy(data(name), dir.path().join(name)).unwrap();
    }
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let o = frustration(&["compare", "--dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    // Sorted by file name.
    assert_eq!(&rows[0][col("id")], "four_var_unique.cnf");
    assert_eq!(&rows[0][col("basic")], "5/23");
    assert_eq!(&rows[0][col("basic_cap")], "3");
    assert_eq!(&rows[0][col("optimized_cutoff")], "3/38");
    assert_eq!(&rows[0][col("optimized_cutoff_cap")], "1");
    assert_eq!(&rows[0][col("exact_count")], "1");
    assert_eq!(&rows[1][col("basic")], "3/8");
    assert_eq!(&rows[1][col("v0")], "3/8");
    assert_eq!(&rows[1][col("exact_count")], "3");
}

#[test]
fn compare_empty_directory_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = frustration(&["compare", "--dir", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("id,n,m,exact_count,v0,basic,"));
}
