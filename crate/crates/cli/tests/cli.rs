use std::process::{Command, Output};

fn paramrls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramrls"))
        .args(args)
        .output()
        .expect("run paramrls")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    let line = text.lines().last().expect("stderr is empty");
    serde_json::from_str(line).expect("stderr is not JSON")
}

#[test]
fn table_has_header_and_81_rows() {
    let o = paramrls(&["table", "--periods", "80"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,c_l_1,c_u_1,c_l_3,c_u_3,c_l_5,c_u_5");
    assert_eq!(lines.len(), 82);
    assert_eq!(
        lines[2],
        "1,0.475,0.47625,0.4625,0.4679140625,0.4375,0.4581298828125"
    );
}

#[test]
fn expected_time_rows() {
    let o = paramrls(&["expected-time", "--n", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n,k,expected_time\n10,1,100\n10,2,225\n10,3,360\n"));
}

#[test]
fn walk_reports_exact_values() {
    let o = paramrls(&["walk", "--phi", "2", "--format", "json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[1]["exact"], "4");
}

#[test]
fn drift_table_needs_k() {
    let o = paramrls(&["drift", "--n", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["error"]["path"], "drift.k");
}

#[test]
fn race_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("race.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_paramrls"))
        .args([
            "race",
            "--problem",
            "ridge-star",
            "--n",
            "20",
            "--kappa",
            "n*n",
        ])
        .args(["--a", "1", "--b", "2", "--replicates", "50", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("outcome,count,proportion,ci_low,ci_high")
    );
    let total: u64 = lines
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 50);
}

#[test]
fn usage_errors_exit_2_with_json() {
    let o = paramrls(&["tune", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
}

#[test]
fn help_exits_0() {
    assert!(paramrls(&["--help"]).status.success());
}

#[test]
fn unknown_scenario_key_names_its_path() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(
        &file,
        r#"{"name": "bad", "mode": "race", "problem": {"kind": "one_max", "n": 10},
            "tuner": {"kapa": 5}, "race": {"a": 1, "b": 2}}"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_paramrls"))
        .args(["race", "--scenario"])
        .arg(&file)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = error_json(&o);
    assert_eq!(err["error"]["kind"], "config");
    assert_eq!(err["error"]["path"], "tuner.kapa");
}

#[test]
fn mode_mismatch_is_rejected() {
    let o = paramrls(&["race", "--builtin", "ridge_tuning_time"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_json(&o)["error"]["path"], "mode");
}

#[test]
fn invalid_values_are_reported() {
    let o = paramrls(&[
        "tune",
        "--problem",
        "one-max",
        "--n",
        "3",
        "--phi",
        "5",
        "--kappa",
        "10",
        "--evals",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(error_json(&o)["error"]["message"]
        .as_str()
        .unwrap()
        .contains("phi"));
}

#[test]
fn builtins_are_listed_and_printable() {
    let o = paramrls(&["scenarios"]);
    let names = stdout(&o);
    assert_eq!(names.lines().count(), 13);
    for name in names.lines() {
        let o = paramrls(&["scenarios", name]);
        assert!(o.status.success());
        let sc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(sc["name"], name);
    }
}
