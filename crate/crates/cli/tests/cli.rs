use std::process::{Command, Output};

use lucanomial::report::read_json;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lucanomial")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fibonacci_theorem_n_holds_up_to_300() {
    let o = run(&["verify", "--P", "1", "--Q", "-1", "--theorem", "N", "--pmin", "7", "--pmax", "300", "--kmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("counterexamples 0"));
}

#[test]
fn search_lists_maximal_rank_primes() {
    let o = run(&["search", "--P", "1", "--Q", "-1", "--pmin", "7", "--pmax", "30", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let primes: Vec<u64> = rows.as_array().unwrap().iter().map(|r| r["p"].as_u64().unwrap()).collect();
    assert_eq!(primes, [7, 11, 19, 23]);
}

#[test]
fn ljwe_at_five_for_two_two() {
    let o = run(&["verify", "--P", "2", "--Q", "2", "--theorem", "LjWe", "--pmin", "5", "--pmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = run(&[
        "verify", "--grid-p", "2", "--grid-q", "2", "--pmin", "5", "--pmax", "40", "--format", "json", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r.holds && r.error.is_none()));
    assert!(records.iter().any(|r| r.theorem_id == "P6"));
}

#[test]
fn output_is_independent_of_jobs() {
    let base = ["verify", "--grid-p", "2", "--Q", "-1", "--pmax", "60", "--format", "csv"];
    let one = run(&[&base[..], &["--jobs", "1"]].concat());
    let four = run(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn seeded_crosscheck_passes() {
    let o = run(&["verify", "--P", "3", "--Q", "2", "--pmax", "80", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 mismatches"));
}

#[test]
fn lemmas_and_table_run() {
    let o = run(&["lemmas", "--P", "1", "--Q", "-1", "--pmin", "7", "--pmax", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let t = run(&["table", "--P", "1", "--Q", "-1", "--prime", "11", "--format", "csv"]);
    assert_eq!(t.status.code(), Some(0));
    assert!(stdout(&t).starts_with("label,p,rho,precision,value"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--P", "1", "--Q", "0"][..],
        &["verify", "--P", "1", "--Q", "-1", "--theorem", "Bogus"],
        &["verify", "--P", "1", "--Q", "-1", "--pmin", "50", "--pmax", "10"],
        &["search", "--Q", "-1"],
        &["table", "--P", "1", "--Q", "-1", "--prime", "9"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
