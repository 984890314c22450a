use std::process::Command;

use seven_inv::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("seven-inv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn invariants_json_for_m1() {
    let (code, out, _) = call(&["invariants", "--a=-3,-3,1", "--b=1,5,5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n"], -1);
    assert_eq!(v["s"]["num"], "-27");
    assert_eq!(v["s"]["den"], "14");
    assert_eq!(v["lk"], "trivial");
    assert_eq!(v["sign_W"], 1);
}

#[test]
fn invariants_csv_and_table() {
    let (code, out, _) = call(&["invariants", "--a=-3,-3,1", "--b=1,5,5", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "a1,a2,a3,b1,b2,b3,n,m,s,mu,lk,p1_lo,p1_hi,defect_minus,defect_plus");
    assert_eq!(lines[1], "-3,-3,1,1,5,5,-1,7,-27/14,1/14,trivial,0,0,-1/28,0");

    let (code, out, _) = call(&["invariants", "--a=-3,-3,1", "--b=1,5,5", "--format", "table"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("s ") && l.ends_with("-27/14")));
}

#[test]
fn oracle_calibration_pair() {
    let (code, out, _) = call(&["verify-oracle", "--a=-3,-3,1", "--b=1,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "EQUAL -1/28 = -1/28");
}

#[test]
fn oracle_random_batch() {
    let (code, out, _) = call(&["verify-oracle", "--random", "4", "--max-q", "9", "--seed", "11"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.trim_end().ends_with("4/4 equal"));
}

#[test]
fn family_census() {
    let (code, out, _) = call(&["family", "--a=-3,-3,1", "--b=1,1,1", "--count=3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    assert!(entries.iter().all(|e| e["verdict"]["kind"] == "Diffeomorphic"));
    assert_eq!(v["s_values"].as_array().unwrap().len(), 3);
}

#[test]
fn search_is_deterministic_and_resumable() {
    let (code, first, _) = call(&["search", "--max", "5", "--homotopy-sphere"]);
    assert_eq!(code, 0);
    let (_, again, _) = call(&["search", "--max", "5", "--homotopy-sphere"]);
    assert_eq!(first, again);
    let rows: Vec<&str> = first.lines().skip(1).collect();
    assert!(rows.len() > 3);
    assert!(rows.iter().all(|r| r.split(',').nth(6).map(|n| n == "1" || n == "-1").unwrap()));

    let cursor: Vec<&str> = rows[1].split(',').take(6).collect();
    let flag = format!("--start-after={}", cursor.join(","));
    let (code, rest, _) = call(&["search", "--max", "5", "--homotopy-sphere", &flag]);
    assert_eq!(code, 0);
    assert_eq!(rest.lines().skip(1).collect::<Vec<_>>(), rows[2..]);
}

#[test]
fn search_mk_non_milnor() {
    let (code, out, _) = call(&["search", "--mk=-3,-1,1,2,4,8,11,15", "--non-milnor", "--format", "json"]);
    assert_eq!(code, 0);
    let mut got: Vec<i64> = out
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            let num: i64 = v["mu"]["num"].as_str().unwrap().parse().unwrap();
            let den: i64 = v["mu"]["den"].as_str().unwrap().parse().unwrap();
            28 * num / den
        })
        .collect();
    got.sort();
    assert_eq!(got, vec![2, 5, 9, 12, 16, 19, 23, 26]);
}

#[test]
fn search_target_mu() {
    let (code, out, _) = call(&["search", "--mk=0,1,2,3", "--target-mu=1/14"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows, vec!["-3,-3,1,1,5,5,-1,7,-27/14,1/14,trivial,0,0,-1/28,0"]);
}

#[test]
fn empty_search_prints_nothing() {
    let (code, out, _) = call(&["search", "--max", "0"]);
    assert_eq!((code, out.as_str()), (0, ""));
}

#[test]
fn invalid_input_exits_2() {
    let (code, _, err) = call(&["invariants", "--a=-3,-3,2", "--b=1,5,5"]);
    assert_eq!(code, 2);
    assert!(err.contains("a3 = 2"));
    let (code, _, err) = call(&["invariants", "--a=1,1,1", "--b=1,1,1"]);
    assert_eq!(code, 2);
    assert!(err.contains("n = 0"));
    let (code, _, err) = call(&["invariants", "--a=1,1", "--b=1,1,1"]);
    assert_eq!(code, 2);
    assert!(err.contains("three comma-separated integers"));
    let (code, _, _) = call(&["family", "--a=-3,-3,1", "--b=1,1,1", "--count=0"]);
    assert_eq!(code, 2);
    let (code, _, _) = call(&["nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn help_exits_0() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify-oracle"));
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("seven_inv_cli_{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["invariants", "--a=-3,-3,1", "--b=1,5,5", "--format=csv", "--output", p]);
    assert_eq!((code, out.as_str()), (0, ""));
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(written.contains("-27/14"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_seven-inv");
    let ok = Command::new(bin).args(["verify-oracle", "--a=-3,-3,1", "--b=1,1,1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "EQUAL -1/28 = -1/28");
    let bad = Command::new(bin)
        .env("SEVEN_INV_THREADS", "1")
        .args(["invariants", "--a=5,1,1", "--b=1,1,1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
