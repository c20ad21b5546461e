use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn apportion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apportion"))
        .args(args)
        .env_remove("APPORTION_SEED")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn without_clock(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_clock_seconds");
    v
}

#[test]
fn allocate_integral_quotas() {
    let out = apportion(&["allocate", "--method", "dhondt", "--seats", "3", "--votes", "A=2,B=1"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "allocate");
    let parties = r["result"]["parties"].as_array().unwrap();
    assert_eq!(parties[0]["seats"], 2);
    assert_eq!(parties[1]["seats"], 1);
    assert_eq!(parties[0]["delta"]["exact"], "0");
    assert_eq!(parties[1]["share"]["exact"], "1/3");
}

#[test]
fn droop_tie_enumerated() {
    let out = apportion(&["allocate", "--method", "droop", "--seats", "4", "--votes", "2,2,1", "--ties", "enumerate"]);
    let r = report(&out);
    assert_eq!(r["result"]["tie"]["alternatives"].as_array().unwrap().len(), 3);
    assert_eq!(r["result"]["parties"][2]["expected_seats"]["exact"], "2/3");
}

#[test]
fn csv_and_json_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("votes.csv");
    std::fs::write(&csv, "party,votes\nB,2\nA,1\n").unwrap();
    let r = report(&apportion(&["allocate", "--method", "webster", "--seats", "3", "--input", csv.to_str().unwrap()]));
    assert_eq!(r["result"]["parties"][0]["name"], "B");
    assert_eq!(r["result"]["parties"][0]["seats"], 2);

    let json = dir.path().join("votes.json");
    std::fs::write(&json, r#"{"C": 1, "A": 2, "B": 2}"#).unwrap();
    let r = report(&apportion(&["allocate", "--method", "hamilton", "--seats", "5", "--input", json.to_str().unwrap()]));
    let names: Vec<&str> = r["result"]["parties"].as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["A", "B", "C"]);
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_apportion"))
        .args(["allocate", "--method", "adams", "--seats", "4", "--input", "-", "--format", "csv"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"party,votes\nX,9\nY,1\n").unwrap();
    let out = child.wait_with_output().unwrap();
    let r = report(&out);
    assert_eq!(r["result"]["parties"][1]["seats"], 1);
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(code(&apportion(&["allocate", "--method", "webster", "--seats", "2", "--votes", "A=0,B=1"])), 2);
    assert_eq!(code(&apportion(&["allocate", "--method", "nonsense", "--seats", "2", "--votes", "1,1"])), 2);
    assert_eq!(code(&apportion(&["allocate", "--method", "webster", "--votes", "1,1"])), 2);
    assert_eq!(code(&apportion(&["sweep", "--method", "webster", "--votes", "1,1", "--seats-from", "9", "--seats-to", "3"])), 2);
    let out = apportion(&["allocate", "--method", "webster", "--seats", "2", "--votes", "A=-3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid_input"));
}

#[test]
fn verify_webster_passes() {
    let out = apportion(&["verify", "--method", "webster", "--shares", "sqrt", "--seats-max", "200000"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["result"]["comparison"]["pass"], true);
    assert_eq!(r["status"], "ok");
}

#[test]
fn verify_failure_exits_3_and_still_reports() {
    let out = apportion(&["verify", "--method", "jefferson", "--shares", "sqrt", "--seats-to", "2000", "--tolerance", "1e-6"]);
    assert_eq!(code(&out), 3);
    assert_eq!(report(&out)["status"], "verification_failed");
}

#[test]
fn oracle_exit_codes() {
    let out = apportion(&["oracle-check", "--method", "webster", "--functional", "sainte-lague", "--votes", "5,3,2", "--seats", "7"]);
    assert_eq!(code(&out), 0);
    let out = apportion(&["oracle-check", "--method", "jefferson", "--functional", "jefferson", "--votes", "7,5,20", "--seats", "11"]);
    assert_eq!(code(&out), 3);
    assert_eq!(report(&out)["result"]["witness"], serde_json::json!([1, 2, 8]));
    let out = apportion(&["oracle-check", "--method", "webster", "--functional", "sl", "--votes", "7,5,20,3,3,3,3,3", "--seats", "60"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn dhondt_random_simplex_violations() {
    let out = apportion(&["violations", "--method", "dhondt", "--random-simplex", "3", "--trials", "100000", "--house", "100000"]);
    let r = report(&out);
    let f: f64 = r["result"]["overall"].as_str().unwrap().parse().unwrap();
    assert!((f - (3.0 * 2f64.ln() - 2.0)).abs() < 0.01, "{f}");
}

#[test]
fn seeded_reports_are_reproducible() {
    let args = ["mc-simplex", "--parties", "3", "--method", "webster", "--seats", "1000", "--trials", "2000", "--seed", "7"];
    let a = without_clock(report(&apportion(&args)));
    let b = without_clock(report(&apportion(&args)));
    assert_eq!(a.to_string(), b.to_string());
    let c = without_clock(report(&apportion(&["mc-simplex", "--parties", "3", "--method", "webster", "--seats", "1000", "--trials", "2000"])));
    assert_ne!(a["result"], c["result"]);
}

#[test]
fn seed_from_environment() {
    let base = ["mc-simplex", "--parties", "3", "--trials", "500"];
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_apportion"));
        cmd.args(base).args(extra).env_remove("APPORTION_SEED");
        if let Some(s) = env {
            cmd.env("APPORTION_SEED", s);
        }
        report(&cmd.output().unwrap())
    };
    let env7 = run(Some("7"), &[]);
    assert_eq!(env7["config"]["seed"], 7);
    assert_eq!(env7["result"], run(None, &["--seed", "7"])["result"]);
    assert_eq!(run(Some("7"), &["--seed", "3"])["config"]["seed"], 3);
    assert_eq!(run(None, &[])["config"]["seed"], 0);
}

#[test]
fn period_average_is_exact() {
    let r = report(&apportion(&["period", "--method", "droop", "--votes", "2,2,1"]));
    assert_eq!(r["result"]["period"], 5);
    assert_eq!(r["result"]["average_excess"][2]["exact"], "-1/15");
    let out = apportion(&["period", "--method", "droop", "--shares", "sqrt"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn divergence_of_given_vector() {
    let r = report(&apportion(&["divergence", "--method", "webster", "--votes", "2,1", "--seats", "3", "--seat-vector", "3,0"]));
    let values = &r["result"]["values"];
    assert_eq!(values["sum_squares"]["exact"], "2");
    assert_eq!(values["per_seat"], "inf");
    assert_eq!(code(&apportion(&["divergence", "--method", "webster", "--votes", "2,1", "--seats", "3", "--seat-vector", "1,1"])), 2);
}

#[test]
fn apparentement_reports_gain() {
    let out = apportion(&["apparentement", "--method", "jefferson", "--shares", "sqrt", "--pair", "2,4", "--seats-to", "20000"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let mean: f64 = r["result"]["joint_gain"]["mean"].as_str().unwrap().parse().unwrap();
    let limit: f64 = r["result"]["joint_gain"]["limit"].as_str().unwrap().parse().unwrap();
    assert!((mean - limit).abs() < 0.02, "{mean} vs {limit}");
}

#[test]
fn output_file_and_human_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = apportion(&["allocate", "--method", "webster", "--seats", "10", "--votes", "5,3,2", "--output", path.to_str().unwrap(), "--human"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("party") && text.contains("seats"));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved["result"]["parties"][0]["seats"], 5);
}
