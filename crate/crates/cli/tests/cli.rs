use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const GOLDEN_CSV: &str = include_str!("../../core/tests/data/fib12_x10000.csv");
const GOLDEN_REPORT: &str = include_str!("../../core/tests/data/fib12_x10000_report.json");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minpoints"))
        .args(args)
        .output()
        .expect("spawn minpoints")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn word_subcommand() {
    let o = run(&["word", "fib(1,2)", "8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "1,2,1,1,2,1,2,1\n");
    assert_eq!(stdout(&run(&["word", "per(2)", "3"])), "2,2,2\n");
    assert_eq!(stdout(&run(&["word", "sturm([0;2,1,1,...],1,2)", "6"])), "1,2,1,1,2,1\n");
    let o = run(&["word", "fib(1,1)", "5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("distinct"));
    assert_eq!(code(&run(&["word", "nonsense", "5"])), 2);
}

#[test]
fn minimal_points_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seq.csv");
    let o = run(&["minimal-points", "--x-max", "10000", "--output", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&out).unwrap(), GOLDEN_CSV);
    let summary = stdout(&o);
    assert!(summary.contains("points=5"), "{summary}");
    assert!(summary.contains("final_X=576"), "{summary}");
    assert!(summary.contains("tail_lambda_min"), "{summary}");
}

#[test]
fn minimal_points_edge_cases() {
    let o = run(&["minimal-points", "--x-max", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = run(&["minimal-points", "--xi", "cf:[0;3]", "--eta", "cf:[0;6]", "--x-max", "1000"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("2,6,6,2,1,0/1,0/1\n"), "{}", stdout(&o));
    assert!(stderr(&o).contains("delta=0"), "{}", stderr(&o));

    let o = run(&["minimal-points", "--max-depth", "4", "--x-max", "100"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("x0 = 1"), "{}", stderr(&o));

    assert_eq!(code(&run(&["minimal-points", "--xi", "cf:[0;"])), 2);
    assert_eq!(code(&run(&["minimal-points", "--x-max", "0"])), 2);
}

#[test]
fn json_format_export() {
    let o = run(&["minimal-points", "--x-max", "30", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3]["X_i"], 25);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "4", "8"] {
        let out = dir.path().join(format!("seq{threads}.csv"));
        let o = run(&["minimal-points", "--x-max", "200000", "--threads", threads, "--output", path_str(&out)]);
        assert_eq!(code(&o), 0);
        files.push(fs::read(&out).unwrap());
    }
    assert!(files.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn verify_defaults_hold() {
    let o = run(&["verify"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = stdout(&o);
    assert_eq!(report, GOLDEN_REPORT);
    assert_eq!(report.matches("\"verdict\": \"holds-on-horizon\"").count(), 5);
}

#[test]
fn verify_replay_reproduces_live_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("seq.csv");
    fs::write(&csv, GOLDEN_CSV).unwrap();
    let o = run(&["verify", "--replay", path_str(&csv)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), GOLDEN_REPORT);

    let json = dir.path().join("seq.json");
    let o = run(&["minimal-points", "--format", "json", "--output", path_str(&json)]);
    assert_eq!(code(&o), 0);
    let o = run(&["verify", "--replay", path_str(&json)]);
    assert_eq!(stdout(&o), GOLDEN_REPORT);
}

#[test]
fn verify_flags_constructed_violation() {
    // the last three points are coplanar and the last pair spans an index-2 sublattice
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(
        &csv,
        "index,X_i,x0,x1,x2,delta_lo,delta_hi\n\
         1,1,1,0,0,1/2,1/2\n\
         2,2,2,1,0,1/3,1/3\n\
         3,4,4,3,0,1/5,1/5\n",
    )
    .unwrap();
    let o = run(&["verify", "--replay", path_str(&csv)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stdout(&o).contains("\"verdict\": \"violated\""));
}

#[test]
fn verify_rejects_bad_parameters() {
    let o = run(&["verify", "--lambda", "0.49"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lambda"));
    assert_eq!(code(&run(&["verify", "--theta", "2"])), 2);
    assert_eq!(code(&run(&["verify", "--conic", "hyperbola"])), 2);
}

#[test]
fn bounds_evertse() {
    let o = run(&["bounds", "evertse", "--n", "3", "--delta", "1/10", "--D", "6", "--log2"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    let value: f64 = line.trim().strip_prefix("log2_count = ").unwrap().parse().unwrap();
    let expect = 540.0 + 21.0 * 10f64.log2() + 24f64.ln().log2() + 24f64.ln().ln().log2();
    assert!((value - expect).abs() < 1e-9, "{line}");

    let o = run(&["bounds", "evertse", "--n", "3", "--delta", "1/10", "--D", "6", "--ln"]);
    let value: f64 = stdout(&o).trim().strip_prefix("ln_count = ").unwrap().parse().unwrap();
    assert!((value - expect * 2f64.ln()).abs() < 1e-9);

    assert_eq!(code(&run(&["bounds", "evertse", "--n", "1", "--delta", "1/2", "--D", "6"])), 2);
    assert_eq!(code(&run(&["bounds", "evertse", "--n", "3", "--delta", "2", "--D", "6"])), 2);
}

#[test]
fn bounds_measure() {
    let o = run(&["bounds", "measure", "--c", "1", "--d", "3", "--H", "2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let get = |key: &str| -> f64 {
        out.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("w") - 1.1088).abs() < 1e-4, "{out}");
    assert!((get("log_bound") + 0.7686).abs() < 1e-4, "{out}");
    let o = run(&["bounds", "measure", "--d", "2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "xi = \"word:fib(1,2)\"\nx_max = 3\nformat = \"csv\"\n").unwrap();
    let o = run(&["minimal-points", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = run(&["minimal-points", "--config", path_str(&cfg), "--x-max", "30"]);
    assert_eq!(stdout(&o).lines().count(), 5);

    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&run(&["minimal-points", "--config", path_str(&cfg)])), 2);
}
