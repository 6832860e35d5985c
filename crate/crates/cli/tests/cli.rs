use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-weight"))
        .args(args)
        .env_remove("HW_TOL_OVERRIDE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<serde_json::Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is a JSON document"))
        .collect()
}

#[test]
fn weight_table_csv() {
    let o = run(&["weight", "--p", "2", "--n", "1..5", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,omega_opt,omega_classical,ratio");
    assert_eq!(lines.len(), 6);
    let first: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first[0], 1.0);
    assert!((first[1] - (2.0 - 2f64.sqrt())).abs() < 1e-11);
    assert_eq!(first[2], 0.25);
    assert!(!text.contains('\r'));
}

#[test]
fn weight_rejects_bad_input() {
    assert_eq!(
        run(&["weight", "--p", "0.9", "--n", "1..3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["weight", "--p", "2", "--n", "5..1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["weight", "--p", "2", "--n", "a..b"]).status.code(),
        Some(2)
    );
}

#[test]
fn multiple_p_adds_a_column() {
    let o = run(&["weight", "--p", "2,3", "--n", "1..2"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,n,omega_opt,omega_classical,ratio");
    assert_eq!(lines.len(), 5);
    assert!(lines[3].starts_with("3,1,"));
}

#[test]
fn density_json() {
    let o = run(&["density", "--p", "2", "--nodes", "5", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = doc.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["x"], 0.0);
    assert_eq!(rows[0]["rho"], 0.0);
    assert_eq!(rows[4]["rho"], 0.0);
    let mid = rows[2]["rho"].as_f64().unwrap();
    assert!((mid - 0.5 / std::f64::consts::PI).abs() < 1e-16);
    assert_eq!(rows[2].as_object().unwrap().len(), 2);
}

#[test]
fn density_csv_endpoints_exact() {
    let o = run(&["density", "--p", "3.5", "--nodes", "3"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["x,rho", "0,0", lines[2], "1,0"]);
}

#[test]
fn moments_table_matches_closed_forms() {
    let o = run(&["moments", "--p", "2", "--k", "2", "--backends", "all"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,quadrature,combinatorial,integer,closed_form,max_deviation"
    );
    let expected = [0.25, 5.0 / 64.0, 21.0 / 512.0];
    for (k, line) in lines.enumerate() {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        for v in &cells[1..5] {
            assert!((v - expected[k]).abs() < 1e-10);
        }
        assert!(cells[5] <= 1e-10);
    }
}

#[test]
fn moments_integer_backend_needs_integer_p() {
    let o = run(&["moments", "--p", "2.5", "--backends", "integer"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["moments", "--p", "2.5", "--k", "3"]);
    assert!(o.status.success());
    // default backends leave the integer column empty for non-integer p
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(3), Some(""));
    assert_eq!(
        run(&["moments", "--p", "2", "--backends", "magic"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_representation_passes() {
    let o = run(&["verify", "--p", "2", "--suite", "representation"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    assert!(!recs.is_empty());
    for r in &recs {
        assert_eq!(r["pass"], true);
        for key in ["claim", "parameters", "metric", "threshold"] {
            assert!(r.get(key).is_some(), "{key} missing");
        }
    }
}

#[test]
fn verify_all_emits_one_record_per_claim_and_p() {
    let o = run(&[
        "verify",
        "--p",
        "2,3,5",
        "--suite",
        "herglotz,symmetry,positivity,asymptotics",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    let mut seen = std::collections::HashSet::new();
    for r in &recs {
        let key = (
            r["claim"].as_str().unwrap().to_string(),
            r["parameters"]["p"].to_string(),
        );
        assert!(seen.insert(key), "duplicate record");
    }
    let claims: std::collections::HashSet<_> =
        recs.iter().map(|r| r["claim"].as_str().unwrap()).collect();
    assert_eq!(recs.len(), 3 * claims.len());
}

#[test]
fn verify_force_fail_exits_one() {
    let o = run(&["verify", "--p", "2", "--suite", "herglotz", "--force-fail"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(records(&o)[0]["pass"], false);
}

#[test]
fn verify_unknown_suite_is_usage_error() {
    assert_eq!(
        run(&["verify", "--p", "2", "--suite", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--p", "1", "--suite", "herglotz"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_is_byte_stable() {
    let args = ["verify", "--p", "2.5", "--suite", "symmetry", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other = run(&[
        "verify", "--p", "2.5", "--suite", "symmetry", "--seed", "10",
    ]);
    assert_eq!(records(&other).len(), records(&run(&args)).len());
}

#[test]
fn tolerance_override_scales_thresholds() {
    let o = Command::new(env!("CARGO_BIN_EXE_hardy-weight"))
        .args(["verify", "--p", "2", "--suite", "symmetry"])
        .env("HW_TOL_OVERRIDE", "100")
        .output()
        .unwrap();
    assert!(o.status.success());
    let t = records(&o)[0]["threshold"].as_f64().unwrap();
    assert!((t - 1e-10).abs() < 1e-24);
    let bad = Command::new(env!("CARGO_BIN_EXE_hardy-weight"))
        .args(["verify", "--p", "2", "--suite", "symmetry"])
        .env("HW_TOL_OVERRIDE", "-1")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn diagnostics_do_not_affect_exit_code() {
    let o = run(&[
        "verify",
        "--p",
        "2.5",
        "--suite",
        "positivity",
        "--diagnostics",
    ]);
    assert!(o.status.success());
    let recs = records(&o);
    let diag: Vec<_> = recs
        .iter()
        .filter(|r| r.get("diagnostic").is_some())
        .collect();
    assert!(!diag.is_empty());
    assert!(diag.iter().all(|r| r.get("pass").is_none()));
}

#[test]
fn csv_precision_flag() {
    let o = run(&["weight", "--p", "2", "--n", "1", "--precision", "4"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("1,0.5858,0.25,2.343"));
}
