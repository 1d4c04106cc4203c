use std::process::{Command, Output};

use serde_json::Value;

fn afm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afm")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn massless_linear_three_body_mass() {
    let out = afm(&["solve", "--kinematics", "ur", "--N", "3", "--one-body", "linear:a=1", "--Q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["mass"].as_f64().unwrap(), 6.0);
}

#[test]
fn echoed_inputs_reproduce_values() {
    let first = afm(&["solve", "--kinematics", "sr", "--N", "4", "--m", "0.37", "--two-body", "funnel:a=0.3,b=1.7", "--Q", "5.1"]);
    let v = json(&first);
    let (n, m, q, pot) = (v["N"].to_string(), v["m"].to_string(), v["Q"].to_string(), v["two_body"].as_str().unwrap().to_string());
    let second = afm(&["solve", "--kinematics", "sr", "--N", &n, "--m", &m, "--two-body", &pot, "--Q", &q]);
    let w = json(&second);
    assert_eq!(v["mass"].as_f64().unwrap().to_bits(), w["mass"].as_f64().unwrap().to_bits());
    assert_eq!(v, w);
}

#[test]
fn labels_give_the_principal_number() {
    let out = afm(&["solve", "--kinematics", "nr", "--m", "1", "--two-body", "quadratic:k=1", "--labels", "1,0"]);
    let v = json(&out);
    assert_eq!(v["Q"].as_f64().unwrap(), 3.5);
    assert!((v["energy"].as_f64().unwrap() - 7.0).abs() < 1e-12);
}

#[test]
fn sweep_is_seed_deterministic_and_passes() {
    let a = afm(&["duality", "sweep", "--seed", "7", "--count", "200", "--tol", "1e-9"]);
    assert_eq!(a.status.code(), Some(0));
    let v = json(&a);
    assert_eq!(v["summary"]["failed"], 0);
    assert_eq!(v["summary"]["total"], 200 * 28 * 3);

    let args = ["duality-sweep", "--seed", "11", "--count", "3", "--output", "csv"];
    let (b, c) = (afm(&args), afm(&args));
    assert_eq!(b.stdout, c.stdout);
    let d = afm(&["duality-sweep", "--seed", "12", "--count", "3", "--output", "csv"]);
    assert_ne!(b.stdout, d.stdout);
}

#[test]
fn verify_reports_failure_with_exit_4() {
    let ok = afm(&["duality", "verify", "--relation", "UR_1B_NP", "--N", "3", "--Q", "4", "--one-body", "linear:a=1", "--p", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["passed"], true);
    let strict = afm(&[
        "duality-verify", "--relation", "GEN_2B_SIGMA", "--N", "5", "--m", "1.3", "--Q", "7.7", "--two-body", "funnel:a=0.02,b=1.1",
        "--sigma", "0.7", "--tol", "1e-17",
    ]);
    assert_eq!(strict.status.code(), Some(4));
    assert_eq!(json(&strict)["passed"], false);
    assert!(String::from_utf8_lossy(&strict.stderr).contains("exceeds"));
}

#[test]
fn table2_matches_reference() {
    let out = afm(&["table", "table2", "--output", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("B,labels,exact,pred_Qho,dev_pct,pred_Qwkb,dev_pct"));
    assert_eq!(lines.count(), 13);
}

#[test]
fn table1_improved_column() {
    let out = afm(&["table", "table1", "--prescription", "improved2b", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,l,exact,pred,dev_pct");
    assert_eq!(rows.len(), 17);
    // (n=1, l=0): improved prediction 2.567.
    let cells: Vec<f64> = rows[2].split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cells[3] - 2.567).abs() < 0.002);
    // The reference deviation for (n=0, l=2) disagrees with its own entries.
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(n=0, l=2) dev_improved_pct"));

    let ho = afm(&["table", "table1", "--prescription", "ho", "--output", "csv"]);
    assert_eq!(ho.status.code(), Some(0));
}

#[test]
fn csv_uses_six_significant_digits() {
    let out = afm(&["universal-f", "--two-body", "linear:a=1", "--m", "1", "--m", "4", "--output", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "m,f\n1.00000,2.33811\n4.00000,1.47292\n");
}

#[test]
fn universal_functions_on_grid() {
    let out = afm(&["universal-F", "--potential", "quadratic:k=1", "--x", "2"]);
    let v = json(&out);
    assert!((v["points"][0]["F"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    let out = afm(&["universal-G", "--potential", "quadratic:k=1", "--x-min", "0.5", "--x-max", "8", "--points", "5"]);
    let v = json(&out);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 5);
    for p in pts {
        let (x, g) = (p["x"].as_f64().unwrap(), p["G"].as_f64().unwrap());
        assert!((g - (2.0 * x).sqrt()).abs() < 1e-10 * g);
    }
}

#[test]
fn exact_solvers() {
    let v = json(&afm(&["exact-2b", "--m", "1", "--two-body", "coulomb:a=1"]));
    assert!((v["energy"].as_f64().unwrap() + 0.25).abs() < 1e-6);

    let out = afm(&["exact-3b", "--m", "2", "--two-body", "quadratic:k=1", "--bmax", "8", "--levels", "1"]);
    let v = json(&out);
    assert!((v["levels"][0]["energy"].as_f64().unwrap() - 27f64.sqrt()).abs() < 1e-8);

    let out = afm(&["exact-3b", "--m", "2", "--two-body", "linear:a=1", "--L", "1", "--parity", "-1", "--symmetry", "mixed", "--levels", "1"]);
    let v = json(&out);
    assert_eq!(v["levels"][0]["labels"], "[0,1,0,0]");

    let v = json(&afm(&["salpeter-2b", "--sigma", "2", "--m", "1", "--two-body", "coulomb:a=0.2"]));
    assert!((v["mass"].as_f64().unwrap() - 1.99).abs() < 0.004);

    let v = json(&afm(&["predict", "--mode", "n_body_gs", "--m", "2", "--N", "3", "--labels", "1,0,0,0", "--q-prescription", "wkb3b", "--two-body", "linear:a=1"]));
    assert!((v["energy"].as_f64().unwrap() - 6.671).abs() < 0.005);
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("afm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let out = afm(&["--out", path.to_str().unwrap(), "solve", "--kinematics", "ur", "--N", "2", "--two-body", "linear:a=1", "--Q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["mass"].as_f64().is_some());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(afm(&["--help"]).status.code(), Some(0));
    assert_eq!(afm(&["solve", "--kinematics", "ur", "--Q", "1"]).status.code(), Some(2));
    assert_eq!(afm(&["solve", "--kinematics", "nr", "--m", "-1", "--two-body", "linear:a=1", "--Q", "1"]).status.code(), Some(2));
    assert_eq!(afm(&["exact-2b", "--m", "1", "--two-body", "linear:a=nan"]).status.code(), Some(2));
    assert_eq!(afm(&["bogus"]).status.code(), Some(2));
    let failed = afm(&["solve", "--kinematics", "ur", "--N", "2", "--one-body", "coulomb:a=1", "--Q", "1"]);
    assert_eq!(failed.status.code(), Some(3));
    assert!(!failed.stderr.is_empty());
}
