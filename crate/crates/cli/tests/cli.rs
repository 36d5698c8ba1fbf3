use std::io::Write;
use std::process::{Command, Output};

fn fourfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourfold"))
        .args(args)
        .env_remove("FOURFOLD_CATALOG")
        .output()
        .expect("binary runs")
}

fn with_catalog(catalog: &str, args: &[&str]) -> Output {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(catalog.as_bytes()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_fourfold"))
        .args(args)
        .env("FOURFOLD_CATALOG", file.path())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn invariants_json() {
    let o = fourfold(&["invariants", "X(2) # Y(0) # Y(5)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["chi"], 100);
    assert_eq!(v["tau"], -64);
    assert_eq!(v["form"], "-8E8 + 17H");
    assert_eq!(v["symplectic_pieces"].as_array().unwrap().len(), 3);
}

#[test]
fn homeo_and_ht() {
    let o = fourfold(&["homeo", "4*K3 # 7*S2xS2", "X(4)", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["homeomorphic"], true);

    let o = fourfold(&["hitchin-thorpe", "CP2 # 9*CP2bar"]);
    assert!(stdout(&o).contains("boundary"));
    let o = fourfold(&["hitchin-thorpe", "K3 # K3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["hitchin_thorpe"], "violated");
    assert_eq!(v["margin"], 92 - 96);
}

#[test]
fn check_einstein_three_lines() {
    let o = fourfold(&["check-einstein", "Z(4) # Y(2) # 3*CP2bar"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].contains("strictly-satisfied"));
    assert!(lines[1].contains("Obstructed"));
    assert!(lines[1].contains("21 >= 21"));

    let o = fourfold(&["check-einstein", "K3"]);
    assert!(stdout(&o).lines().nth(2).unwrap().contains("Yau"));

    // four symplectic pieces: refused
    let o = fourfold(&["check-einstein", "Y(0) # Y(0) # Y(0) # Y(1)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bandwidth_family() {
    let o = fourfold(&[
        "bandwidth",
        "X(2) # Y(0) # Y(l)",
        "--ell-list",
        "1,2,3",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "unbounded-certified");
    let bounds: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["bandwidth_lower_bound"].as_u64().unwrap())
        .collect();
    assert_eq!(bounds, [2, 4, 6]);

    let o = fourfold(&["bandwidth", "X(2) # Y(0) # Y(l)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fourfold(&["bandwidth", "Z(5) # Y(1)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_csv_is_deterministic() {
    let args = [
        "scan",
        "--m",
        "6..10",
        "--n",
        "30..45",
        "--certify",
        "--format",
        "csv",
    ];
    let a = fourfold(&args);
    let b = fourfold(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert_eq!(out.lines().count(), 1 + 5 * 16);
    assert!(out.contains("6,33,false,true,false,true,molti,Z(2) # Y(1)"));
    assert!(out.contains("6,31,false,true,false,true,,"));
}

#[test]
fn classify_form_and_errors() {
    let o = fourfold(&["classify-form", "-2E8 + 3H", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rank"], 22);
    assert_eq!(v["signature"], -16);
    assert_eq!(v["parity"], "even");

    assert_eq!(fourfold(&["classify-form", "E8"]).status.code(), Some(2));
    assert_eq!(
        fourfold(&["invariants", "X(2) # Q(1)"]).status.code(),
        Some(2)
    );
    assert_eq!(fourfold(&["invariants", "X(1)"]).status.code(), Some(2));
    assert_eq!(fourfold(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reproduce_filters() {
    let o = fourfold(&["reproduce", "--filter", "spin"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(
        out.lines().filter(|l| l.starts_with("PASS [spin]")).count(),
        45
    );
    assert_eq!(
        fourfold(&["reproduce", "--filter", "nope"]).status.code(),
        Some(2)
    );
}

const PERTURBED_X3: &str = r#"
[[entry]]
name = "X"
params = [3]
b_plus = 19
b_minus = 67
spin = true
c1_squared = 32
provenance = "perturbed"
"#;

#[test]
fn perturbed_catalog_flips_exit_code() {
    assert_eq!(
        fourfold(&["reproduce", "--filter", "xk"]).status.code(),
        Some(0)
    );
    let o = with_catalog(PERTURBED_X3, &["reproduce", "--filter", "xk"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let failing: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|l| l.contains("X_3")), "{failing:?}");
}

#[test]
fn inconsistent_catalog_is_rejected() {
    let bad = PERTURBED_X3.replace("c1_squared = 32", "c1_squared = 31");
    let o = with_catalog(&bad, &["reproduce", "--filter", "xk"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("X_3"));
}
