use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qhlat(args: &[&str]) -> Output {
    qhlat_with(args, None)
}

fn qhlat_with(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qhlat"));
    cmd.args(args).env_remove("SOURCE_DATE_EPOCH").env_remove("QHLAT_CONFIG");
    if let Some(path) = config {
        cmd.env("QHLAT_CONFIG", path);
    }
    cmd.output().expect("run qhlat")
}

fn json(args: &[&str]) -> Value {
    let out = qhlat(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn real_parts(v: &Value) -> Vec<f64> {
    v["payload"]["spectrum"]["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| z[0].as_f64().unwrap())
        .collect()
}

#[test]
fn two_site_spectrum() {
    let v = json(&["spectrum", "--params", "0.5"]);
    assert_eq!(v["command"], "spectrum");
    assert!(v["timestamp"].is_null());
    let re = real_parts(&v);
    let root = 0.75f64.sqrt();
    assert!((re[0] + root).abs() < 1e-5 && (re[1] - root).abs() < 1e-5, "{re:?}");
    assert_eq!(v["payload"]["spectrum"]["is_real"], true);
}

#[test]
fn free_chain_spectrum_is_real() {
    let v = json(&["spectrum", "--params", "0,0,0"]);
    assert_eq!(real_parts(&v).len(), 6);
    assert_eq!(v["payload"]["spectrum"]["is_real"], true);
}

#[test]
fn source_date_epoch_sets_timestamp() {
    let out = Command::new(env!("CARGO_BIN_EXE_qhlat"))
        .args(["spectrum", "--dim", "2"])
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("QHLAT_CONFIG")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["timestamp"], "unix:1700000000");
}

#[test]
fn exceptional_point_command() {
    let v = json(&["ep", "--preset", "single:1", "--dim", "2"]);
    let p = v["payload"]["p_crit"].as_f64().unwrap();
    assert!((p - 1.0).abs() <= 1e-6, "{p}");
}

#[test]
fn table_examples() {
    let out = qhlat(&["table1", "--dims", "10,50", "--format", "csv"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("row,n,dim,p_crit\n"));
    assert!(csv.contains("alpha,10,10,1.0000\n"));
    assert!(csv.contains("alpha,50,50,1.0000\n"));
    assert!(csv.contains("beta,10,10,0.7129\n"));
    assert!(csv.contains("gamma,50,50,0.5026\n"));

    let text = String::from_utf8(qhlat(&["table2", "--dims", "30", "--format", "text"]).stdout).unwrap();
    assert!(text.starts_with("convention: lattice-size\n"));
    assert!(text.contains("0.1013") && text.contains("0.0185"), "{text}");

    let v = json(&["table2", "--dims", "10", "--convention", "param-count"]);
    assert_eq!(v["convention"], "param-count");
    assert_eq!(v["payload"]["rows"][0]["cells"][0]["dim"], 20);
}

#[test]
fn pseudometrics_examples() {
    let v = json(&["pseudometrics", "--params", "0.3,0.2"]);
    let p2 = &v["payload"]["basis"]["elements"][1];
    let corner = p2[0][3][0].as_f64().unwrap();
    assert!((corner + 0.05).abs() < 1e-9, "{corner}");

    let v = json(&["pseudometrics", "--preset", "alternating", "--mag", "0.05", "--dim", "6", "--patterns"]);
    let first: Vec<&str> = v["payload"]["patterns"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap())
        .collect();
    assert_eq!(first, ["1I.I.I", "I1....", "..1I.I", "I.I1..", "....1I", "I.I.I1"]);

    let v = json(&["pseudometrics", "--params", "0,0,0", "--dim", "6", "--patterns"]);
    assert_eq!(v["payload"]["patterns"][0][0], "1.....");
    assert_eq!(v["payload"]["patterns"][5][0], ".....1");
}

#[test]
fn conjecture_and_metric() {
    let v = json(&["conjecture", "--dim", "6", "--mag", "0.05"]);
    assert_eq!(v["payload"]["entries_in_set"], true);
    assert_eq!(v["payload"]["even_parameter_free"], true);

    let v = json(&["metric", "--params", "1.2", "--samples", "500", "--seed", "1"]);
    assert_eq!(v["payload"]["frontier"]["positive_count"], 0);
}

#[test]
fn domain_formats() {
    let out = qhlat(&["domain", "--steps", "5", "--format", "ppm"]);
    assert!(out.status.success());
    let header = b"P6\n5 5\n255\n";
    assert_eq!(&out.stdout[..header.len()], header);
    assert_eq!(out.stdout.len(), header.len() + 5 * 5 * 3);
    // The origin cell sits in the middle of the image and is real.
    let centre = header.len() + (2 * 5 + 2) * 3;
    assert_eq!(&out.stdout[centre..centre + 3], &[32, 96, 192]);

    let csv = String::from_utf8(qhlat(&["domain", "--steps", "5", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("p_i,p_j,is_real,max_imag\n"));
    assert_eq!(csv.lines().count(), 26);

    let text = String::from_utf8(qhlat(&["domain", "--steps", "5", "--format", "text"]).stdout).unwrap();
    assert!(text.contains('#'));
}

#[test]
fn exit_codes() {
    assert_eq!(qhlat(&["spectrum", "--dim", "3"]).status.code(), Some(2));
    assert_eq!(qhlat(&["spectrum", "--dim", "4", "--format", "ppm"]).status.code(), Some(2));
    assert_eq!(qhlat(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qhlat(&["pseudometrics", "--params", "1.0"]).status.code(), Some(3));
    assert_eq!(
        qhlat(&["ep", "--preset", "single:1", "--dim", "2", "--p-max", "0.5"]).status.code(),
        Some(4)
    );
    assert_eq!(
        qhlat(&["--out", "/nonexistent/dir/out.json", "spectrum", "--dim", "2"]).status.code(),
        Some(1)
    );
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qhlat.conf");
    std::fs::write(&cfg, "# defaults\nparams = 0.5\nformat = text\n").unwrap();

    let out = qhlat_with(&["spectrum"], Some(&cfg));
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("0.866025"));

    // Flags override the file.
    let out = qhlat_with(&["spectrum", "--params", "0.6", "--format", "json"], Some(&cfg));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["params"][0], 0.6);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(qhlat_with(&["spectrum"], Some(&cfg)).status.code(), Some(2));
}

#[test]
fn out_and_record_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("spec.json");
    let rec_path = dir.path().join("run.json");
    let out = qhlat(&[
        "spectrum",
        "--params",
        "0.5",
        "--out",
        out_path.to_str().unwrap(),
        "--record",
        rec_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let main: Value = serde_json::from_slice(&std::fs::read(&out_path).unwrap()).unwrap();
    let rec: Value = serde_json::from_slice(&std::fs::read(&rec_path).unwrap()).unwrap();
    assert_eq!(main["payload"], rec["payload"]);
    assert!(rec["timestamp"].is_string());
}
