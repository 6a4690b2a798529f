//! End-to-end CLI behavior: exit codes, validation messages, generation
//! round trips, and deformation file emission.

use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catcoh"))
}

#[test]
fn validate_good_file_exits_zero() {
    let out = bin()
        .arg("validate")
        .arg(data("vec_z2_omega.json"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["payload"]["valid"], true);
    assert_eq!(v["payload"]["pentagon_instances_checked"], 16);
}

#[test]
fn validate_corrupted_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "parse errors carry line info: {err}");
}

#[test]
fn validate_pentagon_violation_exits_one_and_names_instance() {
    // patch the nontrivial F entry of the sign-twisted category to 2
    let text = std::fs::read_to_string(data("vec_z2_omega.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["F"][0]["matrix"][0][0] = serde_json::Value::String("2".into());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pentagon"), "names the failing check: {err}");
    assert!(
        err.contains("i=") && err.contains("l="),
        "names the instance: {err}"
    );
}

#[test]
fn gen_pointed_with_omega_matches_bundled() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    let out = bin()
        .args(["gen", "pointed"])
        .arg(data("group_z2.json"))
        .arg(&path)
        .args(["--field", "rational", "--omega"])
        .arg(data("omega_z2_sign.json"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let generated = std::fs::read_to_string(&path).unwrap();
    let bundled = std::fs::read_to_string(data("vec_z2_omega.json")).unwrap();
    assert_eq!(generated, bundled, "generation is reproducible");
}

#[test]
fn gen_rejects_non_cocycle() {
    // a table that is not a 3-cocycle
    let dir = tempfile::tempdir().unwrap();
    let omega = dir.path().join("bad_omega.json");
    let mut vals = vec!["1".to_string(); 8];
    vals[0] = "-1".into(); // w(0,0,0) = -1 breaks the cocycle identity
    std::fs::write(
        &omega,
        serde_json::json!({"order": 2, "values": vals}).to_string(),
    )
    .unwrap();
    let out_path = dir.path().join("nope.json");
    let out = bin()
        .args(["gen", "pointed"])
        .arg(data("group_z2.json"))
        .arg(&out_path)
        .args(["--field", "rational", "--omega"])
        .arg(&omega)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cocycle"), "{err}");
}

#[test]
fn cohomology_reports_expected_dims() {
    let out = bin()
        .arg("cohomology")
        .arg(data("vec_z2_trivial_f2.json"))
        .args(["--max-degree", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let h: Vec<u64> = v["payload"]["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["h_dim"].as_u64().unwrap())
        .collect();
    assert_eq!(h, vec![1, 1, 1]);
    assert_eq!(v["payload"]["d_squared_zero"], true);
}

#[test]
fn cohomology_emits_reloadable_representatives() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("cohomology")
        .arg(data("vec_klein_f2.json"))
        .args(["--max-degree", "3", "--emit-representatives"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let written = v["payload"]["representatives_written"].as_array().unwrap();
    assert!(written
        .iter()
        .any(|p| p.as_str().unwrap().contains("h3_rep3")));
    // a written representative feeds back into deform
    let rep = written
        .iter()
        .find(|p| p.as_str().unwrap().contains("h3_rep0"))
        .unwrap()
        .as_str()
        .unwrap();
    let out2 = bin()
        .arg("deform")
        .arg(data("vec_klein_f2.json"))
        .args(["--cocycle", rep, "--order", "1"])
        .output()
        .unwrap();
    assert!(
        out2.status.success(),
        "{}",
        String::from_utf8_lossy(&out2.stderr)
    );
    let v2: serde_json::Value = serde_json::from_slice(&out2.stdout).unwrap();
    assert_eq!(v2["payload"]["residuals"][0]["zero"], true);
}

#[test]
fn deform_emits_jet_file_with_reported_obstruction() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("deformed.json");
    let out = bin()
        .arg("deform")
        .arg(data("vec_z2_trivial_f2.json"))
        .args(["--class", "0", "--order", "2", "--emit"])
        .arg(&emitted)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let obstructions = v["payload"]["obstructions"].as_array().unwrap();
    assert_eq!(obstructions.len(), 1);
    assert_eq!(obstructions[0]["order"], 2);
    // closed / exact are reported booleans
    assert!(obstructions[0]["closed"].is_boolean());
    assert!(obstructions[0]["exact"].is_boolean());
    // the emitted jet file reloads
    let text = std::fs::read_to_string(&emitted).unwrap();
    assert!(text.contains("deform_order"));
    assert!(text.contains("*e"));
}

#[test]
fn deform_rejects_non_closed_cocycle() {
    // a cochain file that is not closed
    let dir = tempfile::tempdir().unwrap();
    let cpath = dir.path().join("notclosed.json");
    std::fs::write(
        &cpath,
        serde_json::json!({
            "degree": 3,
            "components": [{"tuple": [0, 1, 1], "matrix": [["1"]]}]
        })
        .to_string(),
    )
    .unwrap();
    let out = bin()
        .arg("deform")
        .arg(data("vec_z2_trivial_f2.json"))
        .args(["--cocycle"])
        .arg(&cpath)
        .args(["--order", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not closed"));
}

#[test]
fn bicomplex_grouplike_report() {
    let out = bin()
        .arg("bicomplex")
        .arg(data("grouplike_z2_f2.json"))
        .args(["--max", "2", "2", "--solve", "d1", "--total"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["payload"]["identities_hold"], true);
    assert_eq!(v["payload"]["boundary_equation"]["solution_dim"], 3);
    let pbs = v["payload"]["boundary_equation"]["pushbacks"]
        .as_array()
        .unwrap();
    assert!(pbs.iter().all(|p| p["verified"] == true));
}

#[test]
fn bicomplex_requires_bitensor_file() {
    let out = bin()
        .arg("bicomplex")
        .arg(data("vec_z2_trivial.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_dims() {
    for (field, expect) in [("prime:2", vec![1, 1, 1]), ("rational", vec![0, 0, 0])] {
        let out = bin()
            .arg("oracle")
            .arg(data("group_z2.json"))
            .args(["--field", field, "--max-degree", "3"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let dims: Vec<u64> = v["payload"]["h_dims"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .collect();
        assert_eq!(dims, expect.iter().map(|&x| x as u64).collect::<Vec<_>>());
    }
}

#[test]
fn pretty_mode_renders_tables() {
    let out = bin()
        .arg("oracle")
        .arg(data("group_klein.json"))
        .args(["--field", "prime:2", "--pretty"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("command: oracle"));
    assert!(text.contains("h_dims"));
}

#[test]
fn out_flag_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let rpath = dir.path().join("report.json");
    let out = bin()
        .arg("validate")
        .arg(data("vec_z3.json"))
        .args(["--out"])
        .arg(&rpath)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&rpath).unwrap()).unwrap();
    assert_eq!(v["payload"]["valid"], true);
}
