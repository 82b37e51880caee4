//! End-to-end checks of the command-line surface and its file outputs.

use std::path::Path;
use std::process::Command;

fn write_fixture(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let schema_path = dir.join("schema.json");
    std::fs::write(
        &schema_path,
        r#"{
  "predictors": [
    { "name": "group", "kind": "nominal", "categories": ["a", "b", "c", "d"] },
    { "name": "x", "kind": "continuous" }
  ],
  "response": { "name": "y", "type": "binary", "positive_label": "1" }
}"#,
    )
    .unwrap();
    let mut csv = String::from("group,x,y\n");
    let mut state = 11u64;
    for i in 0..160 {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let u = (state >> 11) as f64 / (1u64 << 53) as f64;
        let group = ["a", "b", "c", "d"][i % 4];
        let x = (u * 2.0 - 1.0).to_string();
        let p = if i % 4 < 2 { 0.85 } else { 0.2 };
        let y = u8::from(u < p);
        csv.push_str(&format!("{group},{x},{y}\n"));
    }
    let data_path = dir.join("data.csv");
    std::fs::write(&data_path, csv).unwrap();
    (schema_path, data_path)
}

fn catglm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catglm"))
}

#[test]
fn cluster_writes_all_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (schema, data) = write_fixture(dir.path());
    let run = |out: &Path| {
        let output = catglm()
            .args([
                "cluster",
                "--data",
                data.to_str().unwrap(),
                "--schema",
                schema.to_str().unwrap(),
                "--m",
                "5",
                "--seed",
                "42",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(
            output.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    };
    let out1 = dir.path().join("run1");
    let out2 = dir.path().join("run2");
    run(&out1);
    run(&out2);

    for file in [
        "best_model.json",
        "clusterings.json",
        "grasp.json",
        "proximity_group.csv",
        "proximity_group.dot",
    ] {
        let a = std::fs::read(out1.join(file)).unwrap_or_else(|_| panic!("{file} missing"));
        let b = std::fs::read(out2.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }

    let clusterings: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("clusterings.json")).unwrap())
            .unwrap();
    let entry = &clusterings.as_array().unwrap()[0];
    assert_eq!(entry["predictor"], "group");
    assert_eq!(entry["k_prime"], 2);
    assert_eq!(entry["order"].as_array().unwrap().len(), 4);
    assert_eq!(entry["assignment"].as_array().unwrap().len(), 4);

    let grasp: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("grasp.json")).unwrap()).unwrap();
    assert_eq!(grasp["m"], 5);
    assert_eq!(grasp["iterations"].as_array().unwrap().len(), 5);
    assert!(grasp["best"]["model"]["coefficients"].is_array());

    let dot = std::fs::read_to_string(out1.join("proximity_group.dot")).unwrap();
    assert!(dot.starts_with("graph \"group\""));
}

#[test]
fn fit_prints_coefficients_and_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let (schema, data) = write_fixture(dir.path());
    let out = dir.path().join("fit");
    let output = catglm()
        .args([
            "fit",
            "--data",
            data.to_str().unwrap(),
            "--schema",
            schema.to_str().unwrap(),
            "--reshuffles",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("mean test CCR"), "stdout: {stdout}");
    assert!(stdout.contains("group[1]"), "stdout: {stdout}");
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["family"], "bernoulli_logit");
    assert_eq!(model["coefficients"].as_array().unwrap().len(), 5);
}

#[test]
fn missing_input_exits_nonzero_with_diagnostic() {
    let output = catglm()
        .args([
            "fit",
            "--data",
            "/nonexistent.csv",
            "--schema",
            "/nonexistent.json",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("error"), "stderr: {stderr}");
}

#[test]
fn unknown_category_is_reported_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let (schema, _) = write_fixture(dir.path());
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "group,x,y\na,0.5,1\nzz,0.2,0\n").unwrap();
    let output = catglm()
        .args([
            "fit",
            "--data",
            bad.to_str().unwrap(),
            "--schema",
            schema.to_str().unwrap(),
            "--reshuffles",
            "2",
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("zz"), "stderr: {stderr}");
    assert!(stderr.contains("row 2"), "stderr: {stderr}");
}
