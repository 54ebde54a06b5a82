use std::process::Command;

fn softedge(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_softedge"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn expand_emits_density_columns_for_each_order() {
    let (code, out, _) = softedge(&[
        "expand",
        "--beta",
        "1",
        "--gaussian",
        "-n",
        "10",
        "-k",
        "4",
        "--m",
        "2",
        "--grid",
        "-6:3:0.05",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("# expand.k = 4"));
    let lines = data_lines(&out);
    assert_eq!(
        lines[0],
        "s,cdf_m0,cdf_m1,cdf_m2,density_m0,density_m1,density_m2"
    );
    assert_eq!(lines.len(), 1 + 181);
}

#[test]
fn limit_is_bitwise_reproducible() {
    let args = ["limit", "--beta", "2", "--xi", "0.5", "--grid", "-8:4:0.1"];
    let (c1, a, _) = softedge(&args);
    let (c2, b, _) = softedge(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(data_lines(&a).len(), 1 + 121);
}

#[test]
fn json_mirrors_csv() {
    let (code, out, _) = softedge(&["--format", "json", "finite", "-n", "5", "--grid", "-1:1:1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["s", "x", "value"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["config"]["finite.ensemble.n"], 5);
}

#[test]
fn validate_reports_every_requested_criterion() {
    let (code, out, _) = softedge(&["validate", "--criteria", "1,7"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
}

#[test]
fn errors_are_structured_and_nonzero() {
    let (code, _, err) = softedge(&["expand", "-n", "10", "--m", "3", "--grid", "0:1:1"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"]["kind"], "table");
    let (code, _, _) = softedge(&["finite", "--beta", "1", "-n", "5", "--grid", "0:1:1"]);
    assert_eq!(code, 2);
}

#[test]
fn sample_binary_roundtrips() {
    let dir = std::env::temp_dir().join(format!("softedge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("batch.bin");
    let (code, _, _) = softedge(&[
        "-o",
        path.to_str().unwrap(),
        "mc",
        "sample",
        "--beta",
        "4",
        "-n",
        "3",
        "--count",
        "50",
        "--binary",
    ]);
    assert_eq!(code, 0);
    let batch = softedge::mc::read_binary(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!((batch.count, batch.spec.n, batch.workers), (50, 3, 8));
    std::fs::remove_dir_all(&dir).unwrap();
}
