use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dsa-preamble"));
    cmd.env_remove("DSA_PREAMBLE_OUT_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn trace_of_two_tone() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("s.csv");
    fs::write(&input, "index,re,im\n0,1,0\n1,1,0\n").unwrap();
    let out = run(&["trace", "--input", input.to_str().unwrap(), "--points", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t_frac,imepr\n"));
    let rows = csv_rows(&text);
    let want = [[0.0, 2.0], [0.25, 1.0], [0.5, 0.0], [0.75, 1.0]];
    assert_eq!(rows.len(), 4);
    for (r, w) in rows.iter().zip(want) {
        assert!(
            (r[0] - w[0]).abs() < 1e-12 && (r[1] - w[1]).abs() < 1e-9,
            "{r:?}"
        );
    }
}

#[test]
fn trace_peak_of_masked_family() {
    let out = run(&[
        "trace", "--family", "x", "--m", "3", "--mask", "14", "--points", "4096",
    ]);
    assert!(out.status.success());
    let peak = csv_rows(&stdout(&out))
        .iter()
        .map(|r| r[1])
        .fold(0.0, f64::max);
    assert!((peak - 3.3166).abs() < 0.02, "{peak}");
}

#[test]
fn generate_binary_family() {
    let out = run(&["generate", "--family", "x", "--m", "3", "--format", "csv"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[1].abs() == 1.0 && r[2] == 0.0));

    let out = run(&[
        "generate", "--family", "y", "--m", "4", "--q", "4", "--ck", "1,2,3,0",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["length"], 16);
    assert_eq!(v["members"].as_array().unwrap().len(), 4);
    for p in v["members"][0]["phases"].as_array().unwrap() {
        assert!(p.as_u64().unwrap() < 4);
    }
}

#[test]
fn malformed_descriptor_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"theorem\": \"FamilyX\", \"m\": ").unwrap();
    for cmd in ["generate", "verify"] {
        let out = run(&[cmd, "--descriptor", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("parsing descriptor"));
    }
    fs::write(
        &path,
        r#"{"theorem":"FamilyY","m":4,"q":2,"pi":[1,2,3,4],"c_k":[0,0,0,0],"c":0}"#,
    )
    .unwrap();
    let out = run(&["verify", "--descriptor", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["verify", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn verify_example_holds_and_mutation_fails() {
    let out = run(&[
        "verify", "--family", "y", "--m", "4", "--q", "4", "--ck", "1,2,3,0", "--c", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 14);
    assert!(lines.iter().all(|v| v["holds"] == true));
    let acp: Vec<_> = lines.iter().filter(|v| v["relation"] == "ACP").collect();
    assert!(acp.iter().all(|v| v["mu"] == 4));

    let dir = tempfile::tempdir().unwrap();
    let gen = run(&["generate", "--family", "x", "--m", "3", "--format", "csv"]);
    let mutated = stdout(&gen).replacen("\n0,1,0\n", "\n0,-1,0\n", 1);
    assert_ne!(mutated, stdout(&gen));
    let path = dir.path().join("a.csv");
    fs::write(&path, mutated).unwrap();
    let out = run(&[
        "verify",
        "--family",
        "x",
        "--m",
        "3",
        "--sequence",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_enumerated_batch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.jsonl");
    let out = run(&[
        "enumerate",
        "--family",
        "y",
        "--m",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 64);
    let out = run(&["verify", "--descriptor", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 64 * 14);
}

#[test]
fn enumerate_is_seeded() {
    let args = [
        "enumerate",
        "--family",
        "x",
        "--m",
        "6",
        "--q",
        "4",
        "--limit",
        "20",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 20);
    let mut other = args;
    other[10] = "8";
    assert_ne!(run(&other).stdout, a.stdout);
}

#[test]
fn analyze_matches_table_row() {
    let out = run(&["analyze", "--family", "x", "--m", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let get = |name: &str| -> f64 {
        row[header.iter().position(|h| *h == name).unwrap()]
            .parse()
            .unwrap()
    };
    assert!((get("A_14") - 3.3274).abs() < 2e-3);
    assert!((get("A_7") - 3.1910).abs() < 2e-3);
    assert!((get("PMEPR_NC") - 4.0).abs() < 2e-3);
}

#[test]
fn analyze_external_sequence_and_certify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zc.csv");
    let gen = run(&[
        "generate",
        "--baseline",
        "zc",
        "--m",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let out = run(&[
        "analyze",
        "--input",
        path.to_str().unwrap(),
        "--grid",
        "continuous",
        "--oversampling",
        "32",
        "--certify",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["per_mask"].as_array().unwrap().len(), 15);
    assert!(v["per_mask"][0]["convergence_delta"].as_f64().unwrap() < 1e-6);

    let out = run(&["analyze", "--input", path.to_str().unwrap(), "--certify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_table_cells() {
    let out = run(&["reproduce-table", "--table", "III", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 5);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let a7 = header.iter().position(|h| *h == "A_7").unwrap();
    let row16: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("16,"))
        .unwrap()
        .split(',')
        .collect();
    assert!((row16[a7].parse::<f64>().unwrap() - 3.0).abs() < 2e-3);

    let out = run(&["reproduce-table", "--table", "6", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["table"]["rows"][0]["label"], "8");
    let a11 = v["table"]["columns"]
        .as_array()
        .unwrap()
        .iter()
        .position(|c| c == "A_11")
        .unwrap();
    assert!((v["table"]["rows"][0]["values"][a11].as_f64().unwrap() - 2.6667).abs() < 2e-3);

    let out = run(&[
        "reproduce-table",
        "--table",
        "VII",
        "--diff",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 29);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    assert_eq!(
        run(&["reproduce-table", "--table", "IX"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_is_deterministic_and_honors_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let out = bin()
            .env("DSA_PREAMBLE_OUT_DIR", dir.path())
            .args(["reproduce-table", "--table", "VIII", "--format", "json"])
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let first = fs::read(dir.path().join("table_VIII.json")).unwrap();
    let direct = run(&["reproduce-table", "--table", "VIII", "--format", "json"]);
    assert_eq!(first, direct.stdout);

    let out = bin()
        .env("DSA_PREAMBLE_OUT_DIR", dir.path())
        .args(["enumerate", "--m", "3", "--out", "sub/x.jsonl"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(dir.path().join("sub/x.jsonl"))
            .unwrap()
            .lines()
            .count(),
        16
    );
}
