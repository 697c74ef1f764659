use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tensorank::synth_io::read_tensor;

fn tensorank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tensorank"))
        .args(args)
        .env_remove("TENSORANK_MAX_L")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = tensorank(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_writes_the_requested_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tns");
    let out = ok(&[
        "synth",
        "--cp",
        "--L",
        "6",
        "--D",
        "2",
        "--R",
        "3",
        "--seed",
        "42",
        "-o",
        s(&path),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed 42"));
    assert_eq!(read_tensor(&path).unwrap().len(), 64);

    let out = ok(&["synth", "--expr", "x1*x2", "--P", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let values: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(text.lines().next().unwrap(), "tns v1 2 2 2");
    assert_eq!(
        values
            .iter()
            .map(|v| v.parse::<f64>().unwrap())
            .collect::<Vec<_>>(),
        vec![0.0, 0.0, 0.0, 1.0]
    );

    let path = dir.path().join("tt.tns");
    ok(&[
        "synth",
        "--model",
        "tt",
        "--L",
        "8",
        "--D",
        "2",
        "--r",
        "3",
        "--seed",
        "7",
        "-o",
        s(&path),
    ]);
    assert_eq!(read_tensor(&path).unwrap().dims(), &[2; 8]);
}

#[test]
fn decompose_reports() {
    let dir = tempfile::tempdir().unwrap();
    let dense = dir.path().join("dense.tns");
    ok(&[
        "synth",
        "--dense",
        "--L",
        "6",
        "--seed",
        "3",
        "-o",
        s(&dense),
    ]);
    let r = json(&ok(&[
        "decompose",
        "--input",
        s(&dense),
        "--model",
        "tt",
        "--no-timestamp",
    ]));
    assert_eq!(r["kind"], "decomposition");
    assert_eq!(r["schema_version"], 1);
    assert!(r.get("generated_at_unix").is_none());
    assert!(r["achieved_error"].as_f64().unwrap() <= 1e-10 * r["norm_sq"].as_f64().unwrap());

    let rank1 = dir.path().join("rank1.tns");
    ok(&[
        "synth",
        "--cp",
        "--L",
        "5",
        "--D",
        "3",
        "--R",
        "1",
        "-o",
        s(&rank1),
    ]);
    let r = json(&ok(&[
        "decompose",
        "--input",
        s(&rank1),
        "--model",
        "tt",
        "--no-timestamp",
    ]));
    assert_eq!(r["ranks"], serde_json::json!([1, 1, 1, 1]));

    let tt = dir.path().join("tt.tns");
    let dump = dir.path().join("model.json");
    ok(&[
        "synth",
        "--model",
        "tt",
        "--L",
        "8",
        "--r",
        "3",
        "--seed",
        "1",
        "-o",
        s(&tt),
    ]);
    let r = json(&ok(&[
        "decompose",
        "--input",
        s(&tt),
        "--max-rank",
        "3",
        "--dump-model",
        s(&dump),
        "--no-timestamp",
    ]));
    assert!(r["relative_error"].as_f64().unwrap() <= 1e-9);
    let model: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert_eq!(model["model"], "tt");

    let r = json(&ok(&[
        "decompose",
        "--input",
        s(&tt),
        "--model",
        "tucker",
        "--ranks",
        "2,2,2,2,2,2,2,2",
        "--no-timestamp",
    ]));
    assert_eq!(r["ranks"], serde_json::json!(vec![2; 8]));
    let r = json(&ok(&[
        "decompose",
        "--input",
        s(&tt),
        "--model",
        "ht",
        "--max-rank",
        "4",
        "--no-timestamp",
    ]));
    assert!(r["relative_error"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn analyze_classifies_and_checks() {
    let sep = |kind: &str| {
        let r = json(&ok(&[
            "analyze",
            "--model",
            kind,
            "--L",
            "16",
            "--D",
            "2",
            "--r",
            "2",
            "--no-timestamp",
        ]));
        r["separability"]["ssb_class"].as_str().unwrap().to_string()
    };
    assert_eq!(sep("tt"), "constant");
    assert_eq!(sep("mera"), "logarithmic");

    let dir = tempfile::tempdir().unwrap();
    let dense = dir.path().join("dense.tns");
    let csv = dir.path().join("series.csv");
    ok(&[
        "synth",
        "--dense",
        "--L",
        "6",
        "--seed",
        "5",
        "-o",
        s(&dense),
    ]);
    let r = json(&ok(&[
        "analyze",
        "--input",
        s(&dense),
        "--model",
        "tt",
        "--r",
        "2",
        "--emit-csv",
        s(&csv),
        "--no-timestamp",
    ]));
    assert_eq!(r["cannikin"]["verdict"], false);
    assert_eq!(r["rank_profile"]["levels"][2]["max_rank"], 8);
    let csv = std::fs::read_to_string(&csv).unwrap();
    assert!(csv.starts_with("series,m,value\n"));
    assert!(csv.contains("rank_max,3,8"));
}

#[test]
fn capacity_table() {
    let r = json(&ok(&[
        "capacity",
        "--L",
        "8",
        "--D",
        "2",
        "--assume",
        "exp:2",
        "--no-timestamp",
    ]));
    assert_eq!(r["chi_tt_ht"], 16.0);
    assert!((r["chi_mera"]["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
    assert!((r["margin_log2"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let ceil: Vec<u64> = r["required_dims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["ceil"].as_u64().unwrap())
        .collect();
    assert_eq!(ceil, vec![16, 16, 4]);
    assert_eq!(r["tt_mera_relation"], true);
    let r = json(&ok(&[
        "capacity",
        "--L",
        "8",
        "--assume",
        "const:5",
        "--no-timestamp",
    ]));
    assert!(r["margin_log2"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.tns");
    let runs: Vec<Vec<String>> = vec![
        vec!["synth", "--cp", "--L", "6", "--R", "2", "--seed", "11"],
        vec![
            "synth", "--model", "mera", "--L", "8", "--r", "2", "--seed", "11",
        ],
        vec![
            "decompose",
            "--input",
            s(&t),
            "--model",
            "tt",
            "--max-rank",
            "2",
            "--no-timestamp",
        ],
        vec![
            "decompose",
            "--input",
            s(&t),
            "--model",
            "ht",
            "--no-timestamp",
        ],
        vec![
            "decompose",
            "--input",
            s(&t),
            "--model",
            "tucker",
            "--no-timestamp",
        ],
        vec![
            "analyze",
            "--input",
            s(&t),
            "--model",
            "mera",
            "--r",
            "2",
            "--no-timestamp",
        ],
        vec![
            "capacity",
            "--L",
            "16",
            "--assume",
            "pow:1:2",
            "--no-timestamp",
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    ok(&["synth", "--dense", "--L", "8", "--seed", "2", "-o", s(&t)]);
    for args in &runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = ok(&args);
        let b = ok(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
    // the file path route is deterministic too
    let (x, y) = (dir.path().join("x.json"), dir.path().join("y.json"));
    ok(&["capacity", "--L", "8", "--no-timestamp", "-o", s(&x)]);
    ok(&["capacity", "--L", "8", "--no-timestamp", "-o", s(&y)]);
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
    // with a timestamp the envelope carries it
    let r = json(&ok(&["capacity", "--L", "8"]));
    assert!(r["generated_at_unix"].is_u64());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| tensorank(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["synth", "--cp", "--L", "4", "--bogus"]), Some(2));
    assert_eq!(code(&["synth", "--cp", "--dense", "--L", "4"]), Some(2));
    assert_eq!(code(&["synth", "--cp"]), Some(2));
    assert_eq!(code(&["synth", "--expr", "x1 +", "--P", "2"]), Some(2));
    assert_eq!(
        code(&["decompose", "--input", "/nonexistent/t.tns"]),
        Some(1)
    );
    assert_eq!(
        code(&["decompose", "--input", "x.tns", "--model", "mera"]),
        Some(2)
    );
    assert_eq!(
        code(&["capacity", "--L", "8", "--assume", "pow:1:-1"]),
        Some(2)
    );
    assert_eq!(
        code(&["capacity", "--L", "8", "--assume", "table:/nonexistent"]),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("n.txt");
    std::fs::write(&table, "1 4\n2 2\n3 8\n4 9\n").unwrap();
    assert_eq!(
        code(&[
            "capacity",
            "--L",
            "8",
            "--assume",
            &format!("table:{}", s(&table))
        ]),
        Some(2)
    );

    let t = dir.path().join("t.tns");
    ok(&["synth", "--dense", "--L", "6", "-o", s(&t)]);
    let out = Command::new(env!("CARGO_BIN_EXE_tensorank"))
        .args(["analyze", "--input", s(&t)])
        .env("TENSORANK_MAX_L", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TENSORANK_MAX_L"));
}
