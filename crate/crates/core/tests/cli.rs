use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gl2lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl2lab"))
        .args(args)
        .env_remove("GL2LAB_CACHE_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn classify_diagonal_generator() {
    let o = gl2lab(&["classify", "--p", "5", "--gens", "2,0,0,1"]);
    assert_eq!(code(&o), 0);
    let tags: Vec<String> = json(&o)["labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["tag"].as_str().unwrap().into())
        .collect();
    assert!(
        tags.contains(&"SplitNormalizerConj".to_string()),
        "{tags:?}"
    );
}

#[test]
fn classify_standard_family() {
    let o = gl2lab(&["classify", "--p", "5", "--family", "SL2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        json(&o)["labels"],
        serde_json::json!([{ "tag": "ContainsSL2" }])
    );
}

#[test]
fn usage_and_budget_errors_exit_2() {
    for args in [
        &["classify", "--p", "4", "--gens", "1,0,0,1"][..],
        &["classify", "--p", "5", "--gens", "1,2,3"],
        &["classify", "--p", "5", "--gens", "1,2,2,4"],
        &["scan", "cyclotomic", "--p", "53"],
        &["scan", "abelian", "--p", "17", "--ramified", "--unramified"],
        &["verify", "containment", "--p", "13", "--part", "e"],
        &["verify", "dickson", "--p", "11"],
        &["cache", "stat"],
        &["frobnicate"],
    ] {
        let o = gl2lab(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty());
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn budget_overrides_apply() {
    assert_eq!(
        code(&gl2lab(&[
            "scan",
            "cyclotomic",
            "--p",
            "23",
            "--max-cyclic-p",
            "19"
        ])),
        2
    );
    assert_eq!(
        code(&gl2lab(&[
            "verify",
            "containment",
            "--p",
            "7",
            "--part",
            "a",
            "--max-exhaustive-p",
            "5"
        ])),
        2
    );
}

#[test]
fn verification_passes() {
    let o = gl2lab(&["verify", "containment", "--p", "13", "--part", "a"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["passed"], true);
    let o = gl2lab(&[
        "verify", "index2", "--p", "5", "--cartan", "nonsplit", "--format", "text",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
}

#[test]
fn scan_report_shape_and_exit_code() {
    let o = gl2lab(&[
        "scan",
        "cyclotomic",
        "--p",
        "17",
        "--degree",
        "1",
        "--unramified",
    ]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(
        r["params"],
        serde_json::json!({ "p": 17, "d": 1, "ramified": false, "mode": "cyclotomic" })
    );
    assert_eq!(r["violations"], serde_json::json!([]));
    assert_eq!(r["asserted"], true);
    for field in ["classes", "totals", "elapsed_ms"] {
        assert!(r.get(field).is_some(), "{field}");
    }
}

#[test]
fn csv_has_one_row_per_class() {
    let o = gl2lab(&["scan", "abelian", "--p", "7", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let classes = json(&gl2lab(&["scan", "abelian", "--p", "7"]))["totals"]["classes"]
        .as_u64()
        .unwrap();
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(reader.records().count() as u64, classes);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = gl2lab(&[
        "classify",
        "--p",
        "7",
        "--family",
        "Cns",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["is_abelian"], true);
}

fn scan_with_cache(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "scan",
        "abelian",
        "--p",
        "7",
        "--no-timing",
        "--cache-dir",
        dir.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    gl2lab(&args)
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let uncached = gl2lab(&["scan", "abelian", "--p", "7", "--no-timing"]);
    let stat = gl2lab(&["cache", "stat", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(json(&stat)["entries"], serde_json::json!([]));
    let cold = scan_with_cache(dir.path(), &[]);
    let warm = scan_with_cache(dir.path(), &[]);
    assert_eq!(code(&cold), 0);
    assert_eq!(uncached.stdout, cold.stdout);
    assert_eq!(cold.stdout, warm.stdout);
    assert!(warm.stderr.is_empty());
    let stat = json(&gl2lab(&[
        "cache",
        "stat",
        "--cache-dir",
        dir.path().to_str().unwrap(),
    ]));
    assert_eq!(stat["entries"].as_array().unwrap().len(), 1);
    assert_eq!(stat["entries"][0]["valid"], true);
}

#[test]
fn tampered_cache_entry_is_rederived() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        code(&gl2lab(&[
            "cache",
            "warm",
            "--family",
            "abelian",
            "--p",
            "7",
            "--cache-dir",
            d
        ])),
        0
    );
    let clean = scan_with_cache(dir.path(), &[]);
    let file = fs::read_dir(dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let text = fs::read_to_string(&file).unwrap();
    let line = text.lines().rev().find(|l| !l.is_empty()).unwrap();
    fs::write(&file, text.replacen(line, "1,0,0,1", 1)).unwrap();
    let repaired = scan_with_cache(dir.path(), &[]);
    assert_eq!(code(&repaired), 0);
    assert_eq!(clean.stdout, repaired.stdout);
    assert!(String::from_utf8_lossy(&repaired.stderr).contains("re-derived"));
    let again = scan_with_cache(dir.path(), &[]);
    assert!(again.stderr.is_empty());
}

#[test]
fn cache_warm_stat_clear() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let warm = json(&gl2lab(&[
        "cache",
        "warm",
        "--family",
        "cyclic",
        "--p",
        "3,5,7",
        "--cache-dir",
        d,
    ]));
    assert_eq!(warm["entries"].as_array().unwrap().len(), 3);
    let cleared = json(&gl2lab(&["cache", "clear", "--cache-dir", d]));
    assert_eq!(cleared["removed"], 3);
    let stat = gl2lab(&["cache", "stat", "--cache-dir", d, "--format", "csv"]);
    assert_eq!(String::from_utf8_lossy(&stat.stdout).lines().count(), 1);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gl2lab"))
        .args(["cache", "warm", "--family", "cyclic", "--p", "5"])
        .env("GL2LAB_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn reports_are_deterministic_across_runs_and_workers() {
    let run = |w: &str| {
        gl2lab(&[
            "scan",
            "cyclotomic",
            "--p",
            "23",
            "--no-timing",
            "--workers",
            w,
        ])
        .stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("3"));
    let run = |w: &str| gl2lab(&["verify", "abelian-shapes", "--p", "5", "--workers", w]).stdout;
    assert_eq!(run("1"), run("2"));
}
