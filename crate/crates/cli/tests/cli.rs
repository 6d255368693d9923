use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_kleinhilb");

fn kleinhilb(args: &[&str]) -> Command {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .env_remove("KLEIN_CACHE_DIR")
        .env_remove("KLEIN_WORKERS")
        .env_remove("KLEIN_BUDGET_MB");
    cmd
}

fn run(args: &[&str]) -> Output {
    kleinhilb(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn series_csv_rows() {
    let o = run(&["series", "--type", "A1", "--order", "4", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "degree,coefficient\n0,1\n1,1\n2,3\n3,5\n4,9\n");
    let o = run(&["series", "--type", "D4", "--order", "0", "--format", "csv"]);
    assert_eq!(stdout(&o), "degree,coefficient\n0,1\n");
}

#[test]
fn series_json_schema() {
    let o = run(&["series", "--type", "A2", "--order", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["input"]["type"], "A2");
    assert_eq!(v["truncation"], 3);
    assert_eq!(v["series"], serde_json::json!(["1", "1", "3", "6"]));
    assert_eq!(
        v["integrality"],
        serde_json::json!({"ok": true, "first_failure_degree": null})
    );
}

#[test]
fn e8_to_order_50_is_integral() {
    let o = run(&["series", "--type", "E8", "--order", "50", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 51);
    assert_eq!(rows[..2], ["0,1", "1,1"]);
}

#[test]
fn surface_examples() {
    let o = run(&["surface", "--chi0", "1", "--sing", "", "--order", "5"]);
    assert_eq!(
        json(&o)["series"],
        serde_json::json!(["1", "1", "2", "3", "5", "7"])
    );
    let o = run(&["surface", "--chi0", "0", "--sing", "A1", "--order", "4"]);
    assert_eq!(
        json(&o)["series"],
        serde_json::json!(["1", "1", "3", "5", "9"])
    );
    let o = run(&["surface", "--chi0", "2", "--sing", "A1,A1", "--order", "1"]);
    assert_eq!(json(&o)["series"], serde_json::json!(["1", "4"]));
    let o = run(&["surface", "--chi0", "-1", "--sing", "A1", "--order", "1"]);
    assert_eq!(json(&o)["series"], serde_json::json!(["1", "0"]));
}

#[test]
fn character_queries() {
    let o = run(&[
        "character",
        "--type",
        "A1",
        "--beta",
        "0",
        "--degree",
        "2",
        "--format",
        "plain",
    ]);
    assert_eq!((code(&o), stdout(&o)), (0, "5\n".to_string()));
    let o = run(&[
        "character",
        "--type",
        "A1",
        "--beta",
        "1",
        "--degree",
        "0",
        "--format",
        "plain",
    ]);
    assert_eq!(stdout(&o), "0\n");
    let o = run(&[
        "character",
        "--type",
        "A2",
        "--beta",
        "-1,1",
        "--degree",
        "1",
    ]);
    assert_eq!(json(&o)["multiplicity"], "0");
    let o = run(&[
        "character",
        "--type",
        "A1",
        "--check-specialization",
        "--order",
        "10",
        "--format",
        "plain",
    ]);
    assert_eq!((code(&o), stdout(&o)), (0, "PASS\n".to_string()));
    let o = run(&[
        "character",
        "--type",
        "A1",
        "--order",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(
        stdout(&o),
        "degree,beta,multiplicity\n0,0,1\n1,-1,1\n1,0,2\n1,1,1\n"
    );
}

#[test]
fn verify_tables() {
    let o = run(&["verify", "--rmax", "2", "--mmax", "4", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let formula: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .inspect(|f| assert_eq!(f[2], f[3]))
        .map(|f| f[2].to_string())
        .collect();
    assert_eq!(formula, ["1", "1", "3", "5", "9"]);
    let o = run(&["verify", "--rmax", "2", "--mmax", "0"]);
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["ok"], true);
    let o = run(&["verify"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["rows"].as_array().unwrap().len(), 27);
}

#[test]
fn integrality_command_and_fault_injection() {
    let o = run(&[
        "integrality",
        "--types",
        "A2,D4",
        "--order",
        "12",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "type,ok,first_failure_degree\nA2,true,\nD4,true,\n"
    );
    let o = run(&[
        "integrality",
        "--types",
        "A2",
        "--order",
        "5",
        "--inject-integrality-fault",
        "4",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["results"][0]["first_failure_degree"], 4);
}

#[test]
fn integrality_failure_emits_cyclotomic_series() {
    let o = run(&[
        "series",
        "--type",
        "A1",
        "--order",
        "4",
        "--inject-integrality-fault",
        "2",
    ]);
    assert_eq!(code(&o), 3);
    let v = json(&o);
    assert_eq!(
        v["integrality"],
        serde_json::json!({"ok": false, "first_failure_degree": 2})
    );
    assert_eq!(
        v["series"][2],
        serde_json::json!({"m": 3, "coeffs": ["3", "1"]})
    );
    assert_eq!(
        v["series"][4],
        serde_json::json!({"m": 3, "coeffs": ["9", "0"]})
    );
    let o = run(&[
        "surface",
        "--chi0",
        "1",
        "--sing",
        "A1",
        "--order",
        "3",
        "--inject-integrality-fault",
        "1",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["series", "--type", "B2"][..],
        &["series", "--type", "E9"],
        &["series", "--type", "A31"],
        &["series", "--type", "D13"],
        &["series", "--type", "A1", "--format", "xml"],
        &["surface", "--chi0", "1", "--sing", "A1,Q7"],
        &["verify", "--rmax", "1"],
        &["character", "--type", "A2", "--beta", "1", "--degree", "1"],
        &["series", "--type", "A1", "--workers", "0"],
        &["bogus"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
    assert_eq!(
        code(&run(&[
            "series",
            "--type",
            "A4",
            "--order",
            "1",
            "--max-a-rank",
            "3"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "series",
            "--type",
            "A31",
            "--order",
            "1",
            "--max-a-rank",
            "31"
        ])),
        0
    );
}

#[test]
fn budget_exhaustion_exits_4() {
    assert_eq!(code(&run(&["series", "--type", "A30", "--order", "50"])), 4);
    assert_eq!(
        code(&run(&[
            "character",
            "--type",
            "E8",
            "--order",
            "12",
            "--budget-mb",
            "1"
        ])),
        4
    );
    let o = kleinhilb(&["character", "--type", "E8", "--order", "12"])
        .env("KLEIN_BUDGET_MB", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

fn cache_entries(dir: &Path) -> usize {
    std::fs::read_dir(dir).unwrap().count()
}

#[test]
fn cache_hits_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for format in ["json", "csv", "plain"] {
        let args = [
            "series", "--type", "D5", "--order", "20", "--format", format,
        ];
        let fresh = stdout(&run(&args));
        let mut with_cache = args.to_vec();
        with_cache.extend(["--cache-dir", d]);
        let first = stdout(&run(&with_cache));
        let second = stdout(&run(&with_cache));
        assert_eq!(fresh, first);
        assert_eq!(fresh, second);
    }
    assert_eq!(cache_entries(dir.path()), 1);

    let fault = [
        "series",
        "--type",
        "A2",
        "--order",
        "5",
        "--inject-integrality-fault",
        "2",
        "--cache-dir",
        d,
    ];
    let a = run(&fault);
    let b = run(&fault);
    assert_eq!((code(&a), code(&b)), (3, 3));
    assert_eq!(a.stdout, b.stdout);

    for entry in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::remove_file(entry.unwrap().path()).unwrap();
    }
    let args = ["series", "--type", "D5", "--order", "20", "--cache-dir", d];
    let recomputed = stdout(&run(&args));
    assert_eq!(
        recomputed,
        stdout(&run(&["series", "--type", "D5", "--order", "20"]))
    );
}

#[test]
fn corrupt_cache_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = [
        "surface",
        "--chi0",
        "1",
        "--sing",
        "A2",
        "--order",
        "8",
        "--cache-dir",
        d,
    ];
    let good = stdout(&run(&args));
    let entry = std::fs::read_dir(dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    std::fs::write(&entry, "garbage").unwrap();
    assert_eq!(stdout(&run(&args)), good);
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let from_file = dir.path().join("file-cache");
    let from_env = dir.path().join("env-cache");
    let from_flag = dir.path().join("flag-cache");
    let cfg = dir.path().join("klein.conf");
    std::fs::write(
        &cfg,
        format!(
            "# settings\ncache_dir = {}\nworkers = 2\n",
            from_file.display()
        ),
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let base = ["series", "--type", "A3", "--order", "6", "--config", cfg];

    assert_eq!(code(&run(&base)), 0);
    assert!(from_file.exists());

    let o = kleinhilb(&base)
        .env("KLEIN_CACHE_DIR", &from_env)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(from_env.exists());

    let mut with_flag = base.to_vec();
    with_flag.extend(["--cache-dir", from_flag.to_str().unwrap()]);
    let o = kleinhilb(&with_flag)
        .env("KLEIN_CACHE_DIR", &from_env)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(from_flag.exists());

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "workers = 0\n").unwrap();
    assert_eq!(
        code(&run(&[
            "series",
            "--type",
            "A1",
            "--config",
            bad.to_str().unwrap()
        ])),
        2
    );
    let o = kleinhilb(&["series", "--type", "A1", "--order", "2"])
        .env("KLEIN_WORKERS", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn shells_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shells.csv");
    let o = run(&[
        "series",
        "--type",
        "E8",
        "--order",
        "3",
        "--shells-csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        "norm,count\n0,1\n2,240\n4,2160\n6,6720\n"
    );
}

#[test]
fn selfcheck_passes() {
    let o = run(&["selfcheck", "--format", "plain"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn output_independent_of_workers() {
    let a = run(&["series", "--type", "E7", "--order", "25", "--workers", "1"]);
    let b = run(&["series", "--type", "E7", "--order", "25", "--workers", "8"]);
    assert_eq!(a.stdout, b.stdout);
}
