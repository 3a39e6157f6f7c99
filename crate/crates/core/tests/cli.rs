use std::process::{Command, Output};

fn toeplitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn gen_expands_the_recursion() {
    let o = toeplitz(&["gen", "--coding", "a:2 | x:2 y:2 z:2", "--length", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "axayaxaz\n");
}

#[test]
fn complexity_check_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let o = toeplitz(&[
        "complexity",
        "--preset",
        "grigorchuk",
        "--max-len",
        "33",
        "--check",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["L", "formula", "oracle", "growth"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 34);
    assert!(rows.iter().all(|r| r[1] == r[2]));
    assert_eq!(&rows[33][1], "83");
}

#[test]
fn debruijn_dot_has_six_nodes_and_eight_edges() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g2.dot");
    let o = toeplitz(&[
        "debruijn",
        "--preset",
        "grigorchuk",
        "-L",
        "2",
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    let nodes = text
        .lines()
        .filter(|l| l.trim_start().starts_with('v') && !l.contains("->"))
        .count();
    let edges = text.lines().filter(|l| l.contains("->")).count();
    assert_eq!((nodes, edges), (6, 8));
}

#[test]
fn json_outputs_parse() {
    let o = toeplitz(&[
        "repetitivity",
        "--preset",
        "grigorchuk",
        "--max-len",
        "4",
        "--alpha",
        "3/2",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["alpha"]["verdict"], "violated");
    assert_eq!(v["alpha"]["kind"], "exact");
    assert_eq!(v["records"][3]["formula"], "33");

    let o = toeplitz(&[
        "bosh",
        "--coding",
        "| @liuqu(2)",
        "--horizon",
        "8",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bosh"]["verdict"], "inconclusive");
    assert_eq!(v["bosh"]["trend"], "increasing");

    let o = toeplitz(&["presets", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .any(|p| p["name"] == "grigorchuk"));
}

#[test]
fn exit_codes_and_flag_names() {
    let cases: &[(&[&str], i32, &str)] = &[
        (
            &["gen", "--coding", "a:2 |", "--length", "4"],
            2,
            "--coding",
        ),
        (
            &[
                "gen",
                "--coding",
                "a:2 | b:2",
                "--preset",
                "grigorchuk",
                "--length",
                "4",
            ],
            2,
            "--coding",
        ),
        (&["gen", "--preset", "nope", "--length", "4"], 2, "--preset"),
        (
            &[
                "gen",
                "--preset",
                "grigorchuk",
                "--length",
                "4096",
                "--budget",
                "100",
            ],
            3,
            "--budget",
        ),
        (
            &[
                "complexity",
                "--coding",
                "| @liuqu(2)",
                "--max-len",
                "100000000",
                "--gen-horizon",
                "8",
            ],
            3,
            "--gen-horizon",
        ),
        (
            &[
                "bosh",
                "--preset",
                "grigorchuk",
                "--eta",
                "8",
                "--prefix",
                "10",
            ],
            2,
            "--prefix",
        ),
        (
            &[
                "spectrum",
                "--preset",
                "grigorchuk",
                "--q",
                "a=0",
                "--size",
                "8",
            ],
            2,
            "--q",
        ),
        (
            &[
                "spectrum",
                "--preset",
                "grigorchuk",
                "--q",
                "const=0",
                "--p",
                "a=0,x=1,y=1,z=1",
                "--size",
                "8",
            ],
            2,
            "--p",
        ),
        (
            &[
                "spectrum",
                "--preset",
                "grigorchuk",
                "--q",
                "const=0",
                "--size",
                "8",
                "--energies",
                "1:2",
            ],
            2,
            "--energies",
        ),
        (
            &[
                "gen",
                "--preset",
                "grigorchuk",
                "--length",
                "4",
                "--jobs",
                "0",
            ],
            2,
            "--jobs",
        ),
        (&["complexity", "--preset", "grigorchuk"], 2, "--max-len"),
    ];
    for (args, code, flag) in cases {
        let o = toeplitz(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(flag), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn periods_feed_presets() {
    let o = toeplitz(&["gen", "--preset", "l-grigorchuk(1,2,1)", "--length", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o2 = toeplitz(&[
        "gen",
        "--preset",
        "liuqu",
        "--periods",
        "3",
        "--length",
        "12",
    ]);
    assert_eq!(o2.status.code(), Some(0), "{}", stderr(&o2));
    assert_eq!(stdout(&o2).trim().len(), 12);
}

#[test]
fn json_can_go_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("g.json");
    let dot = dir.path().join("g.dot");
    let o = toeplitz(&[
        "debruijn",
        "--preset",
        "grigorchuk",
        "-L",
        "2",
        "--dot",
        dot.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 8);
}
