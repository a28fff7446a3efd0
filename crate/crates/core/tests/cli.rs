use std::path::PathBuf;
use std::process::{Command, Output};

fn tkrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tkrank"))
        .args(args)
        .env_remove("TKRANK_MODULUS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tkrank-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout(out)).unwrap()
}

#[test]
fn gen_then_solve_planted() {
    let path = scratch("planted.json");
    let gen = tkrank(&[
        "gen",
        "tripartition",
        "--n",
        "3",
        "--plant",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let p = path.to_str().unwrap();
    for algo in ["brute", "wht"] {
        let result = json(&tkrank(&["solve", p, "--algo", algo]));
        assert_eq!(result["answer"], true, "{algo}");
    }
    let brute = json(&tkrank(&["solve", p, "--algo", "brute"]));
    assert_eq!(brute["witness"].as_array().unwrap().len(), 3);
    assert_eq!(
        brute["count"],
        json(&tkrank(&["solve", p, "--algo", "wht"]))["count"]
    );
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let a = tkrank(&[
        "gen", "setcover", "--n", "9", "--s", "3", "--t", "3", "--plant", "--seed", "4",
    ]);
    let b = tkrank(&[
        "gen", "setcover", "--n", "9", "--s", "3", "--t", "3", "--plant", "--seed", "4",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = tkrank(&[
        "gen", "setcover", "--n", "9", "--s", "3", "--t", "3", "--plant", "--seed", "5",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn tensor_solver_rejects_a_no_instance() {
    let path = scratch("empty.json");
    let gen = tkrank(&[
        "gen",
        "tripartition",
        "--n",
        "3",
        "--size",
        "0",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let p = path.to_str().unwrap();
    assert_eq!(
        json(&tkrank(&["solve", p, "--algo", "brute"]))["answer"],
        false
    );
    let result = json(&tkrank(&[
        "solve", p, "--algo", "tensor", "--k", "1", "--lambda", "5", "--seed", "7",
    ]));
    assert_eq!(result["answer"], false);
    assert_eq!(result["p"], "9/70");

    // a no-instance with nonempty families
    let no = scratch("no.json");
    std::fs::write(&no, r#"{"n": 2, "families": [[[1,2]], [[3,4]], [[1,5]]]}"#).unwrap();
    let result = json(&tkrank(&[
        "solve",
        no.to_str().unwrap(),
        "--algo",
        "tensor",
        "--k",
        "2",
        "--seed",
        "7",
    ]));
    assert_eq!(result["answer"], false);
    assert_eq!(result["trials_used"], 5);
    assert_eq!(result["p"], "1/1");
}

#[test]
fn solve_set_cover_files() {
    let path = scratch("cover.json");
    std::fs::write(
        &path,
        r#"{"n": 6, "t": 2, "s": 3, "sets": [[1,2,3],[4,5,6],[2,4]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    for algo in ["exact", "brute", "wht", "tensor"] {
        assert_eq!(
            json(&tkrank(&["solve", p, "--algo", algo]))["answer"],
            true,
            "{algo}"
        );
    }
    std::fs::write(
        &path,
        r#"{"n": 6, "t": 1, "s": 3, "sets": [[1,2,3],[4,5,6],[2,4]]}"#,
    )
    .unwrap();
    for algo in ["exact", "wht", "tensor"] {
        assert_eq!(
            json(&tkrank(&["solve", p, "--algo", algo]))["answer"],
            false,
            "{algo}"
        );
    }
}

#[test]
fn malformed_input_exits_with_two() {
    let path = scratch("bad.json");
    std::fs::write(&path, "{\"n\": 3, \"families\": [[[1,2,3]]").unwrap();
    let out = tkrank(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let missing = tkrank(&["solve", "/nonexistent/instance.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let tri_exact = scratch("tri.json");
    std::fs::write(&tri_exact, r#"{"n": 1, "families": [[[1]], [[2]], [[3]]]}"#).unwrap();
    assert_eq!(
        tkrank(&["solve", tri_exact.to_str().unwrap(), "--algo", "exact"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn guard_exits_with_three() {
    assert_eq!(
        tkrank(&["tensor", "build-tk", "--k", "5"]).status.code(),
        Some(3)
    );
    let path = scratch("big.json");
    let gen = tkrank(&[
        "gen",
        "tripartition",
        "--n",
        "9",
        "--size",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    assert_eq!(
        tkrank(&["solve", path.to_str().unwrap(), "--algo", "wht"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        tkrank(&["bench", "--suite", "wht", "--sizes", "9"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn decompose_then_verify() {
    let path = scratch("d1.json");
    let p = path.to_str().unwrap();
    assert!(
        tkrank(&["tensor", "decompose", "--group", "--k", "1", "--out", p])
            .status
            .success()
    );
    assert_eq!(
        stdout(&tkrank(&["tensor", "verify", p, "--k", "1"])).trim(),
        "valid, rank 4"
    );

    // drop one term
    let mut file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    file["terms"].as_array_mut().unwrap().pop();
    let truncated = scratch("d1-truncated.json");
    std::fs::write(&truncated, serde_json::to_string(&file).unwrap()).unwrap();
    let out = tkrank(&["tensor", "verify", truncated.to_str().unwrap(), "--k", "1"]);
    assert!(stdout(&out).starts_with("invalid"));

    // cut the text short
    let text = std::fs::read_to_string(&path).unwrap();
    let cut = scratch("d1-cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    let out = tkrank(&["tensor", "verify", cut.to_str().unwrap(), "--k", "1"]);
    assert!(stdout(&out).starts_with("invalid"));
    assert_eq!(out.status.code(), Some(2));

    // wrong k
    let out = tkrank(&["tensor", "verify", p, "--k", "2"]);
    assert!(stdout(&out).starts_with("invalid"));

    let naive = scratch("d2-naive.json");
    assert!(tkrank(&[
        "tensor",
        "decompose",
        "--naive",
        "--k",
        "2",
        "--out",
        naive.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(
        stdout(&tkrank(&[
            "tensor",
            "verify",
            naive.to_str().unwrap(),
            "--k",
            "2"
        ]))
        .trim(),
        "valid, rank 64"
    );
}

#[test]
fn build_tk_writes_the_support() {
    let out = json(&tkrank(&["tensor", "build-tk", "--k", "2"]));
    assert_eq!(out["dims"], serde_json::json!([15, 15, 15]));
    assert_eq!(out["entries"].as_array().unwrap().len(), 90);
}

#[test]
fn modulus_from_env_and_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_tkrank"))
        .args(["tensor", "decompose", "--k", "1"])
        .env("TKRANK_MODULUS", "101")
        .output()
        .unwrap();
    assert_eq!(json(&out)["p"], 101);
    assert_eq!(
        json(&tkrank(&[
            "--modulus",
            "13",
            "tensor",
            "decompose",
            "--k",
            "1"
        ]))["p"],
        13
    );
    assert_eq!(
        tkrank(&["--modulus", "15", "tensor", "decompose", "--k", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bounds_commands() {
    let out = stdout(&tkrank(&["tensor", "bounds", "--k", "2"]));
    assert!(out.contains("640/81"), "{out}");
    let report = json(&tkrank(&["tensor", "bounds", "--k", "1", "--json"]));
    assert_eq!(report["rank_threshold"]["numerator"], "16");
    assert_eq!(report["rank_threshold"]["denominator"], "9");
    let tables = json(&tkrank(&["bounds", "--k-max", "12", "--json"]));
    let rows = tables["runtime_bases"].as_array().unwrap();
    let first = rows.iter().find(|r| r["beats_fourier"] == true).unwrap();
    assert_eq!(first["k"], 11);
    let text = stdout(&tkrank(&["bounds", "--k-max", "3"]));
    assert!(text.contains("27/2") || text.contains("1.35"), "{text}");
}

#[test]
fn bench_answers_are_reproducible() {
    let run = || {
        json(&tkrank(&[
            "bench", "--suite", "brute", "--sizes", "2,3", "--reps", "1", "--min-ms", "0",
            "--seed", "3", "--json",
        ]))
    };
    let strip = |v: serde_json::Value| {
        v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                (
                    r["n"].clone(),
                    r["answer"].clone(),
                    r["family_sizes"].clone(),
                )
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(run()), strip(run()));
}

#[test]
fn quick_selftest_passes() {
    let out = tkrank(&["selftest", "--quick"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(!stdout(&out).contains("FAIL"));
}
