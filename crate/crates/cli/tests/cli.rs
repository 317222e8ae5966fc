use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::OnceLock;

use satreason::dataset::read_dataset;
use satreason::{find_one_mcs, CnfPair};
use serde_json::Value;
use sha2::{Digest, Sha256};

const PAIR: &str = "eval-n5-m20-3";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_satreason"));
    cmd.env_remove("SATREASON_DATA_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// One eval dataset shared by every test in this file.
fn eval_dataset() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    let dir = DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eval.jsonl");
        let out = run(&["dataset", "eval", "--seed", "11", "-o", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        dir
    });
    Box::leak(dir.path().join("eval.jsonl").into_boxed_path())
}

fn ds() -> &'static str {
    eval_dataset().to_str().unwrap()
}

fn pair() -> CnfPair {
    read_dataset(eval_dataset()).unwrap().get(PAIR).unwrap().pair().unwrap()
}

fn sha(path: &Path) -> String {
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert!(stdout(&run(&["verify", "--help"])).contains("--answer"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&run(&[])), 3);
    assert_eq!(
        code(&run(&["gen", "-n", "4", "-m", "12", "-o", "x"])),
        3,
        "missing --seed"
    );
    assert_eq!(code(&run(&["dataset", "eval", "-o", "x.jsonl"])), 3, "missing --seed");
    assert_eq!(code(&run(&["solve", "/definitely/not/here.cnf"])), 3);
    assert_eq!(
        code(&run(&[
            "render",
            "--dataset",
            ds(),
            "--pair-id",
            PAIR,
            "--ptype",
            "NOPE"
        ])),
        3
    );
}

#[test]
fn gen_is_seeded_and_solvable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for stem in [&a, &b] {
        let out = run(&[
            "gen",
            "-n",
            "6",
            "-m",
            "24",
            "--seed",
            "5",
            "-o",
            stem.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let file = |stem: &PathBuf, member: &str| PathBuf::from(format!("{}.{member}.cnf", stem.display()));
    assert_eq!(sha(&file(&a, "sat")), sha(&file(&b, "sat")));
    assert_eq!(sha(&file(&a, "unsat")), sha(&file(&b, "unsat")));

    let out = run(&["solve", file(&a, "sat").to_str().unwrap()]);
    assert!(stdout(&out).starts_with("s SATISFIABLE\nv "));
    let out = run(&["--json", "solve", file(&a, "unsat").to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "UNSAT");
    assert!(v["model"].is_null());
    assert!(v["stats"]["conflicts"].as_u64().unwrap() >= 1);

    let text = std::fs::read_to_string(file(&a, "sat")).unwrap();
    let out = run_stdin(&["--json", "solve", "-"], &text);
    assert_eq!(serde_json::from_slice::<Value>(&out.stdout).unwrap()["status"], "SAT");
}

#[test]
fn dataset_is_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("SATREASON_DATA_DIR", dir.path())
        .args([
            "--json",
            "dataset",
            "eval",
            "--seed",
            "11",
            "-o",
            "one.jsonl",
            "--jobs",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["pairs"], 140);
    assert_eq!(summary["n_min"], 3);
    assert_eq!(summary["n_max"], 16);
    let one = dir.path().join("one.jsonl");
    assert_eq!(std::fs::read_to_string(&one).unwrap().lines().count(), 140);
    assert_eq!(sha(&one), sha(eval_dataset()));
}

#[test]
fn render_emits_both_satdp_questions() {
    let out = run(&[
        "--json",
        "render",
        "--dataset",
        ds(),
        "--pair-id",
        PAIR,
        "--ptype",
        "SATDP",
        "--format",
        "dualstory",
    ]);
    assert_eq!(code(&out), 0);
    let qs: Value = serde_json::from_slice(&out.stdout).unwrap();
    let qs = qs.as_array().unwrap();
    assert_eq!(qs.len(), 2);
    assert_eq!(qs[0]["sub_task"], "sat");
    assert_eq!(qs[1]["sub_task"], "unsat");
    assert_eq!(qs[0]["expected_answer_len"], 1);
    assert_eq!(qs[0]["pair_id"], PAIR);
    assert_eq!(qs[0]["extraction_mode"], "answer-line");

    let out = run(&[
        "render",
        "--dataset",
        ds(),
        "--pair-id",
        PAIR,
        "--ptype",
        "MUS",
        "--template",
        "rft",
        "--chatml",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("<|im_start|>system\n"));
    assert!(text.contains("binary string of length 20"));
}

#[test]
fn verify_exit_codes() {
    let mcs = find_one_mcs(&pair().unsat).unwrap().to_bits();
    let base = ["verify", "--dataset", ds(), "--pair-id", PAIR];
    let with = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        code(&run(&args))
    };
    assert_eq!(with(&["--ptype", "MCS", "--answer", &mcs]), 0);
    assert_eq!(with(&["--ptype", "MCS", "--answer", &"1".repeat(20)]), 1);
    assert_eq!(with(&["--ptype", "MCS", "--answer", "0101"]), 2);
    assert_eq!(with(&["--ptype", "MCS", "--answer", &"2".repeat(20)]), 2);
    assert_eq!(with(&["--ptype", "SATDP", "--answer", "1", "--answer", "0"]), 0);
    assert_eq!(with(&["--ptype", "SATDP", "--answer", "1", "--answer", "1"]), 1);
    assert_eq!(with(&["--ptype", "SATDP", "--answer", "0", "--answer", "0"]), 1);
    assert_eq!(
        with(&["--ptype", "SATDP", "--answer", "1"]),
        3,
        "SATDP needs two answers"
    );
    assert_eq!(with(&["--ptype", "SATDP", "--sub-task", "unsat", "--answer", "0"]), 0);
    assert_eq!(with(&["--ptype", "MCS", "--sub-task", "sat", "--answer", &mcs]), 3);
    let mut args = base.to_vec();
    args[4] = "missing-pair";
    args.extend_from_slice(&["--ptype", "MCS", "--answer", &mcs]);
    assert_eq!(code(&run(&args)), 3);
}

#[test]
fn verify_reads_responses() {
    let mcs = find_one_mcs(&pair().unsat).unwrap().to_bits();
    let dir = tempfile::tempdir().unwrap();
    let eval = dir.path().join("eval.txt");
    std::fs::write(&eval, format!("Reasoning...\nAnswer: {mcs}\n")).unwrap();
    let out = run(&[
        "--json",
        "verify",
        "--dataset",
        ds(),
        "--pair-id",
        PAIR,
        "--ptype",
        "MCS",
        "--response",
        eval.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["extracted"], mcs.as_str());

    let tagged = format!("<think>x</think>\n<answer>{mcs}</answer>");
    let args = [
        "verify",
        "--dataset",
        ds(),
        "--pair-id",
        PAIR,
        "--ptype",
        "MCS",
        "--response",
        "-",
    ];
    assert_eq!(code(&run_stdin(&args, &tagged)), 2, "answer-line mode ignores tags");
    let mut tag_args = args.to_vec();
    tag_args.extend_from_slice(&["--mode", "tag"]);
    assert_eq!(code(&run_stdin(&tag_args, &tagged)), 0);
}

#[test]
fn reward_of_a_perfect_response() {
    let mcs = find_one_mcs(&pair().unsat).unwrap().to_bits();
    let text = format!("<think>\nok\n</think>\n<answer>\n{mcs}\n</answer>");
    let out = run_stdin(
        &[
            "reward",
            "--dataset",
            ds(),
            "--pair-id",
            PAIR,
            "--ptype",
            "MCS",
            "--response",
            "-",
        ],
        &text,
    );
    assert_eq!(code(&out), 0);
    let reward: f64 = stdout(&out).trim().parse().unwrap();
    assert!((reward - 1.10).abs() <= 1e-12);

    let out = run_stdin(
        &[
            "--json",
            "reward",
            "--dataset",
            ds(),
            "--pair-id",
            PAIR,
            "--ptype",
            "MCS",
            "--response",
            "-",
            "--w-tag",
            "0",
        ],
        "no tags at all",
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reward"], 0.0);
    assert_eq!(v["correct"], false);
}

#[test]
fn verify_batch_keeps_input_order() {
    let pair = pair();
    let mcs = find_one_mcs(&pair.unsat).unwrap().to_bits();
    let mut lines = Vec::new();
    for i in 0..60 {
        let (ptype, sub, response) = match i % 4 {
            0 => ("MCS", None, format!("<think>a</think>\n<answer>{mcs}</answer>")),
            1 => ("MCS", None, "<think>a</think>\n<answer>0</answer>".to_string()),
            2 => ("SATDP", Some("sat"), "<think>a</think><answer>1</answer>".to_string()),
            _ => ("SATDP", Some("unsat"), "<think>a</think><answer>1</answer>".to_string()),
        };
        let mut v = serde_json::json!({"pair_id": PAIR, "ptype": ptype, "response": response, "format": "MATH"});
        if let Some(sub) = sub {
            v["sub_task"] = sub.into();
        }
        lines.push(v.to_string());
    }
    let input = lines.join("\n") + "\n";
    let out = run_stdin(
        &["verify-batch", "--dataset", ds(), "--input", "-", "--jobs", "4"],
        &input,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let records: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 60);
    for (i, r) in records.iter().enumerate() {
        let expect_ok = matches!(i % 4, 0 | 2);
        assert_eq!(r["semantic_ok"], expect_ok, "record {i}");
        assert_eq!(r["format_ok"], i % 4 != 1, "record {i}");
        assert_eq!(r["format"], "MATH");
        let reward = r["reward"].as_f64().unwrap();
        assert_eq!(reward > 1.0, expect_ok);
    }
    assert_eq!(records[2]["sub_task"], "sat");
    assert!(records[0].get("sub_task").is_none());

    let single = run_stdin(
        &["verify-batch", "--dataset", ds(), "--input", "-", "--jobs", "1"],
        &input,
    );
    assert_eq!(single.stdout, out.stdout);

    let bad = run_stdin(
        &["verify-batch", "--dataset", ds(), "--input", "-"],
        "{\"pair_id\": \"x\"}\n",
    );
    assert_eq!(code(&bad), 3);
    let satdp_without_member = format!("{{\"pair_id\": \"{PAIR}\", \"ptype\": \"SATDP\", \"response\": \"\"}}\n");
    assert_eq!(
        code(&run_stdin(
            &["verify-batch", "--dataset", ds(), "--input", "-"],
            &satdp_without_member
        )),
        3
    );
}

#[test]
fn profile_lists_every_n() {
    let out = run(&["--json", "profile", "--dataset", ds()]);
    assert_eq!(code(&out), 0);
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ns: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["n"].as_u64().unwrap())
        .collect();
    assert_eq!(ns, (3..=16).collect::<Vec<_>>());
}

#[test]
fn corrupt_dataset_is_an_operational_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    let text =
        std::fs::read_to_string(eval_dataset())
            .unwrap()
            .replacen("\"schema_version\":1", "\"schema_version\":9", 1);
    std::fs::write(&path, text).unwrap();
    let out = run(&["profile", "--dataset", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema version"));
}
