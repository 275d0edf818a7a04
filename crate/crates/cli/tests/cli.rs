//! The `tse` binary end to end: exit codes, manifests and file outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use serde_json::{json, Value};
use tempfile::TempDir;

const SUITES: [&str; 2] = ["basque-DO-S_DO_V_AUX", "hindi-S_ne_O_V"];

fn tse(args: &[&str]) -> Output {
    tse_env(args, &[])
}

fn tse_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tse"));
    cmd.args(args).env_remove("TSE_SCORER_TOKEN");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run tse")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Small two-suite run used by most tests.
fn generate(dir: &Path, seed: &str) -> PathBuf {
    let out = dir.join(format!("suites-{seed}"));
    let mut args = vec!["generate", "--seed", seed, "--n", "40", "--out", p(&out), "-q"];
    for s in SUITES {
        args.extend(["--suite", s]);
    }
    let res = tse(&args);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    out
}

fn read_manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("tse-run.json")).unwrap()).unwrap()
}

fn error_json(out: &Output) -> Value {
    let text = stderr(out);
    let line = text
        .lines()
        .rev()
        .find(|l| l.trim_start().starts_with('{'))
        .expect("json error line");
    serde_json::from_str(line).unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name != "tse-run.json" && path.is_file() {
            out.push((name, fs::read(&path).unwrap()));
        }
    }
    out.sort();
    out
}

#[test]
fn generate_is_deterministic_per_seed() {
    let tmp = TempDir::new().unwrap();
    let a = generate(tmp.path(), "42");
    let b_dir = tmp.path().join("again");
    fs::create_dir(&b_dir).unwrap();
    let b = generate(&b_dir, "42");
    let c = generate(tmp.path(), "43");
    assert_eq!(files(&a), files(&b));
    let jsonl = |d: &Path| fs::read(d.join("basque-DO-S_DO_V_AUX.jsonl")).unwrap();
    assert_ne!(jsonl(&a), jsonl(&c));
    let lines = fs::read_to_string(a.join("hindi-S_ne_O_V.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 40);

    let m = read_manifest(&a);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["config"]["seed"], 42);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 4);
    assert!(m["inputs"]
        .as_array()
        .unwrap()
        .iter()
        .all(|i| i["sha256"].as_str().unwrap().len() == 64));
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    let cases: Vec<Vec<&str>> = vec![
        vec!["generate", "--out", p(&out)],
        vec!["generate", "--seed", "1", "--out", p(&out), "--bogus"],
        vec![
            "generate",
            "--seed",
            "1",
            "--out",
            p(&out),
            "--templates",
            "/no/such/dir",
        ],
        vec!["generate", "--seed", "1", "--out", p(&out), "--suite", "klingon-S_V"],
        vec!["generate", "--seed", "1", "--out", p(&out), "--jobs", "0"],
        vec![
            "score",
            "--suites",
            "/no/such/dir",
            "--scorer",
            "mock",
            "--out",
            p(&out),
        ],
        vec!["analyze", "--out", p(&out)],
        vec!["frobnicate"],
    ];
    for args in cases {
        let res = tse(&args);
        assert_eq!(code(&res), 2, "{args:?}: {}", stderr(&res));
    }
    assert!(!out.join("basque-DO-S_DO_V_AUX.jsonl").exists());
}

#[test]
fn structured_error_on_stderr() {
    let tmp = TempDir::new().unwrap();
    let res = tse(&["generate", "--out", p(tmp.path())]);
    assert_eq!(code(&res), 2);
    let e = error_json(&res);
    assert_eq!(e["kind"], "config");
    assert_eq!(e["exit_code"], 2);
    assert!(e["message"].as_str().unwrap().contains("--seed"));
    // The out dir already existed, so the failed run left a manifest.
    let m = read_manifest(tmp.path());
    assert_eq!(m["status"], "failed");
    assert_eq!(m["exit_code"], 2);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("from-file");
    let cfg = tmp.path().join("tse.json");
    let body = json!({"generate": {"seed": 9, "n": 12, "suites": [SUITES[0]], "out": out}});
    fs::write(&cfg, body.to_string()).unwrap();

    let res = tse(&["--config", p(&cfg), "generate", "-q"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let m = read_manifest(&out);
    assert_eq!(m["config"]["seed"], 9);
    assert_eq!(m["config"]["n"], 12);

    let res = tse(&["--config", p(&cfg), "generate", "-q", "--n", "7"]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let text = fs::read_to_string(out.join(format!("{}.jsonl", SUITES[0]))).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert_eq!(read_manifest(&out)["config"]["seed"], 9);

    fs::write(&cfg, r#"{"generate": {"sed": 1}}"#).unwrap();
    assert_eq!(code(&tse(&["--config", p(&cfg), "generate"])), 2);
    assert_eq!(
        code(&tse(&["--config", p(&tmp.path().join("none.json")), "generate"])),
        2
    );
}

#[test]
fn mock_score_then_analyze_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let suites = generate(tmp.path(), "42");
    let scores = tmp.path().join("scores");
    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "mock",
        "--out",
        p(&scores),
        "-q",
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    for s in SUITES {
        assert!(scores.join("mock").join(format!("{s}.scores.jsonl")).is_file());
        assert!(scores.join("mock").join(format!("{s}.scores.meta.json")).is_file());
    }
    assert_eq!(read_manifest(&scores)["status"], "ok");

    let mut runs = Vec::new();
    for name in ["r1", "r2"] {
        let out = tmp.path().join(name);
        let res = tse(&[
            "analyze",
            "--scores",
            p(&scores),
            "--suites",
            p(&suites),
            "--out",
            p(&out),
            "-q",
        ]);
        assert_eq!(code(&res), 0, "{}", stderr(&res));
        runs.push(files(&out));
        let m = read_manifest(&out);
        assert!(m["notes"]
            .as_array()
            .unwrap()
            .iter()
            .any(|n| n.as_str().unwrap().starts_with("slopes skipped")));
    }
    assert_eq!(runs[0], runs[1]);
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"matrix.csv") && names.contains(&"averages.csv"));
    let matrix = String::from_utf8(runs[0].iter().find(|(n, _)| n == "matrix.csv").unwrap().1.clone()).unwrap();
    assert!(matrix.contains("# seed: generate --seed 42"));

    // Asking for slopes explicitly with a single unregistered model is a data error.
    let out = tmp.path().join("r3");
    let res = tse(&[
        "analyze",
        "--scores",
        p(&scores),
        "--out",
        p(&out),
        "--report",
        "slopes",
    ]);
    assert_eq!(code(&res), 3, "{}", stderr(&res));
}

#[test]
fn import_round_trip_and_tampering() {
    let tmp = TempDir::new().unwrap();
    let suites = generate(tmp.path(), "5");
    let scored = tmp.path().join("scored");
    assert_eq!(
        code(&tse(&[
            "score",
            "--suites",
            p(&suites),
            "--scorer",
            "mock",
            "--out",
            p(&scored),
            "-q"
        ])),
        0
    );

    let imported = tmp.path().join("imported");
    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "import",
        "--from",
        p(&scored),
        "--model",
        "mock",
        "--out",
        p(&imported),
        "-q",
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    assert_eq!(files(&scored.join("mock")), files(&imported.join("mock")));

    // Import needs a model id.
    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "import",
        "--from",
        p(&scored),
        "--out",
        p(&imported),
    ]);
    assert_eq!(code(&res), 2);

    let file = scored.join("mock").join(format!("{}.scores.jsonl", SUITES[0]));
    let text = fs::read_to_string(&file).unwrap();
    fs::write(&file, text.replacen("\"pair_id\":0,", "\"pair_id\":9999,", 1)).unwrap();
    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "import",
        "--from",
        p(&scored),
        "--model",
        "mock",
        "--out",
        p(&tmp.path().join("x")),
    ]);
    assert_eq!(code(&res), 3, "{}", stderr(&res));
    let res = tse(&[
        "analyze",
        "--scores",
        p(&scored),
        "--suites",
        p(&suites),
        "--out",
        p(&tmp.path().join("y")),
    ]);
    assert_eq!(code(&res), 3, "{}", stderr(&res));

    fs::write(&file, "{not json\n").unwrap();
    let res = tse(&["analyze", "--scores", p(&scored), "--out", p(&tmp.path().join("z"))]);
    assert_eq!(code(&res), 3, "{}", stderr(&res));
    assert_eq!(error_json(&res)["kind"], "data");
}

struct Service {
    url: String,
    auth: Arc<Mutex<Vec<Option<String>>>>,
}

/// A stand-in scoring service; `fail(call)` turns a /score call into a 500.
fn service(fail: impl Fn(usize) -> bool + Send + 'static) -> Service {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}", server.server_addr().to_ip().unwrap());
    let auth = Arc::new(Mutex::new(Vec::new()));
    let seen = auth.clone();
    let calls = AtomicUsize::new(0);
    thread::spawn(move || {
        for mut req in server.incoming_requests() {
            let mut text = String::new();
            req.as_reader().read_to_string(&mut text).unwrap();
            seen.lock().unwrap().push(
                req.headers()
                    .iter()
                    .find(|h| h.field.equiv("Authorization"))
                    .map(|h| h.value.to_string()),
            );
            let (status, body) = if req.url() == "/health" {
                (200, json!({"status": "ok", "models_loaded": ["mock"]}))
            } else if fail(calls.fetch_add(1, Ordering::SeqCst)) {
                (500, json!({"error": "boom"}))
            } else {
                let body: Value = serde_json::from_str(&text).unwrap();
                let results: Vec<Value> = body["items"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|it| json!({"id": it["id"], "logp": -(it["target"].as_str().unwrap().chars().count() as f64)}))
                    .collect();
                (200, json!({ "results": results }))
            };
            let header = tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap();
            let _ = req.respond(
                tiny_http::Response::from_string(body.to_string())
                    .with_status_code(status)
                    .with_header(header),
            );
        }
    });
    Service { url, auth }
}

#[test]
fn remote_scoring_matches_local_mock() {
    let tmp = TempDir::new().unwrap();
    let suites = generate(tmp.path(), "11");
    let svc = service(|_| false);
    let remote = tmp.path().join("remote");
    let res = tse_env(
        &[
            "score",
            "--suites",
            p(&suites),
            "--scorer",
            "remote",
            "--endpoint",
            &svc.url,
            "--model",
            "mock",
            "--mode",
            "mock",
            "--batch-size",
            "16",
            "--out",
            p(&remote),
            "-q",
        ],
        &[("TSE_SCORER_TOKEN", "s3cret")],
    );
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let auth = svc.auth.lock().unwrap().clone();
    assert!(auth.len() > 1);
    assert!(auth.iter().all(|a| a.as_deref() == Some("Bearer s3cret")));

    let local = tmp.path().join("local");
    assert_eq!(
        code(&tse(&[
            "score",
            "--suites",
            p(&suites),
            "--scorer",
            "mock",
            "--out",
            p(&local),
            "-q"
        ])),
        0
    );
    for s in SUITES {
        let name = format!("{s}.scores.jsonl");
        assert_eq!(
            fs::read(remote.join("mock").join(&name)).unwrap(),
            fs::read(local.join("mock").join(&name)).unwrap()
        );
    }
}

#[test]
fn unreachable_service_exits_4() {
    let tmp = TempDir::new().unwrap();
    let suites = generate(tmp.path(), "3");
    // Bind and drop to find a port with nothing listening.
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let out = tmp.path().join("s");
    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "remote",
        "--endpoint",
        &format!("http://127.0.0.1:{port}"),
        "--model",
        "mock",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&res), 4, "{}", stderr(&res));
    assert_eq!(error_json(&res)["kind"], "transport");
}

#[test]
fn partial_failure_exits_5_with_summary() {
    let tmp = TempDir::new().unwrap();
    let suites = generate(tmp.path(), "4");
    // Calls 0-3 are the first batch and its three retries.
    let svc = service(|call| call < 4);
    let out = tmp.path().join("s");
    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "remote",
        "--endpoint",
        &svc.url,
        "--model",
        "mock",
        "--mode",
        "mock",
        "--batch-size",
        "10",
        "--jobs",
        "1",
        "--out",
        p(&out),
    ]);
    assert_eq!(code(&res), 5, "{}", stderr(&res));
    let e = error_json(&res);
    assert_eq!(e["kind"], "partial");
    let failures = e["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0]["suite"], SUITES[0]);
    // Each pair is two items, so one failed batch of ten loses five pairs.
    assert_eq!(failures[0]["failed"], 5);
    assert!(!out.join("mock").join(format!("{}.scores.jsonl", SUITES[0])).exists());
    assert!(out.join("mock").join(format!("{}.scores.jsonl", SUITES[1])).exists());
    let m = read_manifest(&out);
    assert_eq!(m["status"], "failed");
    assert_eq!(m["exit_code"], 5);
}

#[test]
fn ngram_scorer_runs_from_a_corpus() {
    let tmp = TempDir::new().unwrap();
    let suites = generate(tmp.path(), "8");
    let corpus = tmp.path().join("corpus.txt");
    let mut text = String::new();
    for s in SUITES {
        for line in fs::read_to_string(suites.join(format!("{s}.jsonl")))
            .unwrap()
            .lines()
            .take(20)
        {
            let v: Value = serde_json::from_str(line).unwrap();
            text.push_str(&format!(
                "{} {}\n",
                v["condition"].as_str().unwrap(),
                v["grammatical_target"].as_str().unwrap()
            ));
        }
    }
    fs::write(&corpus, text).unwrap();
    let out = tmp.path().join("s");
    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "ngram",
        "--corpus",
        p(&corpus),
        "--out",
        p(&out),
        "-q",
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    assert!(out
        .join("ngram-3")
        .join(format!("{}.scores.jsonl", SUITES[0]))
        .is_file());

    let res = tse(&[
        "score",
        "--suites",
        p(&suites),
        "--scorer",
        "ngram",
        "--out",
        p(&tmp.path().join("t")),
    ]);
    assert_eq!(code(&res), 2);
}

#[test]
fn validate_sample_separates_sheet_and_key() {
    let tmp = TempDir::new().unwrap();
    let suites = generate(tmp.path(), "6");
    let out = tmp.path().join("sample");
    let res = tse(&[
        "validate-sample",
        "--suites",
        p(&suites),
        "--per-suite",
        "4",
        "--seed",
        "1",
        "--out",
        p(&out),
        "-q",
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let sheet: Vec<Value> = fs::read_to_string(out.join("sample.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let key: Vec<Value> = fs::read_to_string(out.join("key.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(sheet.len(), 8);
    assert_eq!(key.len(), 8);
    for (s, k) in sheet.iter().zip(&key) {
        assert_eq!(s["item"], k["item"]);
        assert!(s.get("suite").is_none() && s.get("grammatical").is_none());
        assert!(matches!(k["grammatical"].as_str(), Some("A" | "B")), "{k}");
    }
    assert_eq!(read_manifest(&out)["status"], "ok");
}
