//! The HTTP scorer client against an in-process stand-in for the service.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};
use tse_core::generator::{MinimalPair, TestSuite};
use tse_core::scoring::{score_suite, Mode, RemoteConfig, RemoteScorer, ScoreError, ScoreItem, Scorer, ScoringError};
use tse_core::Language;

struct Seen {
    method: String,
    path: String,
    auth: Option<String>,
    body: Value,
}

type Handler = dyn Fn(usize, &Seen) -> (u16, String) + Send + Sync;

struct Server {
    url: String,
    calls: Arc<AtomicUsize>,
    seen: Arc<Mutex<Vec<Seen>>>,
}

/// Serves every request with `handler(call_index, request)`.
fn serve(handler: Box<Handler>) -> Server {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}", server.server_addr().to_ip().unwrap());
    let calls = Arc::new(AtomicUsize::new(0));
    let seen = Arc::new(Mutex::new(Vec::new()));
    let (c, s) = (calls.clone(), seen.clone());
    thread::spawn(move || {
        for mut req in server.incoming_requests() {
            let mut text = String::new();
            req.as_reader().read_to_string(&mut text).unwrap();
            let auth = req
                .headers()
                .iter()
                .find(|h| h.field.equiv("Authorization"))
                .map(|h| h.value.to_string());
            let seen = Seen {
                method: req.method().to_string(),
                path: req.url().to_string(),
                auth,
                body: serde_json::from_str(&text).unwrap_or(Value::Null),
            };
            let i = c.fetch_add(1, Ordering::SeqCst);
            let (code, body) = handler(i, &seen);
            s.lock().unwrap().push(seen);
            let header = tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap();
            let _ = req.respond(
                tiny_http::Response::from_string(body)
                    .with_status_code(code)
                    .with_header(header),
            );
        }
    });
    Server { url, calls, seen }
}

/// What the real service does in mock mode.
fn mock_answer(body: &Value) -> Value {
    let results: Vec<Value> = body["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|it| json!({"id": it["id"], "logp": -(it["target"].as_str().unwrap().chars().count() as f64)}))
        .collect();
    json!({ "results": results })
}

fn config(url: &str) -> RemoteConfig {
    let mut c = RemoteConfig::new(url, "mock", Mode::Mock);
    c.token = None;
    c.backoff = Duration::from_millis(5);
    c.timeout = Duration::from_secs(10);
    c
}

fn items(n: usize) -> Vec<ScoreItem> {
    (0..n)
        .map(|i| ScoreItem {
            id: format!("{i}/g"),
            condition: "Saltzaileak tomateak prestatu".into(),
            target: "x".repeat(i + 1),
        })
        .collect()
}

fn suite(n: u32) -> TestSuite {
    TestSuite {
        name: "basque-S-S_V_AUX".into(),
        language: Language::Basque,
        template_id: "basque-S-S_V_AUX".into(),
        seed: 1,
        validated: true,
        pairs: (0..n)
            .map(|id| MinimalPair {
                id,
                condition: format!("Ume {id}"),
                grammatical_target: "zen.".into(),
                ungrammatical_target: "ziren.".into(),
                metadata: BTreeMap::new(),
            })
            .collect(),
    }
}

#[test]
fn health_reports_loaded_models() {
    let s = serve(Box::new(|_, req| {
        assert_eq!((req.method.as_str(), req.path.as_str()), ("GET", "/health"));
        (
            200,
            json!({"status": "ok", "models_loaded": ["mock", "xglm-564m"]}).to_string(),
        )
    }));
    let h = RemoteScorer::new(config(&s.url)).health().unwrap();
    assert_eq!(h.status, "ok");
    assert_eq!(h.models_loaded, ["mock", "xglm-564m"]);
}

#[test]
fn batch_follows_request_order_and_sends_token() {
    let s = serve(Box::new(|_, req| {
        let mut answer = mock_answer(&req.body);
        // Answer in reverse: the client must match by id, not position.
        answer["results"].as_array_mut().unwrap().reverse();
        (200, answer.to_string())
    }));
    let mut cfg = config(&s.url);
    cfg.token = Some("s3cret".into());
    let scorer = RemoteScorer::new(cfg);
    let got = scorer.score_batch(&items(5)).unwrap();
    assert_eq!(got, [-1.0, -2.0, -3.0, -4.0, -5.0]);
    let seen = s.seen.lock().unwrap();
    assert_eq!(seen[0].path, "/score");
    assert_eq!(seen[0].auth.as_deref(), Some("Bearer s3cret"));
    assert_eq!(seen[0].body["model_id"], "mock");
    assert_eq!(seen[0].body["mode"], "mock");
    assert_eq!(seen[0].body["items"][4]["id"], "4/g");
}

#[test]
fn suites_score_through_the_service() {
    let s = serve(Box::new(|_, req| {
        let mut answer = mock_answer(&req.body);
        answer["model_descriptor"] = json!("mock@rev0");
        (200, answer.to_string())
    }));
    let mut cfg = config(&s.url);
    cfg.batch_size = 8;
    let scorer = RemoteScorer::new(cfg);
    let scores = score_suite(&scorer, &suite(50), 4).unwrap();
    assert_eq!(scores.n(), 50);
    assert_eq!(scores.k_correct(), 50);
    assert!(
        scores.scorer_descriptor.ends_with(" served=mock@rev0"),
        "{}",
        scores.scorer_descriptor
    );
    // 50 pairs at 4 pairs per request.
    assert_eq!(s.calls.load(Ordering::SeqCst), 13);
    let ids: Vec<String> = s
        .seen
        .lock()
        .unwrap()
        .iter()
        .flat_map(|r| {
            r.body["items"]
                .as_array()
                .unwrap()
                .iter()
                .map(|i| i["id"].as_str().unwrap().to_string())
                .collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(ids.len(), 100);
    assert!(ids.contains(&"49/u".to_string()));
}

#[test]
fn retries_overload_and_server_errors() {
    let s = serve(Box::new(|i, req| match i {
        0 => (503, "{}".into()),
        1 => (429, "{}".into()),
        _ => (200, mock_answer(&req.body).to_string()),
    }));
    let got = RemoteScorer::new(config(&s.url)).score_batch(&items(2)).unwrap();
    assert_eq!(got, [-1.0, -2.0]);
    assert_eq!(s.calls.load(Ordering::SeqCst), 3);
}

#[test]
fn gives_up_after_the_retry_budget() {
    let s = serve(Box::new(|_, _| (500, "boom".into())));
    let err = RemoteScorer::new(config(&s.url)).score_batch(&items(1)).unwrap_err();
    assert!(
        matches!(&err, ScoreError::Protocol(m) if m.contains("500") && m.contains("boom")),
        "{err}"
    );
    assert_eq!(s.calls.load(Ordering::SeqCst), 4, "one try plus three retries");
}

#[test]
fn client_errors_are_not_retried() {
    let s = serve(Box::new(|_, _| (400, "unknown model".into())));
    let err = RemoteScorer::new(config(&s.url)).score_batch(&items(1)).unwrap_err();
    assert!(matches!(err, ScoreError::Protocol(_)));
    assert_eq!(s.calls.load(Ordering::SeqCst), 1);
}

#[test]
fn unreachable_service_is_a_transport_error() {
    // Bind, then drop, to find a port nobody listens on.
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let err = RemoteScorer::new(config(&format!("http://127.0.0.1:{port}")))
        .score_batch(&items(1))
        .unwrap_err();
    assert!(matches!(err, ScoreError::Transport(_)), "{err}");
    assert!(err.is_transport());
}

#[test]
fn responses_must_match_ids_one_to_one() {
    type Tamper = Box<dyn Fn(Value) -> Value + Send + Sync>;
    let cases: Vec<(&str, Tamper)> = vec![
        (
            "missing",
            Box::new(|mut a| {
                a["results"].as_array_mut().unwrap().pop();
                a
            }),
        ),
        (
            "duplicate",
            Box::new(|mut a| {
                let r = a["results"].as_array_mut().unwrap();
                r[1] = r[0].clone();
                a
            }),
        ),
        (
            "foreign",
            Box::new(|mut a| {
                a["results"][0]["id"] = json!("99/g");
                a
            }),
        ),
        (
            "extra",
            Box::new(|mut a| {
                a["results"]
                    .as_array_mut()
                    .unwrap()
                    .push(json!({"id": "7/u", "logp": -1.0}));
                a
            }),
        ),
    ];
    for (name, tamper) in cases {
        let s = serve(Box::new(move |_, req| {
            (200, tamper(mock_answer(&req.body)).to_string())
        }));
        let err = RemoteScorer::new(config(&s.url)).score_batch(&items(3)).unwrap_err();
        assert!(matches!(err, ScoreError::Protocol(_)), "{name}: {err}");
    }
}

#[test]
fn malformed_bodies_fail_the_batch() {
    let s = serve(Box::new(|_, _| (200, "{\"results\": [{\"id\": \"0/g\"}]}".into())));
    let err = RemoteScorer::new(config(&s.url)).score_batch(&items(1)).unwrap_err();
    assert!(matches!(err, ScoreError::Protocol(_)));
}

#[test]
fn failed_batches_become_partial_results() {
    // Every second request fails permanently.
    let s = serve(Box::new(|i, req| {
        if i % 2 == 1 {
            (422, "bad item".into())
        } else {
            (200, mock_answer(&req.body).to_string())
        }
    }));
    let mut cfg = config(&s.url);
    cfg.batch_size = 4;
    let scorer = RemoteScorer::new(cfg);
    match score_suite(&scorer, &suite(8), 1) {
        Err(ScoringError::Partial {
            failed,
            completed,
            total,
            ..
        }) => {
            assert_eq!(total, 8);
            assert_eq!(failed, [2, 3, 6, 7]);
            assert_eq!(
                completed.scored.iter().map(|p| p.pair_id).collect::<Vec<_>>(),
                [0, 1, 4, 5]
            );
        }
        other => panic!("expected partial failure, got {other:?}"),
    }
}
