//! HTTP client for a scoring service.
//!
//! `POST /score` takes `{"model_id", "mode", "items": [{"id", "condition",
//! "target"}]}` and answers `{"results": [{"id", "logp"}]}`; `GET /health`
//! answers `{"status", "models_loaded"}`. Requests are all-or-nothing, so a
//! retried batch can never be half-counted.

use std::collections::HashMap;
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Mode, ScoreError, ScoreItem, Scorer, ScorerInfo, DEFAULT_BATCH};

/// Environment variable holding a bearer token for the service.
pub const TOKEN_ENV: &str = "TSE_SCORER_TOKEN";

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model_id: String,
    pub mode: Mode,
    pub token: Option<String>,
    pub batch_size: usize,
    pub max_retries: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model_id: impl Into<String>, mode: Mode) -> Self {
        Self {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            model_id: model_id.into(),
            mode,
            token: std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()),
            batch_size: DEFAULT_BATCH,
            max_retries: 3,
            backoff: Duration::from_millis(200),
            timeout: Duration::from_secs(120),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    #[serde(default)]
    pub models_loaded: Vec<String>,
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    model_id: &'a str,
    mode: Mode,
    items: &'a [ScoreItem],
}

#[derive(Deserialize)]
struct ScoreResult {
    id: String,
    logp: f64,
}

#[derive(Deserialize)]
struct ScoreResponse {
    results: Vec<ScoreResult>,
    #[serde(default)]
    model_descriptor: Option<String>,
}

pub struct RemoteScorer {
    config: RemoteConfig,
    agent: ureq::Agent,
    model_descriptor: Mutex<Option<String>>,
}

enum Attempt<T> {
    Done(T),
    Retry(ScoreError),
    Fail(ScoreError),
}

impl RemoteScorer {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        Self {
            config,
            agent,
            model_descriptor: Mutex::new(None),
        }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.config.endpoint)
    }

    fn authorize(&self, req: ureq::Request) -> ureq::Request {
        match &self.config.token {
            Some(t) => req.set("Authorization", &format!("Bearer {t}")),
            None => req,
        }
    }

    /// Runs `call` until it succeeds, fails permanently, or retries run out.
    fn with_retries<T>(&self, mut call: impl FnMut() -> Attempt<T>) -> Result<T, ScoreError> {
        let mut delay = self.config.backoff;
        for attempt in 0..=self.config.max_retries {
            match call() {
                Attempt::Done(v) => return Ok(v),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e) if attempt == self.config.max_retries => return Err(e),
                Attempt::Retry(_) => {
                    thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
        unreachable!("loop returns on the last attempt")
    }

    fn classify(err: ureq::Error) -> Attempt<ureq::Response> {
        match err {
            ureq::Error::Status(code, resp) => {
                let body = resp.into_string().unwrap_or_default();
                let e = ScoreError::Protocol(format!("HTTP {code}: {}", body.trim()));
                if code == 429 || code >= 500 {
                    Attempt::Retry(e)
                } else {
                    Attempt::Fail(e)
                }
            }
            ureq::Error::Transport(t) => Attempt::Retry(ScoreError::Transport(t.to_string())),
        }
    }

    pub fn health(&self) -> Result<Health, ScoreError> {
        let resp = self.with_retries(|| match self.authorize(self.agent.get(&self.url("/health"))).call() {
            Ok(r) => Attempt::Done(r),
            Err(e) => Self::classify(e),
        })?;
        resp.into_json()
            .map_err(|e| ScoreError::Protocol(format!("bad /health body: {e}")))
    }
}

impl Scorer for RemoteScorer {
    fn info(&self) -> ScorerInfo {
        let served = self.model_descriptor.lock().expect("not poisoned").clone();
        let mut descriptor = format!(
            "remote endpoint={} model={} mode={} join=single-space",
            self.config.endpoint, self.config.model_id, self.config.mode
        );
        if let Some(s) = served {
            descriptor.push_str(&format!(" served={s}"));
        }
        ScorerInfo {
            model_id: self.config.model_id.clone(),
            descriptor,
            single_threaded: false,
            batch_size: self.config.batch_size,
        }
    }

    fn score(&self, condition: &str, target: &str) -> Result<f64, ScoreError> {
        let item = ScoreItem {
            id: "0".into(),
            condition: condition.into(),
            target: target.into(),
        };
        Ok(self.score_batch(std::slice::from_ref(&item))?[0])
    }

    fn score_batch(&self, items: &[ScoreItem]) -> Result<Vec<f64>, ScoreError> {
        let body = ScoreRequest {
            model_id: &self.config.model_id,
            mode: self.config.mode,
            items,
        };
        let resp =
            self.with_retries(
                || match self.authorize(self.agent.post(&self.url("/score"))).send_json(&body) {
                    Ok(r) => Attempt::Done(r),
                    Err(e) => Self::classify(e),
                },
            )?;
        let resp: ScoreResponse = resp
            .into_json()
            .map_err(|e| ScoreError::Protocol(format!("bad /score body: {e}")))?;
        if let Some(d) = resp.model_descriptor {
            *self.model_descriptor.lock().expect("not poisoned") = Some(d);
        }

        // Every requested id answered exactly once, nothing extra.
        let mut by_id: HashMap<&str, f64> = HashMap::with_capacity(resp.results.len());
        for r in &resp.results {
            if by_id.insert(&r.id, r.logp).is_some() {
                return Err(ScoreError::Protocol(format!("duplicate result id `{}`", r.id)));
            }
        }
        if by_id.len() != items.len() {
            return Err(ScoreError::Protocol(format!(
                "{} results for {} items",
                by_id.len(),
                items.len()
            )));
        }
        items
            .iter()
            .map(|i| {
                by_id
                    .get(i.id.as_str())
                    .copied()
                    .ok_or_else(|| ScoreError::Protocol(format!("no result for id `{}`", i.id)))
            })
            .collect()
    }
}
