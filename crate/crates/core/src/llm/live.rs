use super::backend::{BackendError, ScoreBackend};
use parking_lot::{Condvar, Mutex};
use serde::{Deserialize, Serialize};
use std::time::Duration;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiveConfig {
    /// URL that accepts `POST {"model", "prefix", "suffix"}` and answers
    /// `{"log_likelihood": <f64>}`.
    pub endpoint: String,
    pub model_id: String,
    /// Name of the environment variable holding a bearer token, if any.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Upper bound on requests in flight at once.
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
}

fn default_timeout_ms() -> u64 {
    30_000
}

fn default_max_in_flight() -> usize {
    8
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    model: &'a str,
    prefix: &'a str,
    suffix: &'a str,
}

#[derive(Deserialize)]
struct ScoreResponse {
    log_likelihood: f64,
}

/// Counting semaphore; `reqwest` blocking calls hold a permit while running.
struct Permits {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Permits {
    fn acquire(&self) -> PermitGuard<'_> {
        let mut free = self.free.lock();
        while *free == 0 {
            self.cv.wait(&mut free);
        }
        *free -= 1;
        PermitGuard(self)
    }
}

struct PermitGuard<'a>(&'a Permits);

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock() += 1;
        self.0.cv.notify_one();
    }
}

/// Client for a remote scoring service.
pub struct LiveBackend {
    client: reqwest::blocking::Client,
    config: LiveConfig,
    token: Option<String>,
    permits: Permits,
}

impl LiveBackend {
    /// Reads the token from the environment now, so a missing variable fails
    /// before any scoring starts.
    pub fn new(config: LiveConfig) -> Result<Self, BackendError> {
        let token = match &config.token_env {
            Some(var) => Some(
                std::env::var(var)
                    .map_err(|_| BackendError::fatal(format!("environment variable {var} is not set")))?,
            ),
            None => None,
        };
        if config.max_in_flight == 0 {
            return Err(BackendError::fatal("max_in_flight must be at least 1"));
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build()
            .map_err(|e| BackendError::fatal(e.to_string()))?;
        Ok(LiveBackend {
            client,
            token,
            permits: Permits {
                free: Mutex::new(config.max_in_flight),
                cv: Condvar::new(),
            },
            config,
        })
    }
}

impl ScoreBackend for LiveBackend {
    fn model_id(&self) -> &str {
        &self.config.model_id
    }

    fn log_likelihood(&self, prefix: &str, suffix: &str) -> Result<f64, BackendError> {
        let _permit = self.permits.acquire();
        let mut req = self.client.post(&self.config.endpoint).json(&ScoreRequest {
            model: &self.config.model_id,
            prefix,
            suffix,
        });
        if let Some(t) = &self.token {
            req = req.bearer_auth(t);
        }
        let resp = req.send().map_err(|e| BackendError {
            message: e.to_string(),
            retriable: e.is_timeout() || e.is_connect() || e.is_request(),
        })?;
        let status = resp.status();
        if !status.is_success() {
            let retriable = status.is_server_error() || status.as_u16() == 429;
            return Err(BackendError {
                message: format!("scoring service returned {status}"),
                retriable,
            });
        }
        let body: ScoreResponse = resp
            .json()
            .map_err(|e| BackendError::fatal(format!("bad response body: {e}")))?;
        if !body.log_likelihood.is_finite() {
            return Err(BackendError::fatal("non-finite log-likelihood"));
        }
        Ok(body.log_likelihood)
    }
}
