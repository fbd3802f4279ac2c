//! Cached, rate-limited MediaWiki API client.

use std::collections::BTreeSet;
use std::thread;
use std::time::{Duration, Instant};

use chrono::Utc;
use serde_json::Value;
use thiserror::Error;

use crate::cache::{canonical_request, Cache};
use crate::transport::{Transport, TransportError};

const MAX_BACKOFF: Duration = Duration::from_secs(300);

#[derive(Debug, Error)]
pub enum FetchError {
    #[error(
        "giving up on {request} after {attempts} attempts ({last}); \
         completed responses are cached, rerun to resume"
    )]
    Exhausted {
        request: String,
        attempts: u32,
        last: String,
    },
    #[error("API error {code}: {info}")]
    Api { code: String, info: String },
    #[error("continuation token repeated for {request}: {token}")]
    ContinuationLoop { request: String, token: String },
    #[error("malformed response for {request}: {reason}")]
    BadResponse { request: String, reason: String },
    #[error("cache write failed: {0}")]
    Cache(#[from] std::io::Error),
}

/// Keeps request start times at least `interval` apart.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    last: Option<Instant>,
}

impl RateLimiter {
    pub fn new(interval: Duration) -> Self {
        Self { interval, last: None }
    }

    pub fn wait(&mut self) {
        if let Some(last) = self.last {
            let ready = last + self.interval;
            let now = Instant::now();
            if ready > now {
                thread::sleep(ready - now);
            }
        }
        self.last = Some(Instant::now());
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FetchStats {
    pub cache_hits: u64,
    pub requests: u64,
    pub retries: u64,
}

pub struct ApiClient {
    base_url: String,
    transport: Box<dyn Transport>,
    cache: Cache,
    limiter: RateLimiter,
    interval: Duration,
    max_retries: u32,
    extra_params: Vec<(String, String)>,
    stats: FetchStats,
}

enum Attempt {
    Done(Value, Vec<u8>),
    Retry { wait: Option<Duration>, reason: String },
}

impl ApiClient {
    pub fn new(
        base_url: impl Into<String>,
        transport: Box<dyn Transport>,
        cache: Cache,
        interval: Duration,
        max_retries: u32,
    ) -> Self {
        Self {
            base_url: base_url.into(),
            transport,
            cache,
            limiter: RateLimiter::new(interval),
            interval,
            max_retries,
            extra_params: Vec::new(),
            stats: FetchStats::default(),
        }
    }

    pub fn with_extra_params(mut self, extra: impl IntoIterator<Item = (String, String)>) -> Self {
        self.extra_params = extra.into_iter().collect();
        self
    }

    pub fn stats(&self) -> FetchStats {
        self.stats
    }

    fn full_params(&self, params: &[(&str, &str)]) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![
            ("action".into(), "query".into()),
            ("format".into(), "json".into()),
            ("formatversion".into(), "2".into()),
        ];
        for (k, v) in params.iter().map(|(k, v)| (k.to_string(), v.to_string())).chain(self.extra_params.clone()) {
            out.retain(|(existing, _)| *existing != k);
            out.push((k, v));
        }
        out
    }

    fn backoff(&self, attempt: u32) -> Duration {
        self.interval
            .checked_mul(2u32.saturating_pow(attempt + 1))
            .unwrap_or(MAX_BACKOFF)
            .min(MAX_BACKOFF)
    }

    /// One API query, served from the cache when possible.
    pub fn query(&mut self, params: &[(&str, &str)]) -> Result<Value, FetchError> {
        let params = self.full_params(params);
        let key = canonical_request(&self.base_url, &params);
        if let Some(entry) = self.cache.get(&key) {
            self.stats.cache_hits += 1;
            return serde_json::from_slice(&entry.payload).map_err(|e| FetchError::BadResponse {
                request: key.clone(),
                reason: format!("cached payload: {e}"),
            });
        }
        let mut last = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                self.stats.retries += 1;
            }
            self.limiter.wait();
            self.stats.requests += 1;
            match self.attempt(&key, &params)? {
                Attempt::Done(value, bytes) => {
                    self.cache.put(&key, &bytes, Utc::now())?;
                    return Ok(value);
                }
                Attempt::Retry { wait, reason } => {
                    log::warn!("{reason}; attempt {} of {}", attempt + 1, self.max_retries + 1);
                    last = reason;
                    if attempt < self.max_retries {
                        let delay = wait.unwrap_or_default().max(self.backoff(attempt));
                        thread::sleep(delay.min(MAX_BACKOFF));
                    }
                }
            }
        }
        Err(FetchError::Exhausted {
            request: key,
            attempts: self.max_retries + 1,
            last,
        })
    }

    fn attempt(&self, key: &str, params: &[(String, String)]) -> Result<Attempt, FetchError> {
        let response = match self.transport.get(&self.base_url, params) {
            Ok(r) => r,
            Err(TransportError::Offline(_)) => {
                return Err(FetchError::Exhausted {
                    request: key.to_string(),
                    attempts: 0,
                    last: "offline and not cached".into(),
                })
            }
            Err(e) => {
                return Ok(Attempt::Retry {
                    wait: None,
                    reason: e.to_string(),
                })
            }
        };
        let wait = response.retry_after.map(Duration::from_secs);
        if response.status == 429 || response.status >= 500 {
            return Ok(Attempt::Retry {
                wait,
                reason: format!("HTTP {}", response.status),
            });
        }
        if response.status != 200 {
            return Err(FetchError::BadResponse {
                request: key.to_string(),
                reason: format!("HTTP {}", response.status),
            });
        }
        let value: Value = serde_json::from_slice(&response.body).map_err(|e| FetchError::BadResponse {
            request: key.to_string(),
            reason: e.to_string(),
        })?;
        if let Some(error) = value.get("error") {
            let code = error.get("code").and_then(Value::as_str).unwrap_or("unknown").to_string();
            let info = error.get("info").and_then(Value::as_str).unwrap_or("").to_string();
            if code == "maxlag" || code == "ratelimited" {
                return Ok(Attempt::Retry {
                    wait,
                    reason: format!("server asked to slow down ({code})"),
                });
            }
            return Err(FetchError::Api { code, info });
        }
        Ok(Attempt::Done(value, response.body))
    }

    /// Follows `continue` blocks until the server stops sending them.
    pub fn query_all(&mut self, params: &[(&str, &str)]) -> Result<Vec<Value>, FetchError> {
        let mut pages = Vec::new();
        let mut seen = BTreeSet::new();
        let mut cont: Vec<(String, String)> = Vec::new();
        loop {
            let mut merged: Vec<(&str, &str)> = params.to_vec();
            merged.extend(cont.iter().map(|(k, v)| (k.as_str(), v.as_str())));
            let page = self.query(&merged)?;
            let next = match page.get("continue").and_then(Value::as_object) {
                Some(obj) => obj
                    .iter()
                    .map(|(k, v)| {
                        let v = match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        };
                        (k.clone(), v)
                    })
                    .collect::<Vec<_>>(),
                None => Vec::new(),
            };
            pages.push(page);
            if next.is_empty() {
                return Ok(pages);
            }
            let token = next.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join("&");
            if !seen.insert(token.clone()) {
                return Err(FetchError::ContinuationLoop {
                    request: canonical_request(&self.base_url, &self.full_params(params)),
                    token,
                });
            }
            cont = next;
        }
    }
}
