//! The HTTP boundary. Everything above this trait is testable offline.

use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    /// Seconds from a `Retry-After` header, when present.
    pub retry_after: Option<u64>,
    pub body: Vec<u8>,
}

impl Response {
    pub fn ok(body: impl Into<Vec<u8>>) -> Self {
        Self {
            status: 200,
            retry_after: None,
            body: body.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("offline mode: refusing to fetch {0}")]
    Offline(String),
    #[error("request failed: {0}")]
    Io(String),
}

pub trait Transport: Send + Sync {
    fn get(&self, url: &str, params: &[(String, String)]) -> Result<Response, TransportError>;
}

/// Fails every request; used with `--offline` so only cached data is read.
#[derive(Debug, Default, Clone, Copy)]
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn get(&self, url: &str, _params: &[(String, String)]) -> Result<Response, TransportError> {
        Err(TransportError::Offline(url.to_string()))
    }
}

const MAX_BODY: u64 = 256 * 1024 * 1024;

pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(user_agent: &str) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .user_agent(user_agent)
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        Self { agent }
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str, params: &[(String, String)]) -> Result<Response, TransportError> {
        let mut request = self.agent.get(url);
        for (k, v) in params {
            request = request.query(k, v);
        }
        let mut response = request.call().map_err(|e| TransportError::Io(e.to_string()))?;
        let status = response.status().as_u16();
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse().ok());
        let body = response
            .body_mut()
            .with_config()
            .limit(MAX_BODY)
            .read_to_vec()
            .map_err(|e| TransportError::Io(e.to_string()))?;
        Ok(Response {
            status,
            retry_after,
            body,
        })
    }
}
