//! Pipeline configuration, read from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use talknet_core::network::EdgeScope;
use talknet_core::quality::DEFAULT_EXPONENT;
use talknet_core::wikitext::MassMessageFilter;
use thiserror::Error;

/// Environment variable that replaces `api_base_url` when set.
pub const API_URL_ENV: &str = "TALKNET_API_URL";

pub const DEFAULT_API_URL: &str = "https://en.wikipedia.org/w/api.php";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Edge rule in configuration form.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeScopeSetting {
    #[default]
    MembersOnly,
    AnyMemberEndpoint,
}

impl From<EdgeScopeSetting> for EdgeScope {
    fn from(s: EdgeScopeSetting) -> Self {
        match s {
            EdgeScopeSetting::MembersOnly => EdgeScope::MembersOnly,
            EdgeScopeSetting::AnyMemberEndpoint => EdgeScope::AnyMemberEndpoint,
        }
    }
}

/// Request shapes sent to the API. Every field has a default matching the
/// public English Wikipedia endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryConfig {
    /// Titles per CirrusDoc request.
    pub batch_size: usize,
    /// `gaplimit` / `aplimit` for AllPages traversals.
    pub page_limit: String,
    /// Prefix of project pages in the project namespace.
    pub project_prefix: String,
    /// Project namespace id.
    pub project_namespace: u32,
    /// Added to every request, e.g. `maxlag`.
    pub extra_params: BTreeMap<String, String>,
}

impl Default for QueryConfig {
    fn default() -> Self {
        Self {
            batch_size: 20,
            page_limit: "max".into(),
            project_prefix: "WikiProject ".into(),
            project_namespace: 4,
            extra_params: BTreeMap::from([("maxlag".to_string(), "5".to_string())]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub api_base_url: String,
    pub user_agent: String,
    /// Minimum spacing between outbound requests, in seconds.
    pub request_interval: f64,
    pub max_retries: u32,
    pub cache_directory: PathBuf,
    pub work_directory: PathBuf,
    /// Projects to process; empty means every project found under the prefix.
    pub projects: Vec<String>,
    /// Raw project name to canonical name.
    pub aliases: BTreeMap<String, String>,
    pub p: f64,
    pub min_active_nodes: usize,
    pub edge_scope: EdgeScopeSetting,
    pub mass_message: MassMessageFilter,
    /// Recorded in report metadata.
    pub snapshot_date: Option<String>,
    pub query: QueryConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            api_base_url: DEFAULT_API_URL.into(),
            user_agent: concat!("talknet/", env!("CARGO_PKG_VERSION")).into(),
            request_interval: 1.0,
            max_retries: 5,
            cache_directory: "cache".into(),
            work_directory: "work".into(),
            projects: Vec::new(),
            aliases: BTreeMap::new(),
            p: DEFAULT_EXPONENT,
            min_active_nodes: 5,
            edge_scope: EdgeScopeSetting::default(),
            mass_message: MassMessageFilter::default(),
            snapshot_date: None,
            query: QueryConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads `path`, resolving relative directories against the file's folder
    /// and applying the environment override.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.cache_directory = base.join(&config.cache_directory);
        config.work_directory = base.join(&config.work_directory);
        config.apply_env();
        Ok(config)
    }

    pub fn apply_env(&mut self) {
        if let Ok(url) = std::env::var(API_URL_ENV) {
            if !url.trim().is_empty() {
                self.api_base_url = url;
            }
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.request_interval.is_finite() && self.request_interval > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "request_interval must be positive, got {}",
                self.request_interval
            )));
        }
        if self.min_active_nodes < 2 {
            return Err(ConfigError::Invalid(format!(
                "min_active_nodes must be at least 2, got {}",
                self.min_active_nodes
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ConfigError::Invalid(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if self.query.batch_size == 0 {
            return Err(ConfigError::Invalid("query.batch_size must be positive".into()));
        }
        if self.api_base_url.trim().is_empty() {
            return Err(ConfigError::Invalid("api_base_url is empty".into()));
        }
        Ok(())
    }
}
