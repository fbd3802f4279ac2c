//! Staged pipeline from a MediaWiki API to project network reports.
//!
//! Stages run in order `ingest`, `parse`, `build`, `quality`, `metrics`,
//! `regress`, `report`; each reads the files of the previous ones from the
//! work directory, so any stage can be rerun alone. Raw API responses are kept
//! in a content-addressed cache and a rerun over a warm cache makes no
//! requests.

pub mod cache;
pub mod client;
pub mod config;
pub mod error;
pub mod fetch;
pub mod names;
pub mod report;
pub mod stages;
pub mod transport;

use std::time::Duration;

pub use client::{ApiClient, FetchError, FetchStats};
pub use config::PipelineConfig;
pub use error::{PipelineError, Stage};
pub use stages::{run_offline_stages, run_pipeline, Workdir};

/// Client wired to `config`, using `transport` for cache misses.
pub fn client_for(config: &PipelineConfig, transport: Box<dyn transport::Transport>) -> ApiClient {
    ApiClient::new(
        config.api_base_url.clone(),
        transport,
        cache::Cache::new(&config.cache_directory),
        Duration::from_secs_f64(config.request_interval),
        config.max_retries,
    )
    .with_extra_params(config.query.extra_params.clone())
}
