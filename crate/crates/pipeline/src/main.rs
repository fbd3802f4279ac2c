use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use talknet::config::ConfigError;
use talknet::error::EXIT_OK;
use talknet::stages;
use talknet::transport::{HttpTransport, OfflineTransport, Transport};
use talknet::{client_for, PipelineConfig, PipelineError, Stage, Workdir};

const DEFAULT_CONFIG: &str = "talknet.toml";

#[derive(Parser)]
#[command(name = "talknet", version, about = "Editor communication networks and project quality")]
struct Cli {
    /// TOML configuration; `talknet.toml` is used when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Response cache directory (overrides the config).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Work directory for stage outputs (overrides the config).
    #[arg(long, global = true)]
    workdir: Option<PathBuf>,
    /// Serve every request from the cache and fail on a miss.
    #[arg(long, global = true)]
    offline: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Fetch project pages, talk pages and assessments.
    Ingest,
    /// Extract members and posts.
    Parse,
    /// Build per-project networks.
    Build,
    /// Compute quality scores.
    Quality,
    /// Compute structure metrics and apply project filters.
    Metrics,
    /// Fit the regression models.
    Regress,
    /// Write the report tables.
    Report,
    /// Run every stage.
    Run,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, ConfigError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None if PathBuf::from(DEFAULT_CONFIG).exists() => PipelineConfig::load(DEFAULT_CONFIG.as_ref())?,
        None => {
            let mut c = PipelineConfig::default();
            c.apply_env();
            c.validate()?;
            c
        }
    };
    if let Some(cache) = &cli.cache {
        config.cache_directory = cache.clone();
    }
    if let Some(work) = &cli.workdir {
        config.work_directory = work.clone();
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(), PipelineError> {
    let config = load_config(cli).map_err(|e| PipelineError::new(Stage::Config, e))?;
    let work = Workdir::new(&config.work_directory);
    let transport = || -> Box<dyn Transport> {
        if cli.offline {
            Box::new(OfflineTransport)
        } else {
            Box::new(HttpTransport::new(&config.user_agent))
        }
    };
    match cli.command {
        Command::Ingest => stages::ingest(&config, &work, &mut client_for(&config, transport())),
        Command::Parse => stages::parse(&config, &work),
        Command::Build => stages::build(&config, &work),
        Command::Quality => stages::quality(&config, &work),
        Command::Metrics => stages::metrics(&config, &work),
        Command::Regress => stages::regress(&config, &work),
        Command::Report => stages::report(&config, &work),
        Command::Run => stages::run_pipeline(&config, &work, &mut client_for(&config, transport())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
