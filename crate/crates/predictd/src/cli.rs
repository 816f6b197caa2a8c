use std::collections::BTreeMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use predict_core::combine::{CombinerConfig, Models, Pipeline};
use predict_core::corpus::{default_stopwords, load_stopwords, tokenize, Token, TokenPolicy};
use predict_core::eval::{evaluate_all, Comparison};
use predict_core::ngram::{export_arpa, import_arpa, train, Smoothing, TrainOptions};
use predict_core::semantic::{load_space, save_space, train_space, LsaOptions, SvdOptions};
use serde::Deserialize;

use crate::service::{router, spawn_evictor, AppState};

#[derive(Debug, Parser)]
#[command(name = "predictd", version, about = "Word prediction: training, evaluation and serving")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train an n-gram model and write it in ARPA format.
    TrainNgram(TrainNgramArgs),
    /// Build a semantic space from co-occurrence counts.
    TrainLsa(TrainLsaArgs),
    /// Keystroke saving rate and perplexity of one configuration.
    Evaluate(EvaluateArgs),
    /// Every configuration side by side, with the ksr/perplexity correlation.
    EvaluateAll(EvaluateAllArgs),
    /// Run the HTTP prediction service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TrainNgramArgs {
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// `mkn` (modified Kneser-Ney) or `wb` (Witten-Bell).
    #[arg(long, default_value = "mkn")]
    pub smoothing: Smoothing,
    #[arg(long, default_value_t = 141_000)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    /// Minimum count per order, e.g. `1,1,2,2`.
    #[arg(long, value_delimiter = ',')]
    pub prune: Option<Vec<u64>>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainLsaArgs {
    #[arg(long, default_value_t = 150)]
    pub dims: usize,
    #[arg(long, default_value_t = 100)]
    pub window: usize,
    #[arg(long, default_value_t = 3000)]
    pub columns: usize,
    #[arg(long, default_value_t = 80_000)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    /// Stopword file, one word per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Built-in stopword list used when no file is given (`en` or `fr`).
    #[arg(long, default_value = "en")]
    pub lang: String,
    #[arg(long, default_value_t = 100)]
    pub density_m: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; a `.bin` extension selects the binary format.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub lm: PathBuf,
    #[arg(long)]
    pub space: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Config file, or the name of a shipped preset.
    #[arg(long)]
    pub config: String,
    #[command(flatten)]
    pub models: ModelArgs,
    /// Overrides the list size of the configuration.
    #[arg(long)]
    pub list_size: Option<usize>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(required = true)]
    pub test: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateAllArgs {
    /// Directory of config files; the shipped presets when omitted.
    #[arg(long)]
    pub configs: Option<PathBuf>,
    #[command(flatten)]
    pub models: ModelArgs,
    #[arg(long, default_value_t = 5)]
    pub list_size: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(required = true)]
    pub test: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// JSON file with `lm`, `space`, `configs`, `port`, `idle_timeout_secs`;
    /// command-line flags take precedence.
    #[arg(long)]
    pub server_config: Option<PathBuf>,
    #[arg(long)]
    pub lm: Option<PathBuf>,
    #[arg(long)]
    pub space: Option<PathBuf>,
    #[arg(long)]
    pub configs: Option<PathBuf>,
    #[arg(long, env = "PREDICTD_PORT")]
    pub port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long)]
    pub idle_timeout_secs: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerConfig {
    #[serde(default)]
    pub v: Option<u32>,
    pub lm: Option<PathBuf>,
    pub space: Option<PathBuf>,
    pub configs: Option<PathBuf>,
    pub port: Option<u16>,
    pub idle_timeout_secs: Option<u64>,
}

pub fn read_tokens(paths: &[PathBuf]) -> anyhow::Result<Vec<Token>> {
    let policy = TokenPolicy::default();
    let mut tokens = Vec::new();
    for p in paths {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        tokens.extend(tokenize(&text, &policy));
    }
    Ok(tokens)
}

fn read_texts(paths: &[PathBuf]) -> anyhow::Result<Vec<(String, String)>> {
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok((p.display().to_string(), text))
        })
        .collect()
}

pub fn load_models(lm: &Path, space: Option<&Path>) -> anyhow::Result<Arc<Models>> {
    log::info!("loading {}", lm.display());
    let lm = import_arpa(lm)?;
    let space = match space {
        Some(p) => {
            log::info!("loading {}", p.display());
            Some(load_space(p)?)
        }
        None => None,
    };
    Ok(Arc::new(Models::new(lm, space)))
}

/// A config file path, or a shipped preset name.
pub fn resolve_config(spec: &str) -> anyhow::Result<CombinerConfig> {
    let path = Path::new(spec);
    if path.is_file() {
        Ok(CombinerConfig::load(path)?)
    } else {
        Ok(CombinerConfig::preset(spec)?)
    }
}

pub fn load_configs(dir: Option<&Path>) -> anyhow::Result<BTreeMap<String, CombinerConfig>> {
    match dir {
        Some(d) => Ok(CombinerConfig::load_dir(d)?),
        None => Ok(CombinerConfig::presets()),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> anyhow::Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))
}

pub fn train_ngram(args: &TrainNgramArgs) -> anyhow::Result<()> {
    let tokens = read_tokens(&args.corpus)?;
    let opts = TrainOptions {
        order: args.order,
        smoothing: args.smoothing,
        vocab_size: args.vocab_size,
        min_count: args.min_count,
        prune: args.prune.clone(),
    };
    let model = train(&tokens, &opts)?;
    if model.meta.fallback_to_witten_bell {
        log::warn!("modified Kneser-Ney discounts undefined on this corpus; used Witten-Bell");
    }
    export_arpa(&model, &args.out)?;
    let counts = model.ngram_counts();
    println!("wrote {} ({} words, n-grams per order {:?})", args.out.display(), model.vocab().len(), counts);
    Ok(())
}

pub fn train_lsa(args: &TrainLsaArgs) -> anyhow::Result<()> {
    let tokens = read_tokens(&args.corpus)?;
    let stopwords = match &args.stopwords {
        Some(p) => load_stopwords(p)?,
        None => match default_stopwords(&args.lang) {
            Some(s) => s,
            None => bail!("no built-in stopword list for `{}`", args.lang),
        },
    };
    let mut svd = SvdOptions::default();
    if let Some(seed) = args.seed {
        svd.seed = seed;
    }
    let opts = LsaOptions {
        dims: args.dims,
        window: args.window,
        columns: args.columns,
        vocab_size: args.vocab_size,
        min_count: args.min_count,
        density_m: args.density_m,
        svd,
    };
    let space = train_space(&tokens, &stopwords, &opts)?;
    save_space(&space, &args.out)?;
    println!("wrote {} ({} terms, {} dimensions)", args.out.display(), space.len(), space.dims());
    Ok(())
}

pub fn run_evaluate(args: &EvaluateArgs) -> anyhow::Result<Comparison> {
    let mut config = resolve_config(&args.config)?;
    if let Some(n) = args.list_size {
        config.list_size = n;
    }
    let models = load_models(&args.models.lm, args.models.space.as_deref())?;
    let files = read_texts(&args.test)?;
    let comparison = evaluate_all(&models, &[config.clone()], &files, config.list_size)?;
    if let Some(report) = &args.report {
        if let [single] = comparison.runs.as_slice() {
            write_json(report, single)?;
        } else {
            write_json(report, &comparison)?;
        }
    }
    Ok(comparison)
}

pub fn run_evaluate_all(args: &EvaluateAllArgs) -> anyhow::Result<Comparison> {
    let models = load_models(&args.models.lm, args.models.space.as_deref())?;
    let configs: Vec<CombinerConfig> = load_configs(args.configs.as_deref())?
        .into_values()
        .filter(|c| {
            let ok = Pipeline::new(Arc::clone(&models), c.clone()).is_ok();
            if !ok {
                log::warn!("skipping `{}`: it needs a semantic space", c.name);
            }
            ok
        })
        .collect();
    if configs.is_empty() {
        bail!("no usable configurations");
    }
    let files = read_texts(&args.test)?;
    let comparison = evaluate_all(&models, &configs, &files, args.list_size)?;
    if let Some(report) = &args.report {
        write_json(report, &comparison)?;
    }
    Ok(comparison)
}

/// Builds the service state from flags and the optional server config file.
pub fn serve_state(args: &ServeArgs) -> anyhow::Result<(Arc<AppState>, u16)> {
    let file: ServerConfig = match &args.server_config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => ServerConfig::default(),
    };
    let Some(lm) = args.lm.clone().or(file.lm) else {
        bail!("an n-gram model is required (--lm or `lm` in the server config)");
    };
    let space = args.space.clone().or(file.space);
    let configs = load_configs(args.configs.clone().or(file.configs).as_deref())?;
    let idle = Duration::from_secs(args.idle_timeout_secs.or(file.idle_timeout_secs).unwrap_or(30 * 60));
    let port = args.port.or(file.port).unwrap_or(8080);
    let models = load_models(&lm, space.as_deref())?;
    Ok((Arc::new(AppState::new(models, configs, idle)), port))
}

pub async fn serve(args: &ServeArgs) -> anyhow::Result<()> {
    let (state, port) = serve_state(args)?;
    let addr: SocketAddr = format!("{}:{port}", args.host).parse()?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    spawn_evictor(Arc::clone(&state));
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::TrainNgram(a) => train_ngram(&a),
        Command::TrainLsa(a) => train_lsa(&a),
        Command::Evaluate(a) => {
            print!("{}", run_evaluate(&a)?.table());
            Ok(())
        }
        Command::EvaluateAll(a) => {
            print!("{}", run_evaluate_all(&a)?.table());
            Ok(())
        }
        Command::Serve(a) => tokio::runtime::Runtime::new()?.block_on(serve(&a)),
    }
}
