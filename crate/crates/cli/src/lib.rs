pub mod benchmark;
pub mod commands;
pub mod config;
pub mod inputs;
pub mod serve;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use config::RunConfig;
use langrec_core::cf::ModelKind;
use langrec_core::protocol::{StudyStore, SystemClock};
use langrec_core::synth::SynthConfig;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Parser)]
#[command(name = "langrec", version, about = "Recommend from item and language preferences, and evaluate")]
pub struct Cli {
    /// Worker threads (overrides the config's `workers`; default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate the configured data; print a JSON summary.
    Ingest {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit one baseline and save it as JSON.
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// random, most-popular, item-knn, wrmf, bpr-slim or ease.
        #[arg(long)]
        model: ModelKind,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assemble the 40-item feedback pool for each profile in a JSONL file.
    Pool {
        #[arg(long)]
        config: PathBuf,
        /// JSONL of profiles or exported records.
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the prompt snapshots for the fixed fixture profile.
    Prompts {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 3)]
        few_shot_k: usize,
    },
    /// Rank every rater's pool with each algorithm and report NDCG@10.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Defaults to the config's `output_dir`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Per-pool rating statistics of exported records.
    Stats {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the study service.
    Serve {
        #[arg(long)]
        config: PathBuf,
        /// Base seed for per-rater pool seeds.
        #[arg(long)]
        seed: u64,
        /// Defaults to the config's `serve.addr`.
        #[arg(long)]
        addr: Option<String>,
    },
    /// Generate a synthetic catalog, training data and rater cohort.
    Synthesize {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 153)]
        raters: usize,
        #[arg(long, default_value_t = 3)]
        exemplars: usize,
        #[arg(long, default_value_t = 0.27)]
        seen_rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        anyhow::ensure!(n >= 1, "workers must be at least 1");
        b = b.num_threads(n);
    }
    b.build().context("starting worker pool")
}

fn load(path: &Path, workers: &mut Option<usize>) -> Result<RunConfig> {
    let cfg = RunConfig::load(path)?;
    if workers.is_none() {
        *workers = cfg.workers;
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<()> {
    let mut workers = cli.workers;
    match cli.command {
        Command::Ingest { config } => {
            let cfg = load(&config, &mut workers)?;
            let summary = thread_pool(workers)?.install(|| commands::ingest(&cfg))?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Fit {
            config,
            model,
            seed,
            out,
        } => {
            let cfg = load(&config, &mut workers)?;
            thread_pool(workers)?.install(|| commands::fit(&cfg, model, seed, &out))?;
            println!("wrote {}", out.display());
        }
        Command::Pool {
            config,
            profiles,
            seed,
            out,
        } => {
            let cfg = load(&config, &mut workers)?;
            let n = thread_pool(workers)?.install(|| commands::pools(&cfg, &profiles, seed, &out))?;
            println!("wrote {n} pools to {}", out.display());
        }
        Command::Prompts { out_dir, few_shot_k } => {
            for p in commands::dump_prompts(&out_dir, few_shot_k)? {
                println!("{}", p.display());
            }
        }
        Command::Benchmark { config, seed, out_dir } => {
            let cfg = load(&config, &mut workers)?;
            let out = thread_pool(workers)?.install(|| benchmark::run_benchmark(&cfg, seed))?;
            let dir = out_dir.unwrap_or_else(|| cfg.output_dir.clone());
            out.write(&dir)?;
            print!("{}", out.report.to_text());
            println!("{} raters; reports in {}", out.n_raters, dir.display());
        }
        Command::Stats { records, out } => {
            let text = commands::stats_text(&records)?;
            print!("{text}");
            if let Some(p) = out {
                std::fs::write(&p, &text).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::Serve { config, seed, addr } => {
            let cfg = load(&config, &mut workers)?;
            let assembler = thread_pool(workers)?.install(|| commands::build_assembler(&cfg))?;
            let store = Arc::new(StudyStore::new(Arc::new(assembler), Arc::new(SystemClock), seed));
            let addr = addr.unwrap_or_else(|| cfg.serve.addr.clone());
            let rt = tokio::runtime::Runtime::new().context("starting async runtime")?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .with_context(|| format!("binding {addr}"))?;
                eprintln!("listening on {}", listener.local_addr()?);
                let stop = async {
                    let _ = tokio::signal::ctrl_c().await;
                };
                serve::serve_on(listener, store, stop).await?;
                anyhow::Ok(())
            })?;
        }
        Command::Synthesize {
            seed,
            raters,
            exemplars,
            seen_rate,
            out,
        } => {
            let cfg = SynthConfig {
                seed,
                n_raters: raters,
                n_exemplars: exemplars,
                seen_rate,
                ..SynthConfig::default()
            };
            let paths = thread_pool(workers)?.install(|| commands::synthesize_to(&cfg, &out))?;
            println!("wrote {raters} records to {}", paths.records.display());
        }
    }
    Ok(())
}
