//! `RunConfig`: one TOML file describing data, algorithms, prompt variants
//! and the scoring backend. Relative paths resolve against the file's
//! directory. Seeds are never read from the file; every stochastic command
//! takes `--seed`.

use anyhow::{bail, Context, Result};
use langrec_core::cf::{ModelKind, SlimConfig, WrmfConfig, EASE_POOL_LAMBDA};
use langrec_core::llm::{LiveConfig, PromptVariant};
use langrec_core::protocol::PoolConfig;
use serde::{Deserialize, Deserializer};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Worker threads; the `--workers` flag overrides it. Default: all cores.
    #[serde(default)]
    pub workers: Option<usize>,
    pub output_dir: PathBuf,
    pub data: DataPaths,
    #[serde(default)]
    pub algorithms: AlgorithmsSection,
    #[serde(default)]
    pub llm: Option<LlmSection>,
    #[serde(default)]
    pub pool: PoolConfig,
    #[serde(default)]
    pub serve: ServeSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    /// CSV with `item_id,title,rating_count`.
    pub catalog: PathBuf,
    /// CSV with `user_id,item_id[,rating[,timestamp]]`.
    pub interactions: PathBuf,
    /// JSONL of `{review_id, item_id, text}`.
    #[serde(default)]
    pub reviews: Option<PathBuf>,
    /// CSV `source_id,item_id` translating review item ids.
    #[serde(default)]
    pub review_id_map: Option<PathBuf>,
    /// Exported study records (JSONL).
    #[serde(default)]
    pub records: Option<PathBuf>,
    /// Records holding few-shot exemplar profiles; defaults to `records`.
    #[serde(default)]
    pub exemplars: Option<PathBuf>,
    /// `item_id<TAB>genre|...`, used by the mock backend.
    #[serde(default)]
    pub genres: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmsSection {
    #[serde(deserialize_with = "model_kinds")]
    pub models: Vec<ModelKind>,
    pub ease_lambda: f64,
    pub knn_k: usize,
    pub wrmf: WrmfSection,
    pub bpr_slim: SlimSection,
}

impl Default for AlgorithmsSection {
    fn default() -> Self {
        AlgorithmsSection {
            models: ModelKind::ALL.to_vec(),
            ease_lambda: EASE_POOL_LAMBDA,
            knn_k: 80,
            wrmf: WrmfSection::default(),
            bpr_slim: SlimSection::default(),
        }
    }
}

fn model_kinds<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ModelKind>, D::Error> {
    let names = Vec::<String>::deserialize(d)?;
    names
        .iter()
        .map(|n| n.parse().map_err(serde::de::Error::custom))
        .collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WrmfSection {
    pub factors: usize,
    pub reg: f64,
    pub alpha: f64,
    pub iterations: usize,
}

impl Default for WrmfSection {
    fn default() -> Self {
        let d = WrmfConfig::default();
        WrmfSection {
            factors: d.factors,
            reg: d.reg,
            alpha: d.alpha,
            iterations: d.iterations,
        }
    }
}

impl WrmfSection {
    pub fn with_seed(&self, seed: u64) -> WrmfConfig {
        WrmfConfig {
            factors: self.factors,
            reg: self.reg,
            alpha: self.alpha,
            iterations: self.iterations,
            seed,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlimSection {
    pub reg: f64,
    pub learn_rate: f64,
    pub epochs: usize,
}

impl Default for SlimSection {
    fn default() -> Self {
        let d = SlimConfig::default();
        SlimSection {
            reg: d.reg,
            learn_rate: d.learn_rate,
            epochs: d.epochs,
        }
    }
}

impl SlimSection {
    pub fn with_seed(&self, seed: u64) -> SlimConfig {
        SlimConfig {
            reg: self.reg,
            learn_rate: self.learn_rate,
            epochs: self.epochs,
            seed,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", deny_unknown_fields)]
pub enum BackendSection {
    Mock,
    Live(LiveConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmSection {
    /// Variant slugs, or `["all"]` for the twelve standard variants.
    #[serde(default = "all_variants")]
    pub variants: Vec<String>,
    #[serde(default = "default_k")]
    pub few_shot_k: usize,
    /// Held-out raters used as few-shot exemplars, in prompt order. They are
    /// never evaluated.
    #[serde(default)]
    pub exemplar_ids: Vec<String>,
    pub backend: BackendSection,
    /// JSONL response cache, read before and written after scoring.
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub retry_backoff_ms: u64,
}

fn all_variants() -> Vec<String> {
    vec!["all".into()]
}

fn default_k() -> usize {
    3
}

fn default_retries() -> u32 {
    3
}

fn default_backoff() -> u64 {
    200
}

impl LlmSection {
    pub fn variants(&self) -> Result<Vec<PromptVariant>> {
        let mut out = Vec::new();
        for v in &self.variants {
            if v == "all" {
                out.extend(PromptVariant::all(self.few_shot_k));
            } else {
                out.push(v.parse().with_context(|| format!("in llm.variants: {v}"))?);
            }
        }
        let mut seen = std::collections::HashSet::new();
        out.retain(|v| seen.insert(*v));
        Ok(out)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeSection {
    pub addr: String,
}

impl Default for ServeSection {
    fn default() -> Self {
        ServeSection {
            addr: "127.0.0.1:8080".into(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve(base);
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        let d = &mut self.data;
        fix(&mut d.catalog);
        fix(&mut d.interactions);
        for p in [
            &mut d.reviews,
            &mut d.review_id_map,
            &mut d.records,
            &mut d.exemplars,
            &mut d.genres,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        if let Some(llm) = &mut self.llm {
            if let Some(c) = &mut llm.cache {
                fix(c);
            }
        }
    }

    /// Fails on the first referenced input that does not exist. Cheap; runs
    /// before any data is loaded.
    pub fn validate_paths(&self, needs: Needs) -> Result<()> {
        let d = &self.data;
        if needs.reviews && d.reviews.is_none() {
            bail!("config is missing data.reviews");
        }
        if needs.records && d.records.is_none() {
            bail!("config is missing data.records");
        }
        let required = [
            ("data.catalog", Some(&d.catalog)),
            ("data.interactions", Some(&d.interactions)),
            ("data.reviews", d.reviews.as_ref()),
            ("data.review_id_map", d.review_id_map.as_ref()),
            ("data.records", d.records.as_ref()),
            ("data.exemplars", d.exemplars.as_ref()),
            ("data.genres", d.genres.as_ref()),
        ];
        for (name, path) in required {
            if let Some(p) = path {
                if !p.exists() {
                    bail!("{name} refers to {}, which does not exist", p.display());
                }
            }
        }
        if let Some(llm) = &self.llm {
            llm.variants()?;
            if let BackendSection::Mock = llm.backend {
                if d.genres.is_none() {
                    bail!("the mock backend needs data.genres");
                }
            }
            if let Some(cache_dir) = llm.cache.as_ref().and_then(|c| c.parent()) {
                if !cache_dir.as_os_str().is_empty() && !cache_dir.exists() {
                    bail!("directory of llm.cache, {}, does not exist", cache_dir.display());
                }
            }
        }
        if let Some(w) = self.workers {
            if w == 0 {
                bail!("workers must be at least 1");
            }
        }
        Ok(())
    }
}

/// Which optional inputs a command requires.
#[derive(Clone, Copy, Debug, Default)]
pub struct Needs {
    pub reviews: bool,
    pub records: bool,
}
