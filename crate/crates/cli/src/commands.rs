use crate::benchmark::fit_model;
use crate::config::{Needs, RunConfig};
use crate::inputs::{load_core, load_profiles, load_record_lines, load_review_corpus};
use anyhow::{bail, Context, Result};
use langrec_core::cf::ModelKind;
use langrec_core::eval::{mean_subset_sizes, pool_stats, SubsetKind};
use langrec_core::ids::{derive_seed, RaterId};
use langrec_core::llm::golden::{golden_prompt, render_golden, GOLDEN_VERSION};
use langrec_core::llm::PromptVariant;
use langrec_core::protocol::{PoolAssembler, SamplePool, StudyRecord};
use langrec_core::synth::{synthesize, SynthConfig, SynthPaths};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct IngestSummary {
    pub items: usize,
    pub users: usize,
    pub interaction_items: usize,
    pub interactions: usize,
    pub reviews: Option<usize>,
    pub reviewed_items: Option<usize>,
    pub records: Option<usize>,
}

/// Loads and validates every configured input.
pub fn ingest(cfg: &RunConfig) -> Result<IngestSummary> {
    cfg.validate_paths(Needs::default())?;
    let inputs = load_core(cfg)?;
    let (reviews, reviewed_items) = if cfg.data.reviews.is_some() {
        let corpus = load_review_corpus(cfg, &inputs.catalog)?;
        let items = inputs
            .catalog
            .entries()
            .iter()
            .filter(|e| !corpus.reviews_of(&e.item_id).is_empty())
            .count();
        (Some(corpus.len()), Some(items))
    } else {
        (None, None)
    };
    let records = match &cfg.data.records {
        Some(p) => Some(load_record_lines(p)?.len()),
        None => None,
    };
    Ok(IngestSummary {
        items: inputs.catalog.len(),
        users: inputs.interactions.n_users(),
        interaction_items: inputs.interactions.n_items(),
        interactions: inputs.interactions.nnz(),
        reviews,
        reviewed_items,
        records,
    })
}

pub fn fit(cfg: &RunConfig, kind: ModelKind, seed: u64, out: &Path) -> Result<()> {
    cfg.validate_paths(Needs::default())?;
    let inputs = load_core(cfg)?;
    let model = fit_model(kind, cfg, &inputs, seed).with_context(|| format!("fitting {kind}"))?;
    model.save(out).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

pub fn build_assembler(cfg: &RunConfig) -> Result<PoolAssembler> {
    cfg.validate_paths(Needs {
        reviews: true,
        ..Needs::default()
    })?;
    let inputs = load_core(cfg)?;
    let corpus = load_review_corpus(cfg, &inputs.catalog)?;
    Ok(PoolAssembler::new(
        inputs.catalog.clone(),
        &inputs.interactions,
        &corpus,
        cfg.pool.clone(),
    )?)
}

#[derive(Debug, Serialize)]
pub struct PoolLine {
    pub rater_id: RaterId,
    pub seed: u64,
    pub pool: SamplePool,
}

/// Assembles a pool for each profile; rater `r` uses seed
/// `derive_seed(seed, r)`, the same rule as the study service.
pub fn pools(cfg: &RunConfig, profiles: &Path, seed: u64, out: &Path) -> Result<usize> {
    let assembler = build_assembler(cfg)?;
    let profiles = load_profiles(profiles)?;
    let mut body = String::new();
    for p in &profiles {
        let s = derive_seed(seed, p.rater_id.as_str());
        let pool = assembler
            .assemble(p, s)
            .with_context(|| format!("assembling pool for {}", p.rater_id))?;
        let line = PoolLine {
            rater_id: p.rater_id.clone(),
            seed: s,
            pool,
        };
        body.push_str(&serde_json::to_string(&line)?);
        body.push('\n');
    }
    std::fs::write(out, body).with_context(|| format!("writing {}", out.display()))?;
    Ok(profiles.len())
}

/// Writes one snapshot file per standard variant under `<dir>/v1/`.
pub fn dump_prompts(dir: &Path, few_shot_k: usize) -> Result<Vec<PathBuf>> {
    let dir = dir.join(GOLDEN_VERSION);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for v in PromptVariant::all(few_shot_k) {
        let spec = golden_prompt(v)?;
        let p = dir.join(format!("{v}.txt"));
        std::fs::write(&p, render_golden(&spec)).with_context(|| format!("writing {}", p.display()))?;
        written.push(p);
    }
    Ok(written)
}

pub fn stats_text(records: &Path) -> Result<String> {
    let lines = load_record_lines(records)?;
    if lines.is_empty() {
        bail!("{} holds no records", records.display());
    }
    let study: Vec<StudyRecord> = lines.into_iter().map(|l| l.record).collect();
    let mut out = pool_stats(&study).to_text();
    let sizes = mean_subset_sizes(&study)?;
    out.push('\n');
    out.push_str("Mean evaluation set size\n");
    for (k, s) in SubsetKind::ALL.iter().zip(sizes) {
        let _ = writeln!(out, "  {:<9}{s:.1}", k.as_str());
    }
    Ok(out)
}

/// Generates a cohort and writes it with a ready-to-run benchmark config.
pub fn synthesize_to(cfg: &SynthConfig, dir: &Path) -> Result<SynthPaths> {
    let synth = synthesize(cfg)?;
    let paths = synth.write(dir)?;
    let exemplar_ids: Vec<String> = synth
        .exemplars
        .iter()
        .map(|l| format!("{:?}", l.profile.rater_id.as_str()))
        .collect();
    let k = cfg.n_exemplars.min(3);
    let variants: Vec<String> = if k == 0 {
        PromptVariant::all(1)
            .into_iter()
            .filter(|v| v.exemplars_needed() == 0)
            .map(|v| format!("\"{v}\""))
            .collect()
    } else {
        vec!["\"all\"".to_string()]
    };
    let config = format!(
        "output_dir = \"report\"\n\n\
         [data]\n\
         catalog = \"catalog.csv\"\n\
         interactions = \"interactions.csv\"\n\
         reviews = \"reviews.jsonl\"\n\
         records = \"records.jsonl\"\n\
         exemplars = \"exemplars.jsonl\"\n\
         genres = \"genres.tsv\"\n\n\
         [algorithms]\n\
         models = [\"random\", \"most-popular\", \"item-knn\", \"wrmf\", \"bpr-slim\", \"ease\"]\n\n\
         [llm]\n\
         variants = [{variants}]\n\
         few_shot_k = {k}\n\
         exemplar_ids = [{ids}]\n\
         backend = {{ kind = \"mock\" }}\n",
        variants = variants.join(", "),
        k = k.max(1),
        ids = exemplar_ids[..k].join(", "),
    );
    let p = dir.join("benchmark.toml");
    std::fs::write(&p, config).with_context(|| format!("writing {}", p.display()))?;
    Ok(paths)
}
