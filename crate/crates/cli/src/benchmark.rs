//! End-to-end comparison: every configured baseline and prompt variant ranks
//! each rater's 40-item pool, and NDCG@10 is aggregated per subset.

use crate::config::{BackendSection, Needs, RunConfig};
use crate::inputs::{load_core, load_genres, load_record_lines};
use anyhow::{bail, Context, Result};
use langrec_core::cf::{
    fit_bpr_slim, fit_ease, fit_itemknn, fit_wrmf, Model, ModelKind, PopularityModel, RandomModel,
};
use langrec_core::eval::{evaluate, mean_subset_sizes, Report, ReportRow, SubsetKind, NDCG_CUTOFF};
use langrec_core::ids::{derive_seed, ItemId, RaterId};
use langrec_core::llm::{
    rank, score_candidates, CachedBackend, LiveBackend, MockBackend, PromptVariant, RetryPolicy, ScoreBackend,
};
use langrec_core::protocol::{RaterProfile, RecordLine, StudyRecord};
use langrec_core::ranking::rank_by_score;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

pub fn model_label(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Random => "Random",
        ModelKind::MostPopular => "MostPopular",
        ModelKind::ItemKnn => "Item-kNN",
        ModelKind::Wrmf => "WR-MF",
        ModelKind::BprSlim => "BPR-SLIM",
        ModelKind::Ease => "EASE",
    }
}

pub struct BenchmarkOutput {
    pub report: Report,
    /// `algorithm, subset, rater_id, ndcg` rows.
    pub per_rater: Vec<(String, SubsetKind, RaterId, f64)>,
    /// `(algorithm, subset, skipped raters)`.
    pub skipped: Vec<(String, SubsetKind, usize)>,
    pub n_raters: usize,
}

type Rankings = BTreeMap<RaterId, Vec<ItemId>>;

pub fn fit_model(kind: ModelKind, cfg: &RunConfig, inputs: &crate::inputs::Inputs, seed: u64) -> Result<Model> {
    let a = &cfg.algorithms;
    let x = &inputs.interactions;
    let model = match kind {
        ModelKind::Random => Model::Random(RandomModel {
            seed: derive_seed(seed, "random"),
        }),
        ModelKind::MostPopular => Model::MostPopular(PopularityModel::from_catalog(&inputs.catalog)),
        ModelKind::ItemKnn => Model::ItemKnn(fit_itemknn(x, a.knn_k)?),
        ModelKind::Wrmf => Model::Wrmf(fit_wrmf(x, &a.wrmf.with_seed(derive_seed(seed, "wrmf")))?),
        ModelKind::BprSlim => Model::BprSlim(fit_bpr_slim(x, &a.bpr_slim.with_seed(derive_seed(seed, "bpr-slim")))?),
        ModelKind::Ease => Model::Ease(fit_ease(x, a.ease_lambda)?),
    };
    Ok(model)
}

fn model_rankings(model: &Model, cohort: &[&RecordLine], seed: u64) -> Rankings {
    cohort
        .par_iter()
        .map(|line| {
            let rater = &line.profile.rater_id;
            let cands = line.record.pool.item_ids();
            let scored = match model {
                // A fresh shuffle per rater, reproducible from the run seed.
                Model::Random(_) => RandomModel {
                    seed: derive_seed(seed, &format!("random:{rater}")),
                }
                .score(&cands),
                m => m.score_candidates(&line.profile.liked_items, &cands),
            };
            (rater.clone(), rank_by_score(&scored))
        })
        .collect()
}

fn build_backend(cfg: &RunConfig) -> Result<Option<CachedBackend<Box<dyn ScoreBackend>>>> {
    let Some(llm) = &cfg.llm else { return Ok(None) };
    let inner: Box<dyn ScoreBackend> = match &llm.backend {
        BackendSection::Mock => {
            let catalog = langrec_core::data::load_catalog(&cfg.data.catalog)?;
            let genres = load_genres(cfg.data.genres.as_ref().context("the mock backend needs data.genres")?)?;
            Box::new(MockBackend::new(&catalog, &genres))
        }
        BackendSection::Live(live) => Box::new(LiveBackend::new(live.clone())?),
    };
    let cached = CachedBackend::new(inner);
    if let Some(path) = &llm.cache {
        cached
            .load(path)
            .with_context(|| format!("reading cache {}", path.display()))?;
    }
    Ok(Some(cached))
}

pub fn run_benchmark(cfg: &RunConfig, seed: u64) -> Result<BenchmarkOutput> {
    cfg.validate_paths(Needs {
        records: true,
        ..Needs::default()
    })?;
    let inputs = load_core(cfg)?;
    let records_path = cfg.data.records.as_ref().expect("validated");
    let records = load_record_lines(records_path)?;

    let variants: Vec<PromptVariant> = match &cfg.llm {
        Some(l) => l.variants()?,
        None => Vec::new(),
    };
    let exemplar_ids: Vec<RaterId> = cfg
        .llm
        .as_ref()
        .map(|l| l.exemplar_ids.iter().map(RaterId::new).collect())
        .unwrap_or_default();
    let excluded: HashSet<&RaterId> = exemplar_ids.iter().collect();
    let cohort: Vec<&RecordLine> = records
        .iter()
        .filter(|l| !excluded.contains(&l.profile.rater_id))
        .collect();
    if cohort.is_empty() {
        bail!("no raters left to evaluate");
    }

    let max_k = variants.iter().map(|v| v.exemplars_needed()).max().unwrap_or(0);
    let exemplars: Vec<RaterProfile> = if max_k > 0 {
        if exemplar_ids.len() < max_k {
            bail!("few-shot variants need {max_k} exemplars, llm.exemplar_ids lists {}", exemplar_ids.len());
        }
        let pool = match &cfg.data.exemplars {
            Some(p) => load_record_lines(p)?,
            None => records.clone(),
        };
        let by_id: BTreeMap<&RaterId, &RaterProfile> = pool.iter().map(|l| (&l.profile.rater_id, &l.profile)).collect();
        exemplar_ids
            .iter()
            .map(|id| {
                by_id
                    .get(id)
                    .map(|p| (*p).clone())
                    .with_context(|| format!("exemplar {id} not found"))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let backend = build_backend(cfg)?;
    let mut rows: Vec<(String, Rankings)> = Vec::new();
    for &kind in &cfg.algorithms.models {
        let model = fit_model(kind, cfg, &inputs, seed).with_context(|| format!("fitting {kind}"))?;
        rows.push((model_label(kind).to_string(), model_rankings(&model, &cohort, seed)));
    }
    if let (Some(backend), Some(llm)) = (&backend, &cfg.llm) {
        let policy = RetryPolicy {
            max_retries: llm.max_retries,
            backoff: Duration::from_millis(llm.retry_backoff_ms),
        };
        for &variant in &variants {
            let ex = &exemplars[..variant.exemplars_needed()];
            let rankings: Rankings = cohort
                .par_iter()
                .map(|line| {
                    let scored = score_candidates(
                        backend,
                        variant,
                        &line.profile,
                        ex,
                        &line.record.pool.item_ids(),
                        &inputs.catalog,
                        policy,
                    )?;
                    Ok((line.profile.rater_id.clone(), rank(&scored)))
                })
                .collect::<Result<_, langrec_core::llm::LlmError>>()
                .with_context(|| format!("scoring {}", variant.label()))?;
            rows.push((variant.label(), rankings));
        }
        if let Some(path) = &llm.cache {
            backend
                .save(path)
                .with_context(|| format!("writing cache {}", path.display()))?;
        }
    }

    let study: Vec<StudyRecord> = cohort.iter().map(|l| l.record.clone()).collect();
    let mut report = Report {
        subset_sizes: Some(mean_subset_sizes(&study)?),
        rows: Vec::new(),
    };
    let mut per_rater = Vec::new();
    let mut skipped = Vec::new();
    for (label, rankings) in rows {
        let mut cells = [None; 4];
        for (slot, kind) in SubsetKind::ALL.into_iter().enumerate() {
            let ev = evaluate(&rankings, &study, kind, NDCG_CUTOFF)?;
            cells[slot] = ev.cell;
            skipped.push((label.clone(), kind, ev.skipped.len()));
            per_rater.extend(ev.per_rater.into_iter().map(|(r, v)| (label.clone(), kind, r, v)));
        }
        report.rows.push(ReportRow { algorithm: label, cells });
    }
    Ok(BenchmarkOutput {
        report,
        per_rater,
        skipped,
        n_raters: cohort.len(),
    })
}

impl BenchmarkOutput {
    pub fn per_rater_tsv(&self) -> String {
        let mut s = String::from("algorithm\tsubset\trater_id\tndcg\n");
        for (a, k, r, v) in &self.per_rater {
            let _ = writeln!(s, "{a}\t{}\t{r}\t{v}", k.as_str());
        }
        s
    }

    pub fn skipped_tsv(&self) -> String {
        let mut s = String::from("algorithm\tsubset\tskipped\n");
        for (a, k, n) in &self.skipped {
            let _ = writeln!(s, "{a}\t{}\t{n}", k.as_str());
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let files = [
            ("report.csv", self.report.to_csv()),
            ("report.txt", self.report.to_text()),
            ("per_rater.tsv", self.per_rater_tsv()),
            ("skipped.tsv", self.skipped_tsv()),
        ];
        for (name, body) in files {
            let p = dir.join(name);
            std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
        }
        Ok(())
    }
}
