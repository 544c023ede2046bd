use crate::config::RunConfig;
use anyhow::{Context, Result};
use langrec_core::data::{load_catalog, load_id_map, load_interactions, load_reviews, InteractionMatrix, ItemCatalog, ReviewCorpus};
use langrec_core::ids::ItemId;
use langrec_core::llm::load_genre_map;
use langrec_core::protocol::{read_records, RaterProfile, RecordLine};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

pub struct Inputs {
    pub catalog: Arc<ItemCatalog>,
    pub interactions: InteractionMatrix,
}

pub fn load_core(cfg: &RunConfig) -> Result<Inputs> {
    let d = &cfg.data;
    let catalog = load_catalog(&d.catalog).with_context(|| format!("loading {}", d.catalog.display()))?;
    let interactions =
        load_interactions(&d.interactions, &catalog).with_context(|| format!("loading {}", d.interactions.display()))?;
    Ok(Inputs {
        catalog: Arc::new(catalog),
        interactions,
    })
}

pub fn load_review_corpus(cfg: &RunConfig, catalog: &ItemCatalog) -> Result<ReviewCorpus> {
    let d = &cfg.data;
    let path = d.reviews.as_ref().context("config is missing data.reviews")?;
    let map = match &d.review_id_map {
        Some(p) => Some(load_id_map(p).with_context(|| format!("loading {}", p.display()))?),
        None => None,
    };
    load_reviews(path, catalog, map.as_ref()).with_context(|| format!("loading {}", path.display()))
}

pub fn load_record_lines(path: &Path) -> Result<Vec<RecordLine>> {
    read_records(path).with_context(|| format!("loading {}", path.display()))
}

pub fn load_genres(path: &Path) -> Result<BTreeMap<ItemId, Vec<String>>> {
    load_genre_map(path).with_context(|| format!("loading {}", path.display()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProfileLine {
    Record(Box<RecordLine>),
    Profile(Box<RaterProfile>),
}

/// Reads JSONL where each line is either a bare profile or a full record.
pub fn load_profiles(path: &Path) -> Result<Vec<RaterProfile>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let p: ProfileLine =
                serde_json::from_str(l).with_context(|| format!("{}: line {}", path.display(), i + 1))?;
            Ok(match p {
                ProfileLine::Record(r) => r.profile,
                ProfileLine::Profile(p) => *p,
            })
        })
        .collect()
}
