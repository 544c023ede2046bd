//! Assembly of the 40-item Phase-2 feedback set from four sample pools.
//!
//! Sources are drawn in the order RandPop, RandMidPop, EASE, BM25Fusion. A
//! candidate already in the pool (or elicited by the rater) is skipped: the
//! model pools fall through to their next-ranked item, the random pools draw
//! only from items not yet taken. Display positions are a seeded shuffle.

use super::{PoolEntry, PoolSource, RaterProfile, SamplePool, ITEMS_PER_SOURCE};
use crate::cf::{fit_ease, CfError, ItemWeightMatrix, EASE_POOL_LAMBDA};
use crate::data::{InteractionMatrix, ItemCatalog, ReviewCorpus};
use crate::ids::ItemId;
use crate::ranking::compare_scored;
use crate::retrieval::{late_fusion_rank, Bm25Index, Bm25Params, RetrievalError};
use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolConfig {
    /// Inclusive popularity-rank band of SP-RandPop.
    pub pop_band: (u32, u32),
    /// Inclusive popularity-rank band of SP-RandMidPop.
    pub midpop_band: (u32, u32),
    pub ease_lambda: f64,
    pub bm25: Bm25Params,
    /// When set, the EASE and BM25 pools only consider items up to this rank.
    pub model_pool_max_rank: Option<u32>,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            pop_band: (1, 1000),
            midpop_band: (1001, 5000),
            ease_lambda: EASE_POOL_LAMBDA,
            bm25: Bm25Params::default(),
            model_pool_max_rank: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PoolError {
    #[error("profile is incomplete: {0}")]
    IncompleteProfile(String),
    #[error("{pool:?} pool has only {eligible} eligible items, need {needed}")]
    TooFewCandidates {
        pool: PoolSource,
        eligible: usize,
        needed: usize,
    },
    #[error(transparent)]
    Cf(#[from] CfError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
}

/// Fitted EASE model and review index, ready to assemble pools for many raters.
#[derive(Clone, Debug)]
pub struct PoolAssembler {
    catalog: Arc<ItemCatalog>,
    ease: ItemWeightMatrix,
    index: Bm25Index,
    config: PoolConfig,
}

impl PoolAssembler {
    pub fn new(
        catalog: Arc<ItemCatalog>,
        interactions: &InteractionMatrix,
        reviews: &ReviewCorpus,
        config: PoolConfig,
    ) -> Result<Self, PoolError> {
        let ease = fit_ease(interactions, config.ease_lambda)?;
        let index = Bm25Index::build(reviews, config.bm25)?;
        Ok(Self::from_parts(catalog, ease, index, config))
    }

    pub fn from_parts(catalog: Arc<ItemCatalog>, ease: ItemWeightMatrix, index: Bm25Index, config: PoolConfig) -> Self {
        PoolAssembler {
            catalog,
            ease,
            index,
            config,
        }
    }

    pub fn catalog(&self) -> &Arc<ItemCatalog> {
        &self.catalog
    }

    pub fn ease(&self) -> &ItemWeightMatrix {
        &self.ease
    }

    pub fn index(&self) -> &Bm25Index {
        &self.index
    }

    pub fn config(&self) -> &PoolConfig {
        &self.config
    }

    pub fn assemble(&self, profile: &RaterProfile, seed: u64) -> Result<SamplePool, PoolError> {
        profile.validate().map_err(PoolError::IncompleteProfile)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut taken: HashSet<ItemId> = profile.elicited_items().cloned().collect();
        let mut entries: Vec<PoolEntry> = Vec::with_capacity(4 * ITEMS_PER_SOURCE);

        for (source, band) in [
            (PoolSource::RandPop, self.config.pop_band),
            (PoolSource::RandMidPop, self.config.midpop_band),
        ] {
            let eligible: Vec<&ItemId> = self
                .catalog
                .rank_band(band.0, band.1)
                .iter()
                .map(|e| &e.item_id)
                .filter(|id| !taken.contains(*id))
                .collect();
            if eligible.len() < ITEMS_PER_SOURCE {
                return Err(PoolError::TooFewCandidates {
                    pool: source,
                    eligible: eligible.len(),
                    needed: ITEMS_PER_SOURCE,
                });
            }
            for i in index::sample(&mut rng, eligible.len(), ITEMS_PER_SOURCE) {
                push(&mut entries, &mut taken, eligible[i].clone(), source);
            }
        }

        let ease_ranked = {
            let cands: Vec<ItemId> = self
                .ease
                .items()
                .iter()
                .filter(|id| self.within_model_rank(id))
                .cloned()
                .collect();
            let mut scored = self.ease.score(&profile.liked_items, &cands);
            scored.sort_by(compare_scored);
            scored
        };
        self.take_ranked(PoolSource::Ease, &ease_ranked, &mut entries, &mut taken)?;

        let bm25_ranked = {
            let cands: Vec<ItemId> = self
                .catalog
                .entries()
                .iter()
                .map(|e| e.item_id.clone())
                .filter(|id| self.within_model_rank(id))
                .collect();
            late_fusion_rank(&self.index, &profile.desc_pos, &cands)
        };
        self.take_ranked(PoolSource::Bm25Fusion, &bm25_ranked, &mut entries, &mut taken)?;

        let mut positions: Vec<u32> = (0..entries.len() as u32).collect();
        positions.shuffle(&mut rng);
        for (e, p) in entries.iter_mut().zip(positions) {
            e.display_position = p;
        }
        Ok(SamplePool { entries })
    }

    fn within_model_rank(&self, id: &ItemId) -> bool {
        match self.config.model_pool_max_rank {
            None => true,
            Some(max) => self
                .catalog
                .get(id)
                .is_some_and(|e| e.popularity_rank <= max),
        }
    }

    fn take_ranked(
        &self,
        source: PoolSource,
        ranked: &[(ItemId, f64)],
        entries: &mut Vec<PoolEntry>,
        taken: &mut HashSet<ItemId>,
    ) -> Result<(), PoolError> {
        let picks: Vec<ItemId> = ranked
            .iter()
            .map(|(id, _)| id)
            .filter(|id| !taken.contains(*id))
            .take(ITEMS_PER_SOURCE)
            .cloned()
            .collect();
        if picks.len() < ITEMS_PER_SOURCE {
            return Err(PoolError::TooFewCandidates {
                pool: source,
                eligible: picks.len(),
                needed: ITEMS_PER_SOURCE,
            });
        }
        for id in picks {
            push(entries, taken, id, source);
        }
        Ok(())
    }
}

fn push(entries: &mut Vec<PoolEntry>, taken: &mut HashSet<ItemId>, item_id: ItemId, source: PoolSource) {
    taken.insert(item_id.clone());
    entries.push(PoolEntry {
        item_id,
        source,
        display_position: 0,
    });
}

/// One-off assembly that fits EASE and the review index from scratch with
/// default settings.
pub fn assemble_pool(
    profile: &RaterProfile,
    catalog: Arc<ItemCatalog>,
    interactions: &InteractionMatrix,
    reviews: &ReviewCorpus,
    seed: u64,
) -> Result<SamplePool, PoolError> {
    PoolAssembler::new(catalog, interactions, reviews, PoolConfig::default())?.assemble(profile, seed)
}
