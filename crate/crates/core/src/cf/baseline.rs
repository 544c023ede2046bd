use crate::data::{InteractionMatrix, ItemCatalog};
use crate::ids::ItemId;
use crate::ranking::rank_by_score;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Scores items by how often they were rated; ignores the user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopularityModel {
    counts: BTreeMap<ItemId, u64>,
}

impl PopularityModel {
    pub fn from_counts(counts: impl IntoIterator<Item = (ItemId, u64)>) -> Self {
        PopularityModel {
            counts: counts.into_iter().collect(),
        }
    }

    pub fn from_catalog(catalog: &ItemCatalog) -> Self {
        Self::from_counts(
            catalog
                .entries()
                .iter()
                .map(|e| (e.item_id.clone(), e.rating_count)),
        )
    }

    pub fn from_matrix(x: &InteractionMatrix) -> Self {
        Self::from_counts(x.items().iter().cloned().zip(x.item_counts()))
    }

    pub fn score(&self, candidates: &[ItemId]) -> Vec<(ItemId, f64)> {
        candidates
            .iter()
            .map(|c| (c.clone(), self.counts.get(c).copied().unwrap_or(0) as f64))
            .collect()
    }
}

/// Items ordered by descending count; ties by ascending id.
pub fn most_popular(counts: &[(ItemId, u64)]) -> Vec<ItemId> {
    let scored: Vec<(ItemId, f64)> = counts.iter().map(|(i, c)| (i.clone(), *c as f64)).collect();
    rank_by_score(&scored)
}

/// Seeded uniform shuffle of `candidates`.
pub fn random_ranking(seed: u64, candidates: &[ItemId]) -> Vec<ItemId> {
    let mut v = candidates.to_vec();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}

/// Uninformed baseline: the score is minus the position in a seeded shuffle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModel {
    pub seed: u64,
}

impl RandomModel {
    pub fn score(&self, candidates: &[ItemId]) -> Vec<(ItemId, f64)> {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        let mut scores = vec![0.0; candidates.len()];
        for (pos, &i) in order.iter().enumerate() {
            scores[i] = -(pos as f64);
        }
        candidates.iter().cloned().zip(scores).collect()
    }
}
