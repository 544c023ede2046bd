use crate::ids::{ItemId, RaterId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Minimum length, in characters, of every free-text description.
pub const MIN_DESCRIPTION_CHARS: usize = 150;
/// Items named per polarity during elicitation.
pub const ITEMS_PER_POLARITY: usize = 5;
/// Items contributed by each sample pool.
pub const ITEMS_PER_SOURCE: usize = 10;
/// Size of the Phase-2 feedback set.
pub const POOL_SIZE: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    #[serde(alias = "+", alias = "pos")]
    Positive,
    #[serde(alias = "-", alias = "neg")]
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Initial,
    Final,
}

/// Protocol steps in the order they must happen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    InitialDescPos,
    InitialDescNeg,
    LikedItems,
    DislikedItems,
    FinalDescPos,
    FinalDescNeg,
    Pool,
    Rating,
    Complete,
}

impl Step {
    pub fn next(self) -> Step {
        match self {
            Step::InitialDescPos => Step::InitialDescNeg,
            Step::InitialDescNeg => Step::LikedItems,
            Step::LikedItems => Step::DislikedItems,
            Step::DislikedItems => Step::FinalDescPos,
            Step::FinalDescPos => Step::FinalDescNeg,
            Step::FinalDescNeg => Step::Pool,
            Step::Pool => Step::Rating,
            Step::Rating | Step::Complete => Step::Complete,
        }
    }

    pub fn description(polarity: Polarity, stage: Stage) -> Step {
        match (stage, polarity) {
            (Stage::Initial, Polarity::Positive) => Step::InitialDescPos,
            (Stage::Initial, Polarity::Negative) => Step::InitialDescNeg,
            (Stage::Final, Polarity::Positive) => Step::FinalDescPos,
            (Stage::Final, Polarity::Negative) => Step::FinalDescNeg,
        }
    }

    pub fn items(polarity: Polarity) -> Step {
        match polarity {
            Polarity::Positive => Step::LikedItems,
            Polarity::Negative => Step::DislikedItems,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok();
        let name = s.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
        f.write_str(name)
    }
}

/// A rater's elicited preferences. Empty strings and lists mean "not yet
/// submitted".
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterProfile {
    pub rater_id: RaterId,
    pub desc_pos: String,
    pub desc_neg: String,
    pub final_desc_pos: String,
    pub final_desc_neg: String,
    /// In elicitation order.
    pub liked_items: Vec<ItemId>,
    pub disliked_items: Vec<ItemId>,
    /// Milliseconds since the Unix epoch at which each step was submitted.
    pub timestamps: BTreeMap<Step, u64>,
}

impl RaterProfile {
    pub fn new(rater_id: RaterId) -> Self {
        RaterProfile {
            rater_id,
            ..Default::default()
        }
    }

    pub fn description(&self, polarity: Polarity, stage: Stage) -> &str {
        match (stage, polarity) {
            (Stage::Initial, Polarity::Positive) => &self.desc_pos,
            (Stage::Initial, Polarity::Negative) => &self.desc_neg,
            (Stage::Final, Polarity::Positive) => &self.final_desc_pos,
            (Stage::Final, Polarity::Negative) => &self.final_desc_neg,
        }
    }

    pub(crate) fn description_mut(&mut self, polarity: Polarity, stage: Stage) -> &mut String {
        match (stage, polarity) {
            (Stage::Initial, Polarity::Positive) => &mut self.desc_pos,
            (Stage::Initial, Polarity::Negative) => &mut self.desc_neg,
            (Stage::Final, Polarity::Positive) => &mut self.final_desc_pos,
            (Stage::Final, Polarity::Negative) => &mut self.final_desc_neg,
        }
    }

    pub fn items(&self, polarity: Polarity) -> &[ItemId] {
        match polarity {
            Polarity::Positive => &self.liked_items,
            Polarity::Negative => &self.disliked_items,
        }
    }

    /// All Phase-1 fields present and valid.
    pub fn is_complete(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn validate(&self) -> Result<(), String> {
        for (pol, stage) in [
            (Polarity::Positive, Stage::Initial),
            (Polarity::Negative, Stage::Initial),
            (Polarity::Positive, Stage::Final),
            (Polarity::Negative, Stage::Final),
        ] {
            let n = self.description(pol, stage).chars().count();
            if n < MIN_DESCRIPTION_CHARS {
                return Err(format!(
                    "{stage:?} {pol:?} description has {n} characters (minimum {MIN_DESCRIPTION_CHARS})"
                ));
            }
        }
        for pol in [Polarity::Positive, Polarity::Negative] {
            let items = self.items(pol);
            if items.len() != ITEMS_PER_POLARITY {
                return Err(format!("{pol:?} list has {} items", items.len()));
            }
            let mut s = items.to_vec();
            s.sort();
            s.dedup();
            if s.len() != items.len() {
                return Err(format!("{pol:?} list has duplicates"));
            }
        }
        if self.liked_items.iter().any(|i| self.disliked_items.contains(i)) {
            return Err("liked and disliked lists overlap".into());
        }
        Ok(())
    }

    /// Liked followed by disliked items.
    pub fn elicited_items(&self) -> impl Iterator<Item = &ItemId> {
        self.liked_items.iter().chain(self.disliked_items.iter())
    }
}

/// Which sample pool an item was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PoolSource {
    RandPop,
    RandMidPop,
    #[serde(rename = "EASE")]
    Ease,
    #[serde(rename = "BM25Fusion")]
    Bm25Fusion,
}

impl PoolSource {
    /// Draw order used by pool assembly.
    pub const ALL: [PoolSource; 4] = [
        PoolSource::RandPop,
        PoolSource::RandMidPop,
        PoolSource::Ease,
        PoolSource::Bm25Fusion,
    ];

    pub fn is_random(self) -> bool {
        matches!(self, PoolSource::RandPop | PoolSource::RandMidPop)
    }

    pub fn label(self) -> &'static str {
        match self {
            PoolSource::RandPop => "SP-RandPop",
            PoolSource::RandMidPop => "SP-RandMidPop",
            PoolSource::Ease => "SP-EASE",
            PoolSource::Bm25Fusion => "SP-BM25-Fusion",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub item_id: ItemId,
    pub source: PoolSource,
    pub display_position: u32,
}

/// The 40-item feedback set, stored in draw order (source by source).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePool {
    pub entries: Vec<PoolEntry>,
}

impl SamplePool {
    pub fn contains(&self, item: &ItemId) -> bool {
        self.entries.iter().any(|e| &e.item_id == item)
    }

    pub fn entry(&self, item: &ItemId) -> Option<&PoolEntry> {
        self.entries.iter().find(|e| &e.item_id == item)
    }

    /// Entries sorted by display position.
    pub fn displayed(&self) -> Vec<&PoolEntry> {
        let mut v: Vec<&PoolEntry> = self.entries.iter().collect();
        v.sort_by_key(|e| e.display_position);
        v
    }

    pub fn item_ids(&self) -> Vec<ItemId> {
        self.entries.iter().map(|e| e.item_id.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingEntry {
    pub item_id: ItemId,
    /// Has seen the item, or would see it.
    pub seen: bool,
    /// 1..=5.
    pub score: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub rater_id: RaterId,
    pub pool: SamplePool,
    /// One per pool entry, in pool entry order.
    pub ratings: Vec<RatingEntry>,
}

impl StudyRecord {
    pub fn is_complete(&self) -> bool {
        self.ratings.len() == self.pool.entries.len()
            && !self.pool.entries.is_empty()
            && self
                .pool
                .entries
                .iter()
                .zip(&self.ratings)
                .all(|(e, r)| e.item_id == r.item_id && (1..=5).contains(&r.score))
    }

    /// All scores identical.
    pub fn is_uniform(&self) -> bool {
        self.ratings.windows(2).all(|w| w[0].score == w[1].score)
    }

    pub fn rating(&self, item: &ItemId) -> Option<&RatingEntry> {
        self.ratings.iter().find(|r| &r.item_id == item)
    }
}

/// One line of the exported records file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordLine {
    pub profile: RaterProfile,
    pub record: StudyRecord,
}
