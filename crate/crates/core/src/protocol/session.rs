use super::pool::{PoolAssembler, PoolError};
use super::{
    Polarity, RaterProfile, RatingEntry, SamplePool, Stage, Step, StudyRecord, ITEMS_PER_POLARITY,
    MIN_DESCRIPTION_CHARS,
};
use crate::data::ItemCatalog;
use crate::ids::{ItemId, RaterId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("session for rater {0} already exists")]
    DuplicateSession(RaterId),
    #[error("no session for rater {0}")]
    UnknownSession(RaterId),
    #[error("out of order: expected step {expected}, got {got}")]
    OutOfOrder { expected: Step, got: Step },
    #[error("description has {chars} characters; the minimum is {MIN_DESCRIPTION_CHARS}")]
    DescriptionTooShort { chars: usize },
    #[error("expected exactly {ITEMS_PER_POLARITY} items, got {0}")]
    WrongItemCount(usize),
    #[error("item {0} listed more than once")]
    DuplicateItem(ItemId),
    #[error("item {0} is not in the catalog")]
    UnknownItem(ItemId),
    #[error("item {0} is already in the opposite list")]
    Overlap(ItemId),
    #[error("item {0} is not in this rater's pool")]
    NotInPool(ItemId),
    #[error("score {0} outside 1..=5")]
    ScoreOutOfRange(u8),
    #[error(transparent)]
    Pool(#[from] PoolError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at line {line}: {message}")]
    Format { line: usize, message: String },
}

/// One rater's progress through both phases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    profile: RaterProfile,
    step: Step,
    pool: Option<SamplePool>,
    ratings: BTreeMap<ItemId, RatingEntry>,
}

impl Session {
    pub fn new(rater_id: RaterId) -> Self {
        Session {
            profile: RaterProfile::new(rater_id),
            step: Step::InitialDescPos,
            pool: None,
            ratings: BTreeMap::new(),
        }
    }

    pub fn rater_id(&self) -> &RaterId {
        &self.profile.rater_id
    }

    pub fn profile(&self) -> &RaterProfile {
        &self.profile
    }

    /// The next step this session accepts.
    pub fn step(&self) -> Step {
        self.step
    }

    pub fn pool(&self) -> Option<&SamplePool> {
        self.pool.as_ref()
    }

    pub fn n_rated(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_complete(&self) -> bool {
        self.step == Step::Complete
    }

    fn expect(&self, got: Step) -> Result<(), ProtocolError> {
        if self.step != got {
            return Err(ProtocolError::OutOfOrder {
                expected: self.step,
                got,
            });
        }
        Ok(())
    }

    fn advance(&mut self, step: Step, now: u64) {
        self.profile.timestamps.insert(step, now);
        self.step = step.next();
    }

    pub fn submit_description(
        &mut self,
        polarity: Polarity,
        stage: Stage,
        text: &str,
        now: u64,
    ) -> Result<&RaterProfile, ProtocolError> {
        let step = Step::description(polarity, stage);
        self.expect(step)?;
        let chars = text.chars().count();
        if chars < MIN_DESCRIPTION_CHARS {
            return Err(ProtocolError::DescriptionTooShort { chars });
        }
        *self.profile.description_mut(polarity, stage) = text.to_string();
        self.advance(step, now);
        Ok(&self.profile)
    }

    pub fn submit_items(
        &mut self,
        polarity: Polarity,
        items: &[ItemId],
        catalog: &ItemCatalog,
        now: u64,
    ) -> Result<&RaterProfile, ProtocolError> {
        let step = Step::items(polarity);
        self.expect(step)?;
        if items.len() != ITEMS_PER_POLARITY {
            return Err(ProtocolError::WrongItemCount(items.len()));
        }
        for (i, item) in items.iter().enumerate() {
            if !catalog.contains(item) {
                return Err(ProtocolError::UnknownItem(item.clone()));
            }
            if items[..i].contains(item) {
                return Err(ProtocolError::DuplicateItem(item.clone()));
            }
        }
        let opposite = match polarity {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        };
        if let Some(item) = items.iter().find(|i| self.profile.items(opposite).contains(i)) {
            return Err(ProtocolError::Overlap(item.clone()));
        }
        match polarity {
            Polarity::Positive => self.profile.liked_items = items.to_vec(),
            Polarity::Negative => self.profile.disliked_items = items.to_vec(),
        }
        self.advance(step, now);
        Ok(&self.profile)
    }

    pub fn assemble_pool(&mut self, assembler: &PoolAssembler, seed: u64, now: u64) -> Result<&SamplePool, ProtocolError> {
        self.expect(Step::Pool)?;
        let pool = assembler.assemble(&self.profile, seed)?;
        self.pool = Some(pool);
        self.advance(Step::Pool, now);
        Ok(self.pool.as_ref().expect("pool just set"))
    }

    /// Upserts a rating. Rating every pool item completes the session; later
    /// corrections are still accepted.
    pub fn submit_rating(&mut self, item_id: &ItemId, seen: bool, score: u8, now: u64) -> Result<usize, ProtocolError> {
        if !matches!(self.step, Step::Rating | Step::Complete) {
            return Err(ProtocolError::OutOfOrder {
                expected: self.step,
                got: Step::Rating,
            });
        }
        let pool = self.pool.as_ref().expect("pool exists once rating starts");
        if !pool.contains(item_id) {
            return Err(ProtocolError::NotInPool(item_id.clone()));
        }
        if !(1..=5).contains(&score) {
            return Err(ProtocolError::ScoreOutOfRange(score));
        }
        self.ratings.insert(
            item_id.clone(),
            RatingEntry {
                item_id: item_id.clone(),
                seen,
                score,
            },
        );
        if self.step == Step::Rating && self.ratings.len() == pool.entries.len() {
            self.advance(Step::Rating, now);
            self.profile.timestamps.insert(Step::Complete, now);
        }
        Ok(self.ratings.len())
    }

    /// The record in pool-entry order; `None` before the pool exists. Unrated
    /// entries are left out, so the record is complete only if every entry
    /// was rated.
    pub fn record(&self) -> Option<StudyRecord> {
        let pool = self.pool.as_ref()?;
        let ratings = pool
            .entries
            .iter()
            .filter_map(|e| self.ratings.get(&e.item_id).cloned())
            .collect();
        Some(StudyRecord {
            rater_id: self.profile.rater_id.clone(),
            pool: pool.clone(),
            ratings,
        })
    }
}
